//! Grid search over the two IMC filter constants.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::imc::imc_pid;
use crate::metrics::{aggregate_j, IndexSet, JWeights, MetricsReport};
use crate::pairing::MimoPlant2x2;
use crate::reduction::SecondOrderModel;
use crate::scenario::{run_closed_loop, Scenario, SimResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    lambda11: Vec<f64>,
    lambda22: Vec<f64>,
}

impl SweepGrid {
    pub fn new(lambda11: Vec<f64>, lambda22: Vec<f64>) -> Result<Self> {
        for axis in [&lambda11, &lambda22] {
            if axis.is_empty() {
                return Err(Error::InvalidArgument("sweep axes must be nonempty"));
            }
            if axis.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
                return Err(Error::InvalidArgument("lambda values must be positive"));
            }
            if axis.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidArgument(
                    "lambda values must be strictly ascending",
                ));
            }
        }
        Ok(Self { lambda11, lambda22 })
    }

    /// `count` values `start, start + step, ...` on each axis.
    pub fn uniform(start: f64, step: f64, count: usize) -> Result<Self> {
        let axis: Vec<f64> = (0..count).map(|k| start + step * k as f64).collect();
        Self::new(axis.clone(), axis)
    }

    /// 0.01 to 0.51 in steps of 0.05 on both axes: 121 points.
    pub fn standard() -> Self {
        Self::uniform(0.01, 0.05, 11).expect("valid grid")
    }

    pub fn lambda11(&self) -> &[f64] {
        &self.lambda11
    }

    pub fn lambda22(&self) -> &[f64] {
        &self.lambda22
    }

    pub fn len(&self) -> usize {
        self.lambda11.len() * self.lambda22.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in row-major order, `lambda11` outermost.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lambda11
            .iter()
            .flat_map(move |&a| self.lambda22.iter().map(move |&b| (a, b)))
    }
}

/// Result at one grid point. Diverged runs carry `+inf` in `j` and `ratios`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub lambda11: f64,
    pub lambda22: f64,
    pub stable: bool,
    pub raw: IndexSet,
    pub ratios: [f64; 8],
    pub j: f64,
}

/// Everything a grid point evaluation needs; read-only and shareable.
#[derive(Debug, Clone)]
pub struct SweepProblem {
    pub models: [SecondOrderModel; 2],
    pub n_filter: f64,
    /// Absolute actuator limits per loop.
    pub limits: [(f64, f64); 2],
    pub plant: MimoPlant2x2,
    pub scenario: Scenario,
    pub weights: JWeights,
    baseline: IndexSet,
}

impl SweepProblem {
    /// Scores the baseline run once; every baseline index must be positive.
    pub fn new(
        models: [SecondOrderModel; 2],
        n_filter: f64,
        limits: [(f64, f64); 2],
        plant: MimoPlant2x2,
        scenario: Scenario,
        baseline: &SimResult,
        weights: JWeights,
    ) -> Result<Self> {
        let baseline = IndexSet::score(baseline, &scenario.windows)?;
        aggregate_j(&baseline, &baseline, &weights)?;
        Ok(Self {
            models,
            n_filter,
            limits,
            plant,
            scenario,
            weights,
            baseline,
        })
    }

    pub fn baseline(&self) -> &IndexSet {
        &self.baseline
    }

    /// Tunes both loops at `(lambda11, lambda22)`, simulates and scores.
    pub fn evaluate(&self, lambda11: f64, lambda22: f64) -> Result<SweepPoint> {
        let c1 = imc_pid(&self.models[0], lambda11, self.n_filter, self.limits[0])?;
        let c2 = imc_pid(&self.models[1], lambda22, self.n_filter, self.limits[1])?;
        let sim = run_closed_loop(&self.plant, &[c1, c2], &self.scenario)?;
        let raw = IndexSet::score(&sim, &self.scenario.windows)?;
        let MetricsReport { relative, .. } = aggregate_j(&raw, &self.baseline, &self.weights)?;
        let rel = relative.expect("baseline given");
        let stable =
            !sim.diverged() && rel.j.is_finite() && rel.ratios.iter().all(|r| r.is_finite());
        let (ratios, j) = if stable {
            (rel.ratios, rel.j)
        } else {
            ([f64::INFINITY; 8], f64::INFINITY)
        };
        Ok(SweepPoint {
            lambda11,
            lambda22,
            stable,
            raw,
            ratios,
            j,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSurface {
    pub grid: SweepGrid,
    /// Row-major, `lambda11` outermost.
    pub points: Vec<SweepPoint>,
}

impl SweepSurface {
    /// Points must be in grid order.
    pub fn assemble(grid: SweepGrid, points: Vec<SweepPoint>) -> Result<Self> {
        if points.len() != grid.len()
            || points
                .iter()
                .zip(grid.points())
                .any(|(p, (a, b))| p.lambda11 != a || p.lambda22 != b)
        {
            return Err(Error::InvalidArgument("sweep points do not match the grid"));
        }
        Ok(Self { grid, points })
    }

    pub fn at(&self, i11: usize, i22: usize) -> &SweepPoint {
        &self.points[i11 * self.grid.lambda22.len() + i22]
    }

    /// Spearman rank correlation between `lambda11` and `J` along the
    /// column at the median `lambda22`.
    pub fn lambda11_trend(&self) -> f64 {
        let col = (self.grid.lambda22.len() - 1) / 2;
        let j: Vec<f64> = (0..self.grid.lambda11.len())
            .map(|i| self.at(i, col).j)
            .collect();
        spearman(&self.grid.lambda11, &j)
    }
}

/// Evaluates every grid point in order on the calling thread.
pub fn run_sweep(problem: &SweepProblem, grid: &SweepGrid) -> Result<SweepSurface> {
    let points = grid
        .points()
        .map(|(a, b)| problem.evaluate(a, b))
        .collect::<Result<Vec<_>>>()?;
    SweepSurface::assemble(grid.clone(), points)
}

/// Minimum finite `J`; ties go to the lexicographically smaller
/// `(lambda11, lambda22)`.
pub fn argmin_j(surface: &SweepSurface) -> Result<(f64, f64, f64)> {
    let mut best: Option<&SweepPoint> = None;
    for p in surface
        .points
        .iter()
        .filter(|p| p.stable && p.j.is_finite())
    {
        let better = match best {
            None => true,
            Some(b) => {
                p.j < b.j || (p.j == b.j && (p.lambda11, p.lambda22) < (b.lambda11, b.lambda22))
            }
        };
        if better {
            best = Some(p);
        }
    }
    best.map(|p| (p.lambda11, p.lambda22, p.j))
        .ok_or(Error::AllUnstable)
}

/// Average ranks, ties sharing the mean rank; NaN sorts last.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = alloc::vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut k = i;
        while k + 1 < idx.len() && x[idx[k + 1]] == x[idx[i]] {
            k += 1;
        }
        let avg = (i + k) as f64 / 2.0 + 1.0;
        for &m in &idx[i..=k] {
            r[m] = avg;
        }
        i = k + 1;
    }
    r
}

/// Spearman rank correlation; NaN when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / libm::sqrt(sxx * syy)
}
