//! Integral performance indices and the aggregate `J` comparison.
//!
//! The eight indices are ordered `IAE1, IAE2, ITAE1@w1, ITAE2@w2, ITAE2@w3,
//! ITAE2@w4, IAVU1, IAVU2`. Transient window 1 scores loop 1, windows 2 to 4
//! score loop 2.

use crate::error::{Error, Result};
use crate::scenario::SimResult;

/// Names of the eight indices in ratio order.
pub const INDEX_NAMES: [&str; 8] = [
    "IAE1", "IAE2", "ITAE1@w1", "ITAE2@w2", "ITAE2@w3", "ITAE2@w4", "IAVU1", "IAVU2",
];

/// Loop scored by each transient window.
pub const WINDOW_LOOPS: [usize; 4] = [0, 1, 1, 1];

/// Trapezoidal integral of `|e|`.
pub fn iae(e: &[f64], ts: f64) -> f64 {
    e.windows(2)
        .map(|w| 0.5 * ts * (w[0].abs() + w[1].abs()))
        .sum()
}

/// Trapezoidal integral of `(t - t_c) |e(t)|` over `[t_c, t_c + t_s]`, with
/// `e[n]` sampled at `n ts`. Window edges between samples use linear
/// interpolation of `|e|`.
pub fn itae(e: &[f64], ts: f64, window: (f64, f64)) -> Result<f64> {
    let (tc, tw) = window;
    let span = ts * e.len().saturating_sub(1) as f64;
    let end = tc + tw;
    let tol = 1e-9 * ts;
    if e.is_empty() || !(tc >= 0.0) || !(tw >= 0.0) || end > span + tol {
        return Err(Error::WindowOutOfRange {
            start: tc,
            end,
            span,
        });
    }
    let end = end.min(span);
    let abs_at = |t: f64| -> f64 {
        let x = t / ts;
        let i = libm::floor(x) as usize;
        if i + 1 >= e.len() {
            return e[e.len() - 1].abs();
        }
        let f = x - i as f64;
        (1.0 - f) * e[i].abs() + f * e[i + 1].abs()
    };
    // nodes: window start (integrand zero), interior grid points, window end
    let mut prev_t = tc;
    let mut prev_v = 0.0;
    let mut acc = 0.0;
    let mut n = libm::floor(tc / ts + 1e-9) as usize + 1;
    while n < e.len() && (n as f64) * ts < end - tol {
        let t = n as f64 * ts;
        let v = (t - tc) * e[n].abs();
        acc += 0.5 * (t - prev_t) * (prev_v + v);
        prev_t = t;
        prev_v = v;
        n += 1;
    }
    let v_end = (end - tc) * abs_at(end);
    acc += 0.5 * (end - prev_t) * (prev_v + v_end);
    Ok(acc)
}

/// Total variation `sum |u[n] - u[n-1]|`.
pub fn iavu(u: &[f64]) -> f64 {
    u.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Raw indices of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexSet {
    pub iae: [f64; 2],
    pub itae: [f64; 4],
    pub iavu: [f64; 2],
}

impl IndexSet {
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.iae[0],
            self.iae[1],
            self.itae[0],
            self.itae[1],
            self.itae[2],
            self.itae[3],
            self.iavu[0],
            self.iavu[1],
        ]
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        Self {
            iae: [a[0], a[1]],
            itae: [a[2], a[3], a[4], a[5]],
            iavu: [a[6], a[7]],
        }
    }

    /// Scores a simulation over four transient windows `(t_c, t_s)`.
    pub fn score(sim: &SimResult, windows: &[(f64, f64)]) -> Result<Self> {
        if windows.len() != 4 {
            return Err(Error::InvalidArgument(
                "scoring needs exactly four transient windows",
            ));
        }
        let ts = sim.ts;
        let mut itae_w = [0.0; 4];
        for (w, (&win, &lp)) in itae_w.iter_mut().zip(windows.iter().zip(&WINDOW_LOOPS)) {
            *w = itae(&sim.e[lp], ts, win)?;
        }
        Ok(Self {
            iae: [iae(&sim.e[0], ts), iae(&sim.e[1], ts)],
            itae: itae_w,
            iavu: [iavu(&sim.u[0]), iavu(&sim.u[1])],
        })
    }
}

/// Nonnegative weights of the eight ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JWeights([f64; 8]);

impl JWeights {
    pub fn new(w: [f64; 8]) -> Result<Self> {
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidArgument(
                "weights must be finite and nonnegative",
            ));
        }
        if !(w.iter().sum::<f64>() > 0.0) {
            return Err(Error::InvalidArgument("weights must not all be zero"));
        }
        Ok(Self(w))
    }

    pub fn as_array(&self) -> &[f64; 8] {
        &self.0
    }
}

impl Default for JWeights {
    fn default() -> Self {
        Self([1.0; 8])
    }
}

/// Weighted mean `sum w r / sum w`.
pub fn weighted_j(ratios: &[f64; 8], weights: &JWeights) -> f64 {
    let num: f64 = ratios.iter().zip(&weights.0).map(|(r, w)| w * r).sum();
    let den: f64 = weights.0.iter().sum();
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeIndices {
    pub ratios: [f64; 8],
    pub j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub raw: IndexSet,
    pub relative: Option<RelativeIndices>,
}

impl MetricsReport {
    pub fn raw_only(raw: IndexSet) -> Self {
        Self {
            raw,
            relative: None,
        }
    }
}

/// Candidate over baseline ratios and their weighted mean.
pub fn aggregate_j(
    candidate: &IndexSet,
    baseline: &IndexSet,
    weights: &JWeights,
) -> Result<MetricsReport> {
    let c = candidate.to_array();
    let b = baseline.to_array();
    let mut ratios = [0.0; 8];
    for i in 0..8 {
        if !(b[i] > 0.0 && b[i].is_finite()) {
            return Err(Error::ZeroBaselineIndex(INDEX_NAMES[i]));
        }
        ratios[i] = c[i] / b[i];
    }
    let j = weighted_j(&ratios, weights);
    Ok(MetricsReport {
        raw: *candidate,
        relative: Some(RelativeIndices { ratios, j }),
    })
}
