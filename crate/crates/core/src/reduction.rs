//! Second-order real-pole model reduction from step responses.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lti::ContinuousTF;
use crate::nelder_mead::{self, NelderMeadOptions};
use crate::poly::Polynomial;

/// Lower clamp for the fast time constant.
pub const MIN_TAU: f64 = 1e-9;

/// `kp / ((tau1 s + 1)(tau2 s + 1))` with `tau1 >= tau2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderModel {
    pub kp: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl SecondOrderModel {
    /// Orders the time constants so that `tau1 >= tau2`.
    pub fn new(kp: f64, tau_a: f64, tau_b: f64) -> Result<Self> {
        if !(tau_a > 0.0 && tau_b > 0.0)
            || !kp.is_finite()
            || !tau_a.is_finite()
            || !tau_b.is_finite()
        {
            return Err(Error::InvalidArgument(
                "time constants must be positive and finite",
            ));
        }
        let (tau1, tau2) = if tau_a >= tau_b {
            (tau_a, tau_b)
        } else {
            (tau_b, tau_a)
        };
        Ok(Self { kp, tau1, tau2 })
    }

    pub fn step(&self, t: f64) -> f64 {
        sopm_step(self, t)
    }

    pub fn to_tf(&self) -> ContinuousTF {
        sopm_to_tf(self)
    }
}

/// Closed-form unit step response at `t >= 0`.
pub fn sopm_step(m: &SecondOrderModel, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let (t1, t2) = (m.tau1, m.tau2);
    if (t1 - t2).abs() < 1e-9 * t1 {
        let tau = 0.5 * (t1 + t2);
        return m.kp * (1.0 - (1.0 + t / tau) * libm::exp(-t / tau));
    }
    m.kp * (1.0 - (t1 * libm::exp(-t / t1) - t2 * libm::exp(-t / t2)) / (t1 - t2))
}

pub fn sopm_to_tf(m: &SecondOrderModel) -> ContinuousTF {
    let den = Polynomial::new([1.0, m.tau1 + m.tau2, m.tau1 * m.tau2]);
    ContinuousTF::new(Polynomial::constant(m.kp), den)
        .expect("denominator has a unit constant term")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub model: SecondOrderModel,
    /// `100 (1 - |y - yhat| / |y - mean(y)|)`.
    pub fit_percent: f64,
    /// Euclidean norm of the residual.
    pub residual_norm: f64,
    /// False when `tau2` came out below one sample period.
    pub tau2_identifiable: bool,
}

/// Sum of squared residuals of `amplitude * model` against `response`
/// sampled at `n * ts`.
pub fn sum_squared_residual(
    m: &SecondOrderModel,
    response: &[f64],
    ts: f64,
    amplitude: f64,
) -> f64 {
    response
        .iter()
        .enumerate()
        .map(|(n, y)| {
            let r = y - amplitude * sopm_step(m, n as f64 * ts);
            r * r
        })
        .sum()
}

struct FitProblem<'a> {
    y: &'a [f64],
    ts: f64,
    amplitude: f64,
    log_tau_min: f64,
    log_tau_max: f64,
    kscale: f64,
    /// Total sum of squares of the response, normalises the objective.
    sst: f64,
}

impl FitProblem<'_> {
    fn taus(&self, l1: f64, l2: f64) -> (f64, f64) {
        let c = |l: f64| libm::exp(l.clamp(self.log_tau_min, self.log_tau_max));
        (c(l1), c(l2))
    }

    fn model(&self, p: &[f64]) -> SecondOrderModel {
        let (t1, t2) = self.taus(p[1], p[2]);
        let (tau1, tau2) = if t1 >= t2 { (t1, t2) } else { (t2, t1) };
        SecondOrderModel {
            kp: p[0] * self.kscale,
            tau1,
            tau2,
        }
    }

    fn objective(&self, p: &[f64]) -> f64 {
        sum_squared_residual(&self.model(p), self.y, self.ts, self.amplitude) / self.sst
    }

    /// Least-squares gain for fixed time constants.
    fn best_gain(&self, tau1: f64, tau2: f64) -> f64 {
        let unit = SecondOrderModel {
            kp: 1.0,
            tau1: tau1.max(tau2),
            tau2: tau1.min(tau2),
        };
        let (mut num, mut den) = (0.0, 0.0);
        for (n, y) in self.y.iter().enumerate() {
            let phi = self.amplitude * sopm_step(&unit, n as f64 * self.ts);
            num += y * phi;
            den += phi * phi;
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}

/// Fits `kp / ((tau1 s + 1)(tau2 s + 1))` to a step response by least squares.
///
/// The simplex runs over `(kp, ln tau1, ln tau2)`. It is started from the
/// final value with the 63% rise time and `ts/10`, and additionally from the
/// best points of a coarse log-spaced scan of the time constants (with the
/// gain solved linearly at each scan point), which keeps it out of the local
/// minima that step-response fits are prone to.
pub fn fit_sopm(response: &[f64], ts: f64, amplitude: f64) -> Result<FitReport> {
    if response.len() < 10 {
        return Err(Error::InvalidArgument(
            "step response needs at least 10 samples",
        ));
    }
    if !(ts > 0.0) {
        return Err(Error::InvalidArgument("sample time must be positive"));
    }
    if amplitude == 0.0 || !amplitude.is_finite() {
        return Err(Error::InvalidArgument("step amplitude must be nonzero"));
    }
    if response.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidArgument(
            "step response contains non-finite samples",
        ));
    }
    let (lo, hi) = min_max(response);
    let range = hi - lo;
    if range < 1e-12 {
        return Err(Error::DegenerateFit { range });
    }
    let tail_len = response.len().div_ceil(10);
    let (tlo, thi) = min_max(&response[response.len() - tail_len.max(2)..]);
    if thi - tlo >= 0.05 * range {
        return Err(Error::NotSettled {
            tail_variation: thi - tlo,
            range,
        });
    }

    let n = response.len();
    let mean = response.iter().sum::<f64>() / n as f64;
    let sst = response
        .iter()
        .map(|y| (y - mean) * (y - mean))
        .sum::<f64>();
    let horizon = (n - 1) as f64 * ts;
    let final_value = response[n - 1];
    let problem = FitProblem {
        y: response,
        ts,
        amplitude,
        log_tau_min: libm::log(MIN_TAU * 1e-3),
        log_tau_max: libm::log(1e4 * horizon.max(ts)),
        kscale: (final_value / amplitude).abs().max(range / amplitude.abs()),
        sst,
    };

    // 63% rise-time seed
    let y0 = response[0];
    let target = y0 + 0.632 * (final_value - y0);
    let rising = final_value >= y0;
    let t63 = response
        .iter()
        .position(|&y| if rising { y >= target } else { y <= target })
        .map(|i| i as f64 * ts)
        .unwrap_or(horizon)
        .max(ts);

    let mut seeds: Vec<(f64, f64)> = Vec::new();
    seeds.push((t63, ts / 10.0));

    // coarse scan, gain by linear least squares
    let scan: Vec<f64> = logspace(ts * 1e-2, horizon * 10.0, 24);
    let mut scored: Vec<(f64, f64, f64)> = Vec::new();
    for (i, &a) in scan.iter().enumerate() {
        for &b in &scan[..=i] {
            let k = problem.best_gain(a, b);
            let m = SecondOrderModel {
                kp: k,
                tau1: a,
                tau2: b,
            };
            scored.push((sum_squared_residual(&m, response, ts, amplitude), a, b));
        }
    }
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    seeds.extend(scored.iter().take(4).map(|s| (s.1, s.2)));

    let opts = NelderMeadOptions {
        max_iter: 6000,
        f_tol: 1e-12,
        f_abs: 1e-22,
        x_tol: 1e-9,
        initial_step: 0.1,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (i, &(t1, t2)) in seeds.iter().enumerate() {
        let kp0 = if i == 0 {
            final_value / amplitude
        } else {
            problem.best_gain(t1, t2)
        };
        let x0 = [kp0 / problem.kscale, libm::log(t1), libm::log(t2)];
        let mut m = nelder_mead::minimize(|p| problem.objective(p), &x0, &opts);
        // restart once from the optimum to escape a collapsed simplex
        let again = nelder_mead::minimize(|p| problem.objective(p), &m.x, &opts);
        if again.f <= m.f {
            m = again;
        }
        if best.as_ref().map_or(true, |(f, _)| m.f < *f) {
            best = Some((m.f, m.x));
        }
    }
    let (_, x) = best.expect("at least one seed");
    let raw = problem.model(&x);
    let tau2 = raw.tau2.clamp(MIN_TAU, raw.tau1);
    let model = SecondOrderModel {
        kp: raw.kp,
        tau1: raw.tau1,
        tau2,
    };

    let ssr = sum_squared_residual(&model, response, ts, amplitude);
    let residual_norm = libm::sqrt(ssr);
    let spread = libm::sqrt(sst);
    let fit_percent = 100.0 * (1.0 - residual_norm / spread);
    Ok(FitReport {
        model,
        fit_percent,
        residual_norm,
        tau2_identifiable: tau2 >= ts,
    })
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (libm::log(a), libm::log(b));
    (0..n)
        .map(|i| libm::exp(la + (lb - la) * i as f64 / (n - 1) as f64))
        .collect()
}
