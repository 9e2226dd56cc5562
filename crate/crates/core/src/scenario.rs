//! Closed-loop simulation of the 2x2 plant under two decentralized PID loops.
//!
//! Loop 1 drives `Te_sec_out` with the valve opening, loop 2 drives `Tsh`
//! with the compressor speed; all four plant channels are active. Signals are
//! simulated as deviations from an operating point.
//!
//! Discretized continuous channels have direct feedthrough, so the controller
//! output and the plant output of a sample depend on each other. Each sample
//! solves that algebraic loop exactly, including the actuator saturation, by
//! trying the nine free/low/high combinations of the two actuators and keeping
//! the first self-consistent one.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lti::DiscreteFilter;
use crate::pairing::MimoPlant2x2;
use crate::pid::{PidParams, PidState};

/// Disturbance channel names.
pub const DISTURBANCE_NAMES: [&str; 6] = [
    "Tc_sec_in",
    "m_dot_c_sec",
    "P_c_sec_in",
    "Te_sec_in",
    "m_dot_e_sec",
    "T_surr",
];

/// Diverged runs are stopped once an output deviation exceeds this multiple
/// of the setpoint range.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Plant outputs and actuator values at which the model is linearised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// `(Te_sec_out, Tsh)` in degrees Celsius.
    pub y0: [f64; 2],
    /// `(Av, N_comp)` in percent and Hz.
    pub u0: [f64; 2],
}

impl Default for OperatingPoint {
    fn default() -> Self {
        Self {
            y0: [-22.1, 14.65],
            u0: [50.0, 40.0],
        }
    }
}

impl OperatingPoint {
    pub fn zero() -> Self {
        Self {
            y0: [0.0; 2],
            u0: [0.0; 2],
        }
    }
}

/// Piecewise-constant signal given as `(time, value)` change points.
pub type Profile = Vec<(f64, f64)>;

/// Value of a profile at `t`; `before` applies ahead of the first point.
pub fn profile_value(p: &[(f64, f64)], t: f64, before: f64) -> f64 {
    p.iter()
        .take_while(|(tp, _)| *tp <= t)
        .last()
        .map_or(before, |(_, v)| *v)
}

/// Additive offset on one plant output.
#[derive(Debug, Clone, PartialEq)]
pub struct Disturbance {
    pub name: String,
    /// 0 for `Te_sec_out`, 1 for `Tsh`.
    pub output: usize,
    /// Offset is zero before the first point.
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub duration: f64,
    pub ts: f64,
    pub operating_point: OperatingPoint,
    /// Absolute setpoints; the operating point output applies before the
    /// first change point.
    pub setpoints: [Profile; 2],
    pub disturbances: Vec<Disturbance>,
    /// `(t_c, t_s)`: start and length of each transient window.
    pub windows: Vec<(f64, f64)>,
}

fn check_profile(p: &[(f64, f64)], duration: f64) -> Result<()> {
    if p.iter()
        .any(|(t, v)| !t.is_finite() || !v.is_finite() || *t < 0.0 || *t > duration)
    {
        return Err(Error::InvalidArgument(
            "profile points must be finite and inside [0, duration]",
        ));
    }
    if p.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidArgument(
            "profile times must be strictly increasing",
        ));
    }
    Ok(())
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidArgument("duration must be positive"));
        }
        if !(self.ts > 0.0) || !self.ts.is_finite() {
            return Err(Error::InvalidArgument("sample time must be positive"));
        }
        if self.ts > self.duration {
            return Err(Error::InvalidArgument("sample time exceeds the duration"));
        }
        for p in &self.setpoints {
            check_profile(p, self.duration)?;
        }
        for d in &self.disturbances {
            if d.output > 1 {
                return Err(Error::InvalidArgument(
                    "disturbance output index must be 0 or 1",
                ));
            }
            if !DISTURBANCE_NAMES.contains(&d.name.as_str()) {
                return Err(Error::InvalidArgument("unknown disturbance channel"));
            }
            check_profile(&d.profile, self.duration)?;
        }
        for &(tc, tw) in &self.windows {
            if !(tc >= 0.0 && tw > 0.0 && tc + tw <= self.duration * (1.0 + 1e-12)) {
                return Err(Error::WindowOutOfRange {
                    start: tc,
                    end: tc + tw,
                    span: self.duration,
                });
            }
        }
        Ok(())
    }

    /// `floor(duration / ts) + 1`.
    pub fn sample_count(&self) -> usize {
        libm::floor(self.duration / self.ts + 1e-9) as usize + 1
    }

    /// Setpoint deviation of loop `i` at `t`.
    pub fn setpoint_dev(&self, i: usize, t: f64) -> f64 {
        let y0 = self.operating_point.y0[i];
        profile_value(&self.setpoints[i], t, y0) - y0
    }

    /// Total additive disturbance on output `i` at `t`.
    pub fn disturbance(&self, i: usize, t: f64) -> f64 {
        self.disturbances
            .iter()
            .filter(|d| d.output == i)
            .map(|d| profile_value(&d.profile, t, 0.0))
            .sum()
    }

    /// Largest setpoint excursion over both loops, in deviation units.
    pub fn setpoint_range(&self) -> f64 {
        let mut range: f64 = 0.0;
        for i in 0..2 {
            let mut lo = 0.0_f64;
            let mut hi = 0.0_f64;
            for &(_, v) in &self.setpoints[i] {
                let d = v - self.operating_point.y0[i];
                lo = lo.min(d);
                hi = hi.max(d);
            }
            range = range.max(hi - lo);
        }
        range
    }

    pub fn with_ts(&self, ts: f64) -> Self {
        Self { ts, ..self.clone() }
    }
}

/// Twenty-minute tracking and rejection test at `ts = 1 s`: one valve-loop
/// setpoint step, three superheat setpoint steps and a condenser inlet
/// temperature disturbance at 16 minutes.
pub fn default_scenario() -> Scenario {
    Scenario {
        duration: 1200.0,
        ts: 1.0,
        operating_point: OperatingPoint::default(),
        setpoints: [
            vec![(0.0, -22.1), (120.0, -22.6)],
            vec![(0.0, 14.65), (300.0, 15.65), (540.0, 14.65), (780.0, 14.15)],
        ],
        disturbances: vec![Disturbance {
            name: "Tc_sec_in".into(),
            output: 1,
            profile: vec![(960.0, 0.5)],
        }],
        windows: vec![
            (120.0, 180.0),
            (300.0, 180.0),
            (540.0, 180.0),
            (780.0, 180.0),
        ],
    }
}

/// Sampled closed-loop signals in deviation variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub ts: f64,
    pub operating_point: OperatingPoint,
    pub time: Vec<f64>,
    pub r: [Vec<f64>; 2],
    pub y: [Vec<f64>; 2],
    pub u: [Vec<f64>; 2],
    /// `r - y`.
    pub e: [Vec<f64>; 2],
    pub saturated: [Vec<bool>; 2],
    /// Time at which the run was stopped as divergent; later samples are NaN.
    pub diverged_at: Option<f64>,
}

impl SimResult {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    /// Absolute setpoint of loop `i`.
    pub fn r_abs(&self, i: usize) -> Vec<f64> {
        self.r[i]
            .iter()
            .map(|v| v + self.operating_point.y0[i])
            .collect()
    }

    pub fn y_abs(&self, i: usize) -> Vec<f64> {
        self.y[i]
            .iter()
            .map(|v| v + self.operating_point.y0[i])
            .collect()
    }

    pub fn u_abs(&self, i: usize) -> Vec<f64> {
        self.u[i]
            .iter()
            .map(|v| v + self.operating_point.u0[i])
            .collect()
    }

    /// `Err(UnstableRun)` for diverged runs.
    pub fn check_stable(&self) -> Result<()> {
        match self.diverged_at {
            Some(time) => Err(Error::UnstableRun { time }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Active {
    Free,
    Low,
    High,
}

const ACTIVE_SETS: [[Active; 2]; 9] = {
    use Active::*;
    [
        [Free, Free],
        [Free, Low],
        [Free, High],
        [Low, Free],
        [High, Free],
        [Low, Low],
        [Low, High],
        [High, Low],
        [High, High],
    ]
};

struct Sample {
    u: [f64; 2],
    active: [Active; 2],
}

/// Solves `u_j = sat(c_j + g_j (r_j - sum_k b0[j][k] u_k - h_j))` for both
/// actuators at once.
fn solve_sample(
    b0: &[[f64; 2]; 2],
    h: &[f64; 2],
    r: &[f64; 2],
    aff: &[(f64, f64); 2],
    lim: &[(f64, f64); 2],
) -> Option<Sample> {
    for set in ACTIVE_SETS {
        let mut m = [[0.0; 2]; 2];
        let mut rhs = [0.0; 2];
        for j in 0..2 {
            match set[j] {
                Active::Free => {
                    let (c, g) = aff[j];
                    m[j] = [g * b0[j][0], g * b0[j][1]];
                    m[j][j] += 1.0;
                    rhs[j] = c + g * (r[j] - h[j]);
                }
                Active::Low => {
                    m[j][j] = 1.0;
                    rhs[j] = lim[j].0;
                }
                Active::High => {
                    m[j][j] = 1.0;
                    rhs[j] = lim[j].1;
                }
            }
        }
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det.abs() > 1e-300) || !det.is_finite() {
            continue;
        }
        let u = [
            (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
            (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det,
        ];
        let consistent = (0..2).all(|j| {
            let y = b0[j][0] * u[0] + b0[j][1] * u[1] + h[j];
            let (c, g) = aff[j];
            let raw = c + g * (r[j] - y);
            let (lo, hi) = lim[j];
            let tol = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
            match set[j] {
                Active::Free => raw >= lo - tol && raw <= hi + tol,
                Active::Low => raw <= lo + tol,
                Active::High => raw >= hi - tol,
            }
        });
        if consistent {
            let mut u = u;
            for j in 0..2 {
                if set[j] == Active::Free {
                    u[j] = u[j].clamp(lim[j].0, lim[j].1);
                }
            }
            return Some(Sample { u, active: set });
        }
    }
    None
}

/// Runs the scenario with controller `i` closing loop `i`.
///
/// Controller limits are absolute actuator values; they are shifted by the
/// operating point internally. A run whose output leaves the divergence bound
/// is stopped and flagged rather than reported as an error.
pub fn run_closed_loop(
    plant: &MimoPlant2x2,
    controllers: &[PidParams; 2],
    scenario: &Scenario,
) -> Result<SimResult> {
    scenario.validate()?;
    let ts = scenario.ts;
    let channels = plant.at_sample_time(ts)?;
    let mut filters: [[DiscreteFilter; 2]; 2] = [
        [
            DiscreteFilter::new(&channels[0][0]),
            DiscreteFilter::new(&channels[0][1]),
        ],
        [
            DiscreteFilter::new(&channels[1][0]),
            DiscreteFilter::new(&channels[1][1]),
        ],
    ];
    let u0 = scenario.operating_point.u0;
    let params = [
        controllers[0].with_limits(controllers[0].u_min - u0[0], controllers[0].u_max - u0[0])?,
        controllers[1].with_limits(controllers[1].u_min - u0[1], controllers[1].u_max - u0[1])?,
    ];
    let lim = [
        (params[0].u_min, params[0].u_max),
        (params[1].u_min, params[1].u_max),
    ];
    let mut states = [PidState::new(ts)?, PidState::new(ts)?];
    let b0 = [
        [filters[0][0].feedthrough(), filters[0][1].feedthrough()],
        [filters[1][0].feedthrough(), filters[1][1].feedthrough()],
    ];

    let n = scenario.sample_count();
    let bound = DIVERGENCE_FACTOR * scenario.setpoint_range().max(1.0);
    let nan_series = || vec![f64::NAN; n];
    let mut out = SimResult {
        ts,
        operating_point: scenario.operating_point,
        time: (0..n).map(|k| k as f64 * ts).collect(),
        r: [nan_series(), nan_series()],
        y: [nan_series(), nan_series()],
        u: [nan_series(), nan_series()],
        e: [nan_series(), nan_series()],
        saturated: [vec![false; n], vec![false; n]],
        diverged_at: None,
    };
    let mut y_prev = [0.0; 2];

    for k in 0..n {
        let t = out.time[k];
        let r = [scenario.setpoint_dev(0, t), scenario.setpoint_dev(1, t)];
        let free: [[f64; 2]; 2] = [
            [filters[0][0].free_response(), filters[0][1].free_response()],
            [filters[1][0].free_response(), filters[1][1].free_response()],
        ];
        let h = [
            free[0][0] + free[0][1] + scenario.disturbance(0, t),
            free[1][0] + free[1][1] + scenario.disturbance(1, t),
        ];
        let aff = [states[0].affine(&params[0]), states[1].affine(&params[1])];

        let (u, active) = match solve_sample(&b0, &h, &r, &aff, &lim) {
            Some(s) => (s.u, s.active),
            None => {
                // no consistent active set: act on the previous measurement
                let mut u = [0.0; 2];
                let mut active = [Active::Free; 2];
                for j in 0..2 {
                    let raw = aff[j].0 + aff[j].1 * (r[j] - y_prev[j]);
                    u[j] = params[j].clamp(raw);
                    if u[j] != raw {
                        active[j] = if u[j] == lim[j].0 {
                            Active::Low
                        } else {
                            Active::High
                        };
                    }
                }
                (u, active)
            }
        };

        let mut y = [0.0; 2];
        for i in 0..2 {
            for j in 0..2 {
                let yij = b0[i][j] * u[j] + free[i][j];
                filters[i][j].commit(u[j], yij);
                y[i] += yij;
            }
            y[i] += scenario.disturbance(i, t);
        }
        let e = [r[0] - y[0], r[1] - y[1]];
        for j in 0..2 {
            states[j].commit(&params[j], e[j], u[j]);
        }

        if y.iter()
            .chain(&u)
            .any(|v| !v.is_finite() || v.abs() > bound)
        {
            out.diverged_at = Some(t);
            break;
        }
        for i in 0..2 {
            out.r[i][k] = r[i];
            out.y[i][k] = y[i];
            out.u[i][k] = u[i];
            out.e[i][k] = e[i];
            out.saturated[i][k] = active[i] != Active::Free;
        }
        y_prev = y;
    }
    Ok(out)
}
