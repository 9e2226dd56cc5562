//! Discrete PID with filtered derivative, output saturation and
//! back-calculation anti-windup.
//!
//! Continuous form: `u = k (e + (1/tau_i) int e + tau_d s/(tau_d s / N + 1) e)`.
//! The integrator and the derivative filter are both discretised with
//! backward Euler. The back-calculation term `(u_sat - u_raw) / t_track` is
//! integrated implicitly as well, which keeps it stable when `t_track` is much
//! shorter than the sample time.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidParams {
    pub k: f64,
    /// Integral time; `f64::INFINITY` disables the integrator.
    pub tau_i: f64,
    /// Derivative time; zero disables the derivative path.
    pub tau_d: f64,
    pub n_filter: f64,
    pub u_min: f64,
    pub u_max: f64,
    /// Back-calculation tracking time constant.
    pub t_track: f64,
}

impl PidParams {
    /// Tracking constant defaults to `sqrt(tau_i tau_d)`, or `tau_i / 2`
    /// without derivative action.
    pub fn new(
        k: f64,
        tau_i: f64,
        tau_d: f64,
        n_filter: f64,
        u_min: f64,
        u_max: f64,
    ) -> Result<Self> {
        let t_track = default_t_track(tau_i, tau_d);
        Self::with_t_track(k, tau_i, tau_d, n_filter, u_min, u_max, t_track)
    }

    pub fn with_t_track(
        k: f64,
        tau_i: f64,
        tau_d: f64,
        n_filter: f64,
        u_min: f64,
        u_max: f64,
        t_track: f64,
    ) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidArgument("proportional gain must be finite"));
        }
        if !(tau_i > 0.0) {
            return Err(Error::InvalidArgument("tau_i must be positive"));
        }
        if !(tau_d >= 0.0) || !tau_d.is_finite() {
            return Err(Error::InvalidArgument("tau_d must be non-negative"));
        }
        if !(n_filter > 0.0) {
            return Err(Error::InvalidArgument(
                "derivative filter coefficient must be positive",
            ));
        }
        if !(u_min < u_max) {
            return Err(Error::InvalidArgument("u_min must be below u_max"));
        }
        if !(t_track > 0.0) {
            return Err(Error::InvalidArgument("t_track must be positive"));
        }
        Ok(Self {
            k,
            tau_i,
            tau_d,
            n_filter,
            u_min,
            u_max,
            t_track,
        })
    }

    /// Proportional-only controller.
    pub fn proportional(k: f64, u_min: f64, u_max: f64) -> Result<Self> {
        Self::new(k, f64::INFINITY, 0.0, 10.0, u_min, u_max)
    }

    /// Same gains, different actuator limits.
    pub fn with_limits(&self, u_min: f64, u_max: f64) -> Result<Self> {
        Self::with_t_track(
            self.k,
            self.tau_i,
            self.tau_d,
            self.n_filter,
            u_min,
            u_max,
            self.t_track,
        )
    }

    pub fn clamp(&self, u: f64) -> f64 {
        u.clamp(self.u_min, self.u_max)
    }
}

fn default_t_track(tau_i: f64, tau_d: f64) -> f64 {
    if tau_d > 0.0 {
        libm::sqrt(tau_i * tau_d)
    } else {
        tau_i / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidState {
    pub integrator: f64,
    pub d_filter: f64,
    pub prev_error: f64,
    pub ts: f64,
}

impl PidState {
    pub fn new(ts: f64) -> Result<Self> {
        if !(ts > 0.0) || !ts.is_finite() {
            return Err(Error::InvalidArgument("sample time must be positive"));
        }
        Ok(Self {
            integrator: 0.0,
            d_filter: 0.0,
            prev_error: 0.0,
            ts,
        })
    }

    fn integral_rate(&self, p: &PidParams) -> f64 {
        if p.tau_i.is_finite() {
            p.k * self.ts / p.tau_i
        } else {
            0.0
        }
    }

    /// `(filter memory, error gain)` of the derivative path:
    /// `D[n] = memory * D[n-1] + gain * (e[n] - e[n-1])`.
    fn derivative_coeffs(&self, p: &PidParams) -> (f64, f64) {
        if p.tau_d == 0.0 {
            return (0.0, 0.0);
        }
        let tf = p.tau_d / p.n_filter;
        (tf / (tf + self.ts), p.k * p.tau_d / (tf + self.ts))
    }

    /// The unsaturated output of the next step is `offset + gain * e`.
    pub fn affine(&self, p: &PidParams) -> (f64, f64) {
        let (mem, dg) = self.derivative_coeffs(p);
        let offset = self.integrator + mem * self.d_filter - dg * self.prev_error;
        let gain = p.k + self.integral_rate(p) + dg;
        (offset, gain)
    }

    /// Advances the state for error `e` given the output actually applied.
    /// Returns the unsaturated output.
    pub fn commit(&mut self, p: &PidParams, e: f64, u_applied: f64) -> f64 {
        let (mem, dg) = self.derivative_coeffs(p);
        let prop = p.k * e;
        let d = mem * self.d_filter + dg * (e - self.prev_error);
        let mut integ = self.integrator + self.integral_rate(p) * e;
        let raw = prop + integ + d;
        if u_applied != raw && (u_applied == p.u_min || u_applied == p.u_max) {
            let a = self.ts / p.t_track;
            if a.is_finite() && a > 0.0 {
                integ = (integ + a * (u_applied - prop - d)) / (1.0 + a);
            }
        }
        self.integrator = integ;
        self.d_filter = d;
        self.prev_error = e;
        raw
    }

    /// One controller step; returns the saturated output.
    pub fn step(&mut self, p: &PidParams, e: f64) -> f64 {
        let (offset, gain) = self.affine(p);
        let u = p.clamp(offset + gain * e);
        self.commit(p, e, u);
        u
    }

    pub fn reset(&mut self) {
        *self = Self {
            integrator: 0.0,
            d_filter: 0.0,
            prev_error: 0.0,
            ts: self.ts,
        };
    }
}

/// Functional form of [`PidState::step`].
pub fn pid_step(params: &PidParams, state: PidState, error: f64) -> (f64, PidState) {
    let mut s = state;
    let u = s.step(params, error);
    (u, s)
}

pub fn pid_reset(state: PidState) -> PidState {
    let mut s = state;
    s.reset();
    s
}
