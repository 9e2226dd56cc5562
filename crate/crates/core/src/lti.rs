//! Rational transfer functions in `s` and `z^-1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Relative threshold below which the DC denominator is considered unusable.
pub const GAIN_EPS: f64 = 1e-4;

/// Roots with `|z| > 1 - STABILITY_MARGIN` are classed as unstable.
pub const STABILITY_MARGIN: f64 = 1e-10;

fn checked_dc_gain(num: f64, den: f64, den_poly: &Polynomial) -> Result<f64> {
    let threshold = GAIN_EPS * den_poly.max_abs_coeff();
    if den.abs() < threshold || den == 0.0 {
        return Err(Error::IllConditionedGain {
            channel: None,
            den,
            threshold,
        });
    }
    Ok(num / den)
}

/// `num(s) / den(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousTF {
    num: Polynomial,
    den: Polynomial,
}

impl ContinuousTF {
    pub fn new(num: impl Into<Polynomial>, den: impl Into<Polynomial>) -> Result<Self> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(Error::DegenerateDenominator(
                "denominator is identically zero",
            ));
        }
        Ok(Self { num, den })
    }

    pub fn gain(k: f64) -> Self {
        Self {
            num: Polynomial::constant(k),
            den: Polynomial::constant(1.0),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_proper(&self) -> bool {
        self.num.degree().unwrap_or(0) <= self.den.degree().unwrap_or(0)
    }

    /// `deg den - deg num`, saturating at zero.
    pub fn relative_degree(&self) -> usize {
        self.den
            .degree()
            .unwrap_or(0)
            .saturating_sub(self.num.degree().unwrap_or(0))
    }

    /// Limit `s -> 0`.
    pub fn dc_gain(&self) -> Result<f64> {
        checked_dc_gain(self.num.coeff(0), self.den.coeff(0), &self.den)
    }

    /// Same function with a monic denominator.
    pub fn normalized(&self) -> Self {
        let lead = self.den.leading();
        Self {
            num: self.num.scale(1.0 / lead),
            den: self.den.scale(1.0 / lead),
        }
    }

    /// Bilinear (Tustin) discretisation, `s <- (2/ts)(1 - z^-1)/(1 + z^-1)`.
    pub fn discretize(&self, ts: f64) -> Result<DiscreteTF> {
        if !(ts > 0.0) || !ts.is_finite() {
            return Err(Error::InvalidArgument("sample time must be positive"));
        }
        if !self.is_proper() {
            return Err(Error::InvalidArgument(
                "cannot discretize an improper transfer function",
            ));
        }
        let order = self.den.degree().unwrap_or(0);
        let c = 2.0 / ts;
        let minus = Polynomial::new(vec![1.0, -1.0]);
        let plus = Polynomial::new(vec![1.0, 1.0]);
        let substitute = |p: &Polynomial| -> Vec<f64> {
            let mut acc = vec![0.0; order + 1];
            let mut ck = 1.0;
            for k in 0..=order {
                let a = p.coeff(k);
                if a != 0.0 {
                    let term = &minus.powi(k as u32) * &plus.powi((order - k) as u32);
                    for (i, t) in term.coeffs().iter().enumerate() {
                        acc[i] += a * ck * t;
                    }
                }
                ck *= c;
            }
            acc
        };
        let num = substitute(&self.num);
        let den = substitute(&self.den);
        DiscreteTF::new(num, den, ts)
    }

    /// Unit step response from rest, sampled every `ts` over `[0, horizon]`,
    /// through the bilinear discretisation.
    pub fn step_response(&self, horizon: f64, ts: f64) -> Result<Vec<f64>> {
        self.discretize(ts)?.step_response(horizon)
    }
}

/// `num(z^-1) / den(z^-1)` with `den[0] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTF {
    num: Polynomial,
    den: Polynomial,
    ts: f64,
}

impl DiscreteTF {
    /// Normalises so that the constant denominator coefficient is one.
    pub fn new(num: impl Into<Polynomial>, den: impl Into<Polynomial>, ts: f64) -> Result<Self> {
        if !(ts > 0.0) || !ts.is_finite() {
            return Err(Error::InvalidArgument("sample time must be positive"));
        }
        let (num, den) = (num.into(), den.into());
        let d0 = den.coeff(0);
        if den.is_zero() || d0 == 0.0 || !d0.is_finite() {
            return Err(Error::DegenerateDenominator(
                "constant denominator coefficient is zero",
            ));
        }
        Ok(Self {
            num: num.scale(1.0 / d0),
            den: den.scale(1.0 / d0),
            ts,
        })
    }

    pub fn gain(k: f64, ts: f64) -> Result<Self> {
        Self::new(vec![k], vec![1.0], ts)
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    /// Limit `z -> 1`.
    pub fn dc_gain(&self) -> Result<f64> {
        checked_dc_gain(self.num.eval(1.0), self.den.eval(1.0), &self.den)
    }

    /// Zero-state response to `u`.
    pub fn simulate(&self, u: &[f64]) -> Vec<f64> {
        let mut filter = DiscreteFilter::new(self);
        u.iter().map(|&x| filter.step(x)).collect()
    }

    /// `floor(horizon / ts) + 1` samples of the unit step response.
    pub fn step_response(&self, horizon: f64) -> Result<Vec<f64>> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidArgument("horizon must be positive"));
        }
        let n = libm::floor(horizon / self.ts + 1e-9) as usize + 1;
        Ok(self.simulate(&vec![1.0; n]))
    }

    /// Poles as roots in `z`.
    pub fn poles(&self) -> Vec<num_complex::Complex64> {
        // z^n den(1/z) has the coefficients of den reversed
        self.den.reversed().roots()
    }

    pub fn is_stable(&self) -> bool {
        self.poles()
            .iter()
            .all(|p| p.norm() < 1.0 - STABILITY_MARGIN)
    }
}

/// Either domain, for plants whose channels are read from files.
#[derive(Debug, Clone, PartialEq)]
pub enum Lti {
    Continuous(ContinuousTF),
    Discrete(DiscreteTF),
}

impl Lti {
    pub fn dc_gain(&self) -> Result<f64> {
        match self {
            Lti::Continuous(g) => g.dc_gain(),
            Lti::Discrete(g) => g.dc_gain(),
        }
    }

    /// Sample time for discrete channels.
    pub fn ts(&self) -> Option<f64> {
        match self {
            Lti::Continuous(_) => None,
            Lti::Discrete(g) => Some(g.ts()),
        }
    }

    /// Discrete model at `ts`; continuous channels are discretized, discrete
    /// ones must already run at `ts`.
    pub fn at_sample_time(&self, ts: f64) -> Result<DiscreteTF> {
        match self {
            Lti::Continuous(g) => g.discretize(ts),
            Lti::Discrete(g) => {
                if (g.ts() - ts).abs() > 1e-12 * ts {
                    return Err(Error::InvalidArgument(
                        "discrete channel sample time differs from the simulation sample time",
                    ));
                }
                Ok(g.clone())
            }
        }
    }
}

impl From<ContinuousTF> for Lti {
    fn from(g: ContinuousTF) -> Self {
        Lti::Continuous(g)
    }
}

impl From<DiscreteTF> for Lti {
    fn from(g: DiscreteTF) -> Self {
        Lti::Discrete(g)
    }
}

/// Direct-form difference equation with explicit state.
///
/// `y[n] = b0 u[n] + free_response()`, where the free response collects the
/// past inputs and outputs. Splitting it this way lets the closed-loop
/// simulator solve for `u[n]` when the channel has direct feedthrough.
#[derive(Debug, Clone)]
pub struct DiscreteFilter {
    b: Vec<f64>,
    a: Vec<f64>,
    // newest first
    u_hist: Vec<f64>,
    y_hist: Vec<f64>,
}

impl DiscreteFilter {
    pub fn new(g: &DiscreteTF) -> Self {
        let b = if g.num.is_zero() {
            vec![0.0]
        } else {
            g.num.coeffs().to_vec()
        };
        let a = g.den.coeffs().to_vec();
        let u_hist = vec![0.0; b.len().saturating_sub(1)];
        let y_hist = vec![0.0; a.len().saturating_sub(1)];
        Self {
            b,
            a,
            u_hist,
            y_hist,
        }
    }

    pub fn feedthrough(&self) -> f64 {
        self.b[0]
    }

    pub fn free_response(&self) -> f64 {
        let fwd: f64 = self.b[1..]
            .iter()
            .zip(&self.u_hist)
            .map(|(b, u)| b * u)
            .sum();
        let back: f64 = self.a[1..]
            .iter()
            .zip(&self.y_hist)
            .map(|(a, y)| a * y)
            .sum();
        fwd - back
    }

    /// Records the sample `(u[n], y[n])` and advances time.
    pub fn commit(&mut self, u: f64, y: f64) {
        if !self.u_hist.is_empty() {
            self.u_hist.rotate_right(1);
            self.u_hist[0] = u;
        }
        if !self.y_hist.is_empty() {
            self.y_hist.rotate_right(1);
            self.y_hist[0] = y;
        }
    }

    pub fn step(&mut self, u: f64) -> f64 {
        let y = self.b[0] * u + self.free_response();
        self.commit(u, y);
        y
    }

    pub fn reset(&mut self) {
        self.u_hist.iter_mut().for_each(|x| *x = 0.0);
        self.y_hist.iter_mut().for_each(|x| *x = 0.0);
    }
}
