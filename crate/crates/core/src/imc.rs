//! Internal model control: filter, equivalent feedback controller and the
//! PID tuning rule for second-order real-pole plants.

use crate::error::{Error, Result};
use crate::lti::ContinuousTF;
use crate::pid::PidParams;
use crate::poly::Polynomial;
use crate::reduction::SecondOrderModel;

/// Derivative filter coefficient used for every tuned controller.
pub const DEFAULT_N_FILTER: f64 = 10.0;

/// `lambda` is the filter time constant in seconds, `order` the filter order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImcDesign {
    pub lambda: f64,
    pub order: u32,
}

impl ImcDesign {
    pub fn new(lambda: f64, order: u32) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() || order == 0 {
            return Err(Error::InvalidArgument(
                "IMC design needs lambda > 0 and order >= 1",
            ));
        }
        Ok(Self { lambda, order })
    }
}

/// Named (lambda11, lambda22) pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaPreset {
    /// The pair that reproduces the published controller gains.
    Table3,
    /// The pair quoted in the design narrative; gives half the gains.
    Prose,
    Explicit(f64, f64),
}

impl LambdaPreset {
    pub fn lambdas(self) -> (f64, f64) {
        match self {
            LambdaPreset::Table3 => (0.1, 0.1),
            LambdaPreset::Prose => (0.2, 0.2),
            LambdaPreset::Explicit(a, b) => (a, b),
        }
    }
}

/// `1 / (lambda s + 1)^n`.
pub fn imc_filter(design: &ImcDesign) -> ContinuousTF {
    let den = Polynomial::new([1.0, design.lambda]).powi(design.order);
    ContinuousTF::new(Polynomial::constant(1.0), den).expect("unit constant term")
}

/// Classical feedback controller equivalent to IMC with a perfect model:
/// `C = f / (G (1 - f))`.
///
/// With `G = num/den` and `f = 1/F`, this is `den / (num (F - 1))`. `F - 1`
/// has no constant term, so the controller always carries an integrator.
///
/// One excess zero is accepted: it is the ideal derivative of a PID, which
/// the runtime controller filters. More than that is `ImproperResult`.
pub fn imc_controller_tf(plant: &ContinuousTF, design: &ImcDesign) -> Result<ContinuousTF> {
    if plant.num().is_zero() {
        return Err(Error::ZeroGainPlant);
    }
    if let Some(z) = plant.num().roots().into_iter().find(|z| z.re >= 0.0) {
        return Err(Error::NonMinimumPhase { real: z.re });
    }
    if let Some(p) = plant.den().roots().into_iter().find(|p| p.re >= 0.0) {
        return Err(Error::UnstablePlant { real: p.re });
    }
    let relative_degree = plant.relative_degree();
    if relative_degree > design.order as usize + 1 {
        return Err(Error::ImproperResult {
            relative_degree,
            order: design.order,
        });
    }
    let f_den = Polynomial::new([1.0, design.lambda]).powi(design.order);
    let mut shifted = f_den.into_coeffs();
    shifted[0] = 0.0;
    let den = plant.num() * &Polynomial::new(shifted);
    ContinuousTF::new(plant.den().clone(), den)
}

/// PID gains from the IMC rule with a first-order filter:
/// `k = (tau1 + tau2) / (lambda kp)`, `tau_i = tau1 + tau2`,
/// `tau_d = tau1 tau2 / (tau1 + tau2)`.
pub fn imc_pid(
    model: &SecondOrderModel,
    lambda: f64,
    n_filter: f64,
    limits: (f64, f64),
) -> Result<PidParams> {
    if model.kp == 0.0 {
        return Err(Error::ZeroGainPlant);
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument("lambda must be positive"));
    }
    let tau_i = model.tau1 + model.tau2;
    let k = tau_i / (lambda * model.kp);
    let tau_d = model.tau1 * model.tau2 / tau_i;
    PidParams::new(k, tau_i, tau_d, n_filter, limits.0, limits.1)
}

/// Ideal PID `k (1 + 1/(tau_i s) + tau_d s)` as a rational function.
pub fn ideal_pid_tf(k: f64, tau_i: f64, tau_d: f64) -> ContinuousTF {
    let num = Polynomial::new([k, k * tau_i, k * tau_i * tau_d]);
    let den = Polynomial::new([0.0, tau_i]);
    ContinuousTF::new(num, den).expect("tau_i is nonzero")
}
