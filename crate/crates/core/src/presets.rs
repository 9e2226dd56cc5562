//! Shipped models, limits and published reference values.

use libm::sqrt;

use crate::error::Channel;
use crate::imc::{imc_pid, LambdaPreset, DEFAULT_N_FILTER};
use crate::lti::{DiscreteTF, Lti};
use crate::pairing::{GainMatrix, MimoPlant2x2, RgaMatrix};
use crate::pid::PidParams;
use crate::reduction::SecondOrderModel;

/// Expansion valve opening range, percent.
pub const AV_LIMITS: (f64, f64) = (10.0, 90.0);
/// Compressor speed range, Hz.
pub const N_LIMITS: (f64, f64) = (30.0, 50.0);

/// Sample time of the identified discrete model, seconds.
pub const IDENTIFIED_TS: f64 = 1.0;

/// Identified Box-Jenkins plant channels as `(num, den)` in `z^-1`.
pub const IDENTIFIED_G11: (&[f64], &[f64]) = (&[0.0, -0.03408, 0.03357], &[1.0, -0.9699, 0.001037]);
pub const IDENTIFIED_G12: (&[f64], &[f64]) = (
    &[0.0, -0.00006045, 0.00075, 0.0002, -0.0003],
    &[1.0, -1.298, -0.344, 0.64, -0.0024],
);
pub const IDENTIFIED_G21: (&[f64], &[f64]) = (&[0.0, -0.3765, 0.3706], &[1.0, -0.9775, 0.000528]);
pub const IDENTIFIED_G22: (&[f64], &[f64]) = (
    &[0.0, 0.1746, -0.1639, -0.1744, 0.1637],
    &[1.0, -0.9375, -0.9976, 0.9367, -0.001551],
);

/// Published relative gain array of the plant.
pub const PUBLISHED_RGA: RgaMatrix = RgaMatrix([[1.0004, -0.0004], [-0.0004, 1.0004]]);

/// Published ratio rows in index order, with the printed `J`.
#[allow(clippy::approx_constant)]
pub const PUBLISHED_DECENTRALIZED: ([f64; 8], f64) = (
    [
        0.3511, 0.4458, 1.6104, 0.1830, 0.3196, 0.1280, 1.1283, 1.3739,
    ],
    0.68209,
);
pub const PUBLISHED_PID_IMC: ([f64; 8], f64) = (
    [
        0.076, 0.2052, 0.0411, 0.0163, 0.1195, 0.0051, 3.02085, 1.1098,
    ],
    0.2163,
);

fn discrete(c: (&[f64], &[f64])) -> Lti {
    Lti::Discrete(
        DiscreteTF::new(c.0.to_vec(), c.1.to_vec(), IDENTIFIED_TS).expect("valid coefficients"),
    )
}

/// The identified four-channel discrete plant at `ts = 1 s`.
pub fn identified_plant() -> MimoPlant2x2 {
    MimoPlant2x2::new(
        discrete(IDENTIFIED_G11),
        discrete(IDENTIFIED_G12),
        discrete(IDENTIFIED_G21),
        discrete(IDENTIFIED_G22),
    )
    .expect("channels share ts")
}

/// Reduced model of the `Te_sec_out <- Av` channel.
pub fn g11_reduced() -> SecondOrderModel {
    SecondOrderModel::new(-0.016, 31.0, 3e-5).expect("valid model")
}

/// Reduced model of the `Tsh <- N_comp` channel.
pub fn g22_reduced() -> SecondOrderModel {
    SecondOrderModel::new(0.16, 3.0, 1e-7).expect("valid model")
}

/// Gain matrix built from the reduced diagonal and the identified
/// off-diagonal channels.
pub fn hybrid_gain_matrix() -> GainMatrix {
    let p = identified_plant();
    let off = |c: Channel| {
        p.channel(c)
            .dc_gain()
            .expect("off-diagonal gains are well conditioned")
    };
    GainMatrix([
        [g11_reduced().kp, off(Channel::G12)],
        [off(Channel::G21), g22_reduced().kp],
    ])
}

/// Linear simulation plant: reduced diagonal channels, and cross channels
/// that share the dynamics of the output they feed, scaled so that the
/// steady-state relative gain equals the published `1.0004`.
pub fn surrogate_plant() -> MimoPlant2x2 {
    let (m1, m2) = (g11_reduced(), g22_reduced());
    let lambda = PUBLISHED_RGA.0[0][0];
    let s = sqrt(1.0 - 1.0 / lambda);
    let scaled =
        |m: &SecondOrderModel, k: f64| -> Lti { SecondOrderModel { kp: k, ..*m }.to_tf().into() };
    MimoPlant2x2::new(
        m1.to_tf().into(),
        scaled(&m1, s * m1.kp),
        scaled(&m2, s * m2.kp),
        m2.to_tf().into(),
    )
    .expect("continuous channels")
}

/// Stand-in for the benchmark's reference controller: a PI per loop with
/// `k = 1/kp` and `tau_i = tau1`.
pub fn baseline_controllers() -> [PidParams; 2] {
    let pi = |m: SecondOrderModel, lim: (f64, f64)| {
        PidParams::new(1.0 / m.kp, m.tau1, 0.0, DEFAULT_N_FILTER, lim.0, lim.1).expect("valid PI")
    };
    [pi(g11_reduced(), AV_LIMITS), pi(g22_reduced(), N_LIMITS)]
}

/// IMC-PID pair for the reduced models at the given lambdas.
pub fn imc_controllers(preset: LambdaPreset) -> crate::Result<[PidParams; 2]> {
    let (l11, l22) = preset.lambdas();
    Ok([
        imc_pid(&g11_reduced(), l11, DEFAULT_N_FILTER, AV_LIMITS)?,
        imc_pid(&g22_reduced(), l22, DEFAULT_N_FILTER, N_LIMITS)?,
    ])
}
