//! Numerics for IMC-tuned decentralized PID control of a 2x2 vapour-compression
//! refrigeration plant.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the whole design loop:
//! rational transfer functions in `s` and `z^-1`, relative gain array pairing,
//! second-order model reduction, IMC tuning rules, a discrete PID with
//! derivative filter and back-calculation anti-windup, closed-loop scenario
//! simulation, the RIAE/RITAE/RIAVU/J index family and lambda grid sweeps.
//!
//! File formats, the CLI and the parallel sweep driver live in the `refrig-imc`
//! crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod imc;
pub mod lti;
pub mod metrics;
pub mod nelder_mead;
pub mod pairing;
pub mod pid;
pub mod poly;
pub mod presets;
pub mod reduction;
pub mod scenario;
pub mod sweep;

pub use error::{Channel, Error, Result};
pub use imc::{imc_controller_tf, imc_filter, imc_pid, ImcDesign, LambdaPreset};
pub use lti::{ContinuousTF, DiscreteFilter, DiscreteTF, Lti};
pub use metrics::{
    aggregate_j, iae, iavu, itae, IndexSet, JWeights, MetricsReport, RelativeIndices,
};
pub use pairing::{
    recommend_pairing, rga, steady_state_matrix, GainMatrix, MimoPlant2x2, Pairing, RgaMatrix,
};
pub use pid::{pid_reset, pid_step, PidParams, PidState};
pub use poly::Polynomial;
pub use reduction::{fit_sopm, sopm_step, sopm_to_tf, FitReport, SecondOrderModel};
pub use scenario::{default_scenario, run_closed_loop, OperatingPoint, Scenario, SimResult};
pub use sweep::{argmin_j, run_sweep, SweepGrid, SweepPoint, SweepProblem, SweepSurface};
