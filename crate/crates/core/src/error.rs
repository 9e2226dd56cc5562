use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// One of the four channels of a 2x2 plant, named output-first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    G11,
    G12,
    G21,
    G22,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::G11, Channel::G12, Channel::G21, Channel::G22];

    /// (output, input) indices, zero-based.
    pub fn indices(self) -> (usize, usize) {
        match self {
            Channel::G11 => (0, 0),
            Channel::G12 => (0, 1),
            Channel::G21 => (1, 0),
            Channel::G22 => (1, 1),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Channel::G11 => "G11",
            Channel::G12 => "G12",
            Channel::G21 => "G21",
            Channel::G22 => "G22",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("ill-conditioned steady-state gain{}: |den| = {den:e} at the DC point is below {threshold:e}", channel_suffix(.channel))]
    IllConditionedGain {
        channel: Option<Channel>,
        den: f64,
        threshold: f64,
    },
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(&'static str),
    #[error("gain matrix is singular (det = {det:e})")]
    SingularGainMatrix { det: f64 },
    #[error("ambiguous pairing: both relative gains are equally close to 1")]
    AmbiguousPairing,
    #[error(
        "response has not settled: tail variation {tail_variation:e} exceeds 5% of range {range:e}"
    )]
    NotSettled { tail_variation: f64, range: f64 },
    #[error("degenerate fit: response range {range:e} is below the noise floor")]
    DegenerateFit { range: f64 },
    #[error("plant is non-minimum-phase: zero with real part {real:e}")]
    NonMinimumPhase { real: f64 },
    #[error("plant is unstable: pole with real part {real:e}")]
    UnstablePlant { real: f64 },
    #[error("IMC controller would be improper: plant relative degree {relative_degree} exceeds filter order {order} by more than one")]
    ImproperResult { relative_degree: usize, order: u32 },
    #[error("plant gain is zero")]
    ZeroGainPlant,
    #[error("window [{start}, {end}] s is outside the signal span [0, {span}] s")]
    WindowOutOfRange { start: f64, end: f64, span: f64 },
    #[error("baseline index {0} is not positive")]
    ZeroBaselineIndex(&'static str),
    #[error("every sweep point is unstable")]
    AllUnstable,
    #[error("closed-loop run diverged at t = {time} s")]
    UnstableRun { time: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

fn channel_suffix(channel: &Option<Channel>) -> alloc::string::String {
    match channel {
        Some(c) => alloc::format!(" in {c}"),
        None => alloc::string::String::new(),
    }
}
