//! Steady-state gain matrix, relative gain array and loop pairing for a 2x2
//! plant.

use alloc::string::{String, ToString};

use crate::error::{Channel, Error, Result};
use crate::lti::{DiscreteTF, Lti};

/// Relative gains outside this open interval are flagged as poor pairings.
pub const GOOD_PAIRING_RANGE: (f64, f64) = (0.0, 2.0);

/// A 2x2 plant; `channels[i][j]` maps input `j` to output `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoPlant2x2 {
    channels: [[Lti; 2]; 2],
    pub input_names: [String; 2],
    pub output_names: [String; 2],
}

impl MimoPlant2x2 {
    /// All four channels must share a domain and, if discrete, a sample time.
    pub fn new(g11: Lti, g12: Lti, g21: Lti, g22: Lti) -> Result<Self> {
        let chans = [&g11, &g12, &g21, &g22];
        let first = chans[0].ts();
        for c in &chans[1..] {
            match (first, c.ts()) {
                (None, None) => {}
                (Some(a), Some(b)) if (a - b).abs() <= 1e-12 * a => {}
                _ => {
                    return Err(Error::InvalidArgument(
                        "plant channels must share a domain and sample time",
                    ))
                }
            }
        }
        Ok(Self {
            channels: [[g11, g12], [g21, g22]],
            input_names: ["Av".to_string(), "N_comp".to_string()],
            output_names: ["Te_sec_out".to_string(), "Tsh".to_string()],
        })
    }

    pub fn channel(&self, c: Channel) -> &Lti {
        let (i, j) = c.indices();
        &self.channels[i][j]
    }

    pub fn ts(&self) -> Option<f64> {
        self.channels[0][0].ts()
    }

    pub fn discrete(&self, c: Channel) -> Result<DiscreteTF> {
        match self.channel(c) {
            Lti::Discrete(g) => Ok(g.clone()),
            Lti::Continuous(_) => Err(Error::InvalidArgument("channel is continuous")),
        }
    }

    /// Every channel at sample time `ts`, indexed `[output][input]`.
    pub fn at_sample_time(&self, ts: f64) -> Result<[[DiscreteTF; 2]; 2]> {
        let d = |c: &Lti| c.at_sample_time(ts);
        Ok([
            [d(&self.channels[0][0])?, d(&self.channels[0][1])?],
            [d(&self.channels[1][0])?, d(&self.channels[1][1])?],
        ])
    }
}

/// Steady-state gains `a[i][j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainMatrix(pub [[f64; 2]; 2]);

impl GainMatrix {
    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0.iter().flatten().map(|x| x * x).sum())
    }

    pub fn inverse(&self) -> Result<[[f64; 2]; 2]> {
        let det = self.det();
        if !(det.abs() > 1e-12 * self.norm() * self.norm()) {
            return Err(Error::SingularGainMatrix { det });
        }
        let a = &self.0;
        Ok([
            [a[1][1] / det, -a[0][1] / det],
            [-a[1][0] / det, a[0][0] / det],
        ])
    }
}

/// Relative gains `lambda[i][j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgaMatrix(pub [[f64; 2]; 2]);

impl RgaMatrix {
    pub fn row_sums(&self) -> [f64; 2] {
        [self.0[0][0] + self.0[0][1], self.0[1][0] + self.0[1][1]]
    }

    pub fn col_sums(&self) -> [f64; 2] {
        [self.0[0][0] + self.0[1][0], self.0[0][1] + self.0[1][1]]
    }
}

/// Recommended pairing: `input_for_output[i]` drives output `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pairing {
    pub input_for_output: [usize; 2],
    /// Set when a selected relative gain lies outside `GOOD_PAIRING_RANGE`.
    pub poor: bool,
}

impl Pairing {
    pub fn is_diagonal(&self) -> bool {
        self.input_for_output == [0, 1]
    }
}

/// DC gain of every channel; ill-conditioned channels are reported by name.
pub fn steady_state_matrix(plant: &MimoPlant2x2) -> Result<GainMatrix> {
    let mut a = [[0.0; 2]; 2];
    for c in Channel::ALL {
        let (i, j) = c.indices();
        a[i][j] = plant.channel(c).dc_gain().map_err(|e| match e {
            Error::IllConditionedGain { den, threshold, .. } => Error::IllConditionedGain {
                channel: Some(c),
                den,
                threshold,
            },
            other => other,
        })?;
    }
    Ok(GainMatrix(a))
}

/// `A o (A^-1)^T`.
pub fn rga(a: &GainMatrix) -> Result<RgaMatrix> {
    let inv = a.inverse()?;
    let mut l = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            l[i][j] = a.0[i][j] * inv[j][i];
        }
    }
    Ok(RgaMatrix(l))
}

/// Pairs each output with the input whose relative gain is closest to one.
///
/// For a 2x2 system the choice is all-or-nothing: diagonal when `lambda11` is
/// closer to one than `lambda12`, off-diagonal otherwise.
pub fn recommend_pairing(l: &RgaMatrix) -> Result<Pairing> {
    let diag = (l.0[0][0] - 1.0).abs();
    let off = (l.0[0][1] - 1.0).abs();
    if (diag - off).abs() <= 1e-12 * (1.0 + diag.max(off)) {
        return Err(Error::AmbiguousPairing);
    }
    let input_for_output = if diag < off { [0, 1] } else { [1, 0] };
    let (lo, hi) = GOOD_PAIRING_RANGE;
    let poor = (0..2).any(|i| {
        let v = l.0[i][input_for_output[i]];
        !(v > lo && v < hi)
    });
    Ok(Pairing {
        input_for_output,
        poor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::ContinuousTF;
    use crate::presets;

    fn static_plant(a: [[f64; 2]; 2]) -> MimoPlant2x2 {
        let g = |k| Lti::Continuous(ContinuousTF::gain(k));
        MimoPlant2x2::new(g(a[0][0]), g(a[0][1]), g(a[1][0]), g(a[1][1])).unwrap()
    }

    #[test]
    fn static_plant_gains() {
        let m = steady_state_matrix(&static_plant([[2.0, 0.0], [0.0, 3.0]])).unwrap();
        assert_eq!(m, GainMatrix([[2.0, 0.0], [0.0, 3.0]]));
    }

    #[test]
    fn identified_plant_gains_and_g22_failure() {
        let p = presets::identified_plant();
        match steady_state_matrix(&p) {
            Err(Error::IllConditionedGain { channel, .. }) => {
                assert_eq!(channel, Some(Channel::G22))
            }
            other => panic!("{other:?}"),
        }
        let a11 = p.channel(Channel::G11).dc_gain().unwrap();
        let a21 = p.channel(Channel::G21).dc_gain().unwrap();
        assert!((a11 + 0.016379).abs() < 1e-6);
        assert!((a21 + 0.25621).abs() < 1e-5);
    }

    #[test]
    fn diagonal_gives_identity() {
        let l = rga(&GainMatrix([[2.0, 0.0], [0.0, -5.0]])).unwrap();
        assert_eq!(l.0, [[1.0, 0.0], [0.0, 1.0]]);
        assert!(recommend_pairing(&l).unwrap().is_diagonal());
    }

    #[test]
    fn symmetric_case_is_ambiguous() {
        let l = rga(&GainMatrix([[1.0, 1.0], [1.0, -1.0]])).unwrap();
        for row in l.0 {
            for v in row {
                assert!((v - 0.5).abs() < 1e-15);
            }
        }
        assert_eq!(recommend_pairing(&l), Err(Error::AmbiguousPairing));
    }

    #[test]
    fn inverted_paper_rga() {
        // coupling product chosen so that lambda11 = 1/(1 - 3.9984e-4)
        let (a11, a22) = (-0.016, 0.16);
        let a12 = 1e-3;
        let a21 = 3.9984e-4 * a11 * a22 / a12;
        let l = rga(&GainMatrix([[a11, a12], [a21, a22]])).unwrap();
        assert!((l.0[0][0] - 1.0004).abs() < 1e-6);
        assert!((l.0[0][1] + 0.0004).abs() < 1e-6);
        let p = recommend_pairing(&l).unwrap();
        assert!(p.is_diagonal());
        assert!(!p.poor);
    }

    #[test]
    fn singular_matrix_rejected() {
        assert!(matches!(
            rga(&GainMatrix([[1.0, 2.0], [2.0, 4.0]])),
            Err(Error::SingularGainMatrix { .. })
        ));
    }

    #[test]
    fn off_diagonal_and_poor_flags() {
        let l = RgaMatrix([[0.07, 0.93], [0.93, 0.07]]);
        let p = recommend_pairing(&l).unwrap();
        assert_eq!(p.input_for_output, [1, 0]);
        assert!(!p.poor);
        let l = RgaMatrix([[3.0, -2.0], [-2.0, 3.0]]);
        let p = recommend_pairing(&l).unwrap();
        assert!(p.is_diagonal());
        assert!(p.poor);
    }

    #[test]
    fn mixed_domains_rejected() {
        let c = Lti::Continuous(ContinuousTF::gain(1.0));
        let d = Lti::Discrete(DiscreteTF::gain(1.0, 1.0).unwrap());
        assert!(MimoPlant2x2::new(c.clone(), c.clone(), c, d).is_err());
    }
}
