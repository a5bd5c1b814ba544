//! Local measurement settings and the three-outcome Bell-state measurement.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::{bell_projector, check_unit, BellKind};

/// A ±1-valued qubit observable `n·σ` given by its unit Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    bloch: [f64; 3],
}

impl MeasurementSetting {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(bloch: [f64; 3]) -> Result<Self> {
        let norm = bloch.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidParameter {
                name: "|bloch|",
                value: norm,
                reason: "measurement direction must be a unit vector",
            });
        }
        Ok(Self { bloch })
    }

    /// Setting in the x–z plane at angle `theta` from +z toward +x.
    pub fn in_xz_plane(theta: f64) -> Self {
        Self {
            bloch: [theta.sin(), 0.0, theta.cos()],
        }
    }

    pub fn sigma_z() -> Self {
        Self {
            bloch: [0.0, 0.0, 1.0],
        }
    }

    pub fn sigma_x() -> Self {
        Self {
            bloch: [1.0, 0.0, 0.0],
        }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    /// `n·σ`.
    pub fn operator(&self) -> ComplexMatrix {
        let [nx, ny, nz] = self.bloch;
        let x = ComplexMatrix::pauli_x().scale(nx);
        let y = ComplexMatrix::pauli_y().scale(ny);
        let z = ComplexMatrix::pauli_z().scale(nz);
        &(&x + &y) + &z
    }

    /// Projector onto outcome `0` (eigenvalue +1) or `1` (eigenvalue −1).
    pub fn projector(&self, outcome: u8) -> ComplexMatrix {
        assert!(outcome < 2, "measurement outcomes are bits");
        let sign = if outcome == 0 { 0.5 } else { -0.5 };
        &ComplexMatrix::identity(2).scale(0.5) + &self.operator().scale(sign)
    }
}

pub fn setting_operator(s: &MeasurementSetting) -> ComplexMatrix {
    s.operator()
}

pub fn projector(s: &MeasurementSetting, outcome: u8) -> ComplexMatrix {
    s.projector(outcome)
}

/// The two settings of one party, indexed by the input bit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingPair(pub [MeasurementSetting; 2]);

impl SettingPair {
    /// Alice's and Charlie's settings for the bilocality test:
    /// `(√2 σ_z ± σ_x)/√3`.
    pub fn bilocal() -> Self {
        let (x, z) = ((1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt());
        SettingPair([
            MeasurementSetting { bloch: [x, 0.0, z] },
            MeasurementSetting { bloch: [-x, 0.0, z] },
        ])
    }

    /// Alice's settings for the conditional CHSH test: σ_z, σ_x.
    pub fn chsh_alice() -> Self {
        SettingPair([MeasurementSetting::sigma_z(), MeasurementSetting::sigma_x()])
    }

    /// Charlie's settings for the conditional CHSH test: `(σ_z ± σ_x)/√2`.
    pub fn chsh_charlie() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        SettingPair([
            MeasurementSetting { bloch: [s, 0.0, s] },
            MeasurementSetting { bloch: [-s, 0.0, s] },
        ])
    }

    pub fn get(&self, input: u8) -> &MeasurementSetting {
        &self.0[input as usize]
    }
}

/// Bob's coarse-grained Bell-state-measurement outcome.
///
/// `PhiGroup` is the merged "10 or 11" outcome and is never split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BsmOutcome {
    PsiPlus00,
    PsiMinus01,
    PhiGroup,
}

impl BsmOutcome {
    pub const ALL: [BsmOutcome; 3] = [
        BsmOutcome::PsiPlus00,
        BsmOutcome::PsiMinus01,
        BsmOutcome::PhiGroup,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            BsmOutcome::PsiPlus00 => "00",
            BsmOutcome::PsiMinus01 => "01",
            BsmOutcome::PhiGroup => "10or11",
        }
    }

    /// Weight of this outcome in Bob's ±1 observable `B^y`.
    ///
    /// `y = 0` reads the first output bit (Ψ outcomes +1, Φ group −1);
    /// `y = 1` reads the second bit, which the Φ group does not resolve.
    pub fn sign(self, y: u8) -> f64 {
        match (y, self) {
            (0, BsmOutcome::PhiGroup) => -1.0,
            (0, _) => 1.0,
            (1, BsmOutcome::PsiPlus00) => 1.0,
            (1, BsmOutcome::PsiMinus01) => -1.0,
            (1, BsmOutcome::PhiGroup) => 0.0,
            _ => panic!("Bob's observable index must be 0 or 1"),
        }
    }
}

impl fmt::Display for BsmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BsmOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(BsmOutcome::PsiPlus00),
            "01" => Ok(BsmOutcome::PsiMinus01),
            "10or11" | "10 or 11" | "10" | "11" => Ok(BsmOutcome::PhiGroup),
            other => Err(Error::Parse(format!("unknown BSM outcome {other:?}"))),
        }
    }
}

impl Serialize for BsmOutcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for BsmOutcome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Two-photon indistinguishability at the BSM: 1 for perfect interference,
/// 0 for fully distinguishable photons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsmNoise {
    pub p: f64,
}

impl BsmNoise {
    pub const IDEAL: BsmNoise = BsmNoise { p: 1.0 };

    pub fn new(p: f64) -> Result<Self> {
        check_unit("p", p)?;
        Ok(Self { p })
    }
}

/// POVM `{F₁, F₂, F₃}` of the imperfect Bell-state measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct BsmPovm {
    /// Ψ⁻-dominant element.
    pub f1: ComplexMatrix,
    /// Ψ⁺-dominant element.
    pub f2: ComplexMatrix,
    /// Φ⁺ + Φ⁻.
    pub f3: ComplexMatrix,
}

impl BsmPovm {
    pub fn element(&self, outcome: BsmOutcome) -> &ComplexMatrix {
        match outcome {
            BsmOutcome::PsiPlus00 => &self.f2,
            BsmOutcome::PsiMinus01 => &self.f1,
            BsmOutcome::PhiGroup => &self.f3,
        }
    }
}

pub fn bsm_povm(noise: BsmNoise) -> Result<BsmPovm> {
    check_unit("p", noise.p)?;
    let p = noise.p;
    let psi_p = bell_projector(BellKind::PsiPlus);
    let psi_m = bell_projector(BellKind::PsiMinus);
    let hi = (1.0 + p) / 2.0;
    let lo = (1.0 - p) / 2.0;
    Ok(BsmPovm {
        f1: &psi_m.scale(hi) + &psi_p.scale(lo),
        f2: &psi_p.scale(hi) + &psi_m.scale(lo),
        f3: &bell_projector(BellKind::PhiPlus) + &bell_projector(BellKind::PhiMinus),
    })
}

/// `B^y = a₁F₁ + a₂F₂ + a₃F₃` with `a₁ = 1 − 2y`, `a₂ = 1`, `a₃ = y − 1`.
pub fn bsm_operator(y: u8, noise: BsmNoise) -> Result<ComplexMatrix> {
    assert!(y < 2, "Bob's observable index must be 0 or 1");
    let povm = bsm_povm(noise)?;
    let y = y as f64;
    let (a1, a2, a3) = (1.0 - 2.0 * y, 1.0, y - 1.0);
    Ok(&(&povm.f1.scale(a1) + &povm.f2.scale(a2)) + &povm.f3.scale(a3))
}
