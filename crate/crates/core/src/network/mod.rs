//! The two-source, three-node swapping network: tripartite probabilities,
//! correlators, the bilocality parameter 𝓑₁₃ and the conditional CHSH value.

mod inequalities;
mod strategies;
mod sweep;
mod table;

pub use inequalities::{
    b13_closed_form, b13_from_table, bilocal_i, bilocal_j, bilocal_parameter, chsh_closed_form,
    chsh_from_table, correlator_from_table, BilocalResult, ChshResult,
};
pub use strategies::{deterministic_strategies, deterministic_strategy_max, DeterministicStrategy};
pub use sweep::{noise_sweep, threshold_visibility, SweepPoint, BISECTION_BRACKET, BISECTION_ITERATIONS};
pub use table::{
    block_keys, settings, OutcomeKey, ProbabilityTable, TableRecord, EXPERIMENTAL_NORM_TOL,
    MODEL_NORM_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::observables::{bsm_povm, BsmNoise, BsmOutcome, BsmPovm, SettingPair};
use crate::states::{four_photon_state, source_state, DensityMatrix, SourceNoise};

/// Which inequality a configuration's settings are chosen for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMode {
    Bilocality,
    Chsh,
}

/// Which bound a threshold or strategy search targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// 𝓑₁₃ ≤ 1.
    B13,
    /// S ≤ 2.
    Chsh,
}

impl Criterion {
    pub fn local_bound(self) -> f64 {
        match self {
            Criterion::B13 => 1.0,
            Criterion::Chsh => 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Source shared by Alice and Bob.
    pub source1: SourceNoise,
    /// Source shared by Bob and Charlie.
    pub source2: SourceNoise,
    pub bsm: BsmNoise,
    pub settings_a: SettingPair,
    pub settings_c: SettingPair,
    pub mode: TestMode,
}

impl NetworkConfig {
    pub fn new(source1: SourceNoise, source2: SourceNoise, bsm: BsmNoise, mode: TestMode) -> Self {
        let (settings_a, settings_c) = match mode {
            TestMode::Bilocality => (SettingPair::bilocal(), SettingPair::bilocal()),
            TestMode::Chsh => (SettingPair::chsh_alice(), SettingPair::chsh_charlie()),
        };
        Self {
            source1,
            source2,
            bsm,
            settings_a,
            settings_c,
            mode,
        }
    }

    pub fn ideal(mode: TestMode) -> Self {
        Self::new(SourceNoise::IDEAL, SourceNoise::IDEAL, BsmNoise::IDEAL, mode)
    }

    /// Identical sources with per-source weight `v` and colour fraction `lam`.
    pub fn symmetric(mode: TestMode, v: f64, lam: f64, p: f64) -> Result<Self> {
        let source = SourceNoise::new(v, lam)?;
        Ok(Self::new(source, source, BsmNoise::new(p)?, mode))
    }

    /// Identical sources whose product `v_A·v_C` equals the swapped visibility.
    pub fn from_swapped_visibility(mode: TestMode, swapped: f64, lam: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&swapped) {
            return Err(Error::InvalidParameter {
                name: "swapped visibility",
                value: swapped,
                reason: "must lie in [0, 1]",
            });
        }
        Self::symmetric(mode, swapped.sqrt(), lam, p)
    }

    pub fn validate(&self) -> Result<()> {
        self.source1.validate()?;
        self.source2.validate()?;
        BsmNoise::new(self.bsm.p)?;
        Ok(())
    }

    pub fn model(&self) -> Result<NetworkModel> {
        self.validate()?;
        NetworkModel::new(
            &source_state(self.source1)?,
            &source_state(self.source2)?,
            self.bsm,
            self.settings_a,
            self.settings_c,
        )
    }
}

/// A fully specified network: the four-photon state, Bob's POVM and the
/// local settings of Alice and Charlie.
#[derive(Clone, Debug)]
pub struct NetworkModel {
    rho: DensityMatrix,
    bsm: BsmNoise,
    povm: BsmPovm,
    settings_a: SettingPair,
    settings_c: SettingPair,
}

impl NetworkModel {
    pub const NEGATIVE_TOL: f64 = 1e-10;

    pub fn new(
        rho_ab: &DensityMatrix,
        rho_bc: &DensityMatrix,
        bsm: BsmNoise,
        settings_a: SettingPair,
        settings_c: SettingPair,
    ) -> Result<Self> {
        Ok(Self {
            rho: four_photon_state(rho_ab, rho_bc)?,
            povm: bsm_povm(bsm)?,
            bsm,
            settings_a,
            settings_c,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.rho
    }

    /// `Tr[(P_a^x ⊗ F_b ⊗ P_c^z) ρ]` with `F_b` acting on B, B′.
    pub fn joint_probability(&self, key: OutcomeKey) -> Result<f64> {
        let op = self
            .settings_a
            .get(key.x)
            .projector(key.a)
            .kron(self.povm.element(key.b))
            .kron(&self.settings_c.get(key.z).projector(key.c));
        let p = self.rho.expectation(&op)?;
        if p < -Self::NEGATIVE_TOL {
            return Err(Error::NegativeProbability(p));
        }
        Ok(p.clamp(0.0, 1.0))
    }

    /// `Tr[(A_x ⊗ B^y ⊗ C_z) ρ]`.
    pub fn correlator(&self, x: u8, y: u8, z: u8) -> Result<f64> {
        let bob: ComplexMatrix = BsmOutcome::ALL
            .iter()
            .map(|&b| self.povm.element(b).scale(b.sign(y)))
            .fold(ComplexMatrix::zeros(4, 4), |acc, m| &acc + &m);
        let op = self
            .settings_a
            .get(x)
            .operator()
            .kron(&bob)
            .kron(&self.settings_c.get(z).operator());
        self.rho.expectation(&op)
    }

    pub fn bsm_noise(&self) -> BsmNoise {
        self.bsm
    }

    /// Every `P(a, b, c | x, z)` of the model.
    pub fn probability_table(&self) -> Result<ProbabilityTable> {
        let mut t = ProbabilityTable::new();
        for key in OutcomeKey::all() {
            t.set(key, self.joint_probability(key)?)?;
        }
        Ok(t)
    }
}

pub fn joint_probability(
    cfg: &NetworkConfig,
    x: u8,
    z: u8,
    b: BsmOutcome,
    a: u8,
    c: u8,
) -> Result<f64> {
    cfg.model()?.joint_probability(OutcomeKey::new(x, z, b, a, c)?)
}

pub fn correlator(cfg: &NetworkConfig, x: u8, y: u8, z: u8) -> Result<f64> {
    cfg.model()?.correlator(x, y, z)
}

/// 𝓑₁₃ of a configuration through the probability table.
pub fn b13(cfg: &NetworkConfig) -> Result<BilocalResult> {
    b13_from_table(&cfg.model()?.probability_table()?)
}

/// Conditional CHSH value of a configuration with CHSH settings.
pub fn chsh_from_model(cfg: &NetworkConfig) -> Result<ChshResult> {
    if cfg.mode != TestMode::Chsh {
        return Err(Error::InvalidParameter {
            name: "mode",
            value: f64::NAN,
            reason: "CHSH evaluation needs a configuration with CHSH settings",
        });
    }
    chsh_from_table(&cfg.model()?.probability_table()?)
}
