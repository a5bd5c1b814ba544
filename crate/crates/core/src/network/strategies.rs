//! Exhaustive search over deterministic local strategies.
//!
//! A deterministic bilocal strategy fixes Alice's response `a(x)`, Charlie's
//! response `c(z)` and Bob's two-bit output `b₀b₁` (Bob has no input). Every
//! bilocal model is a mixture of these, so their maximum bounds 𝓑₁₃ and S.

use super::inequalities::{b13_from_table, chsh_from_table};
use super::table::{settings, ProbabilityTable};
use super::Criterion;
use crate::error::Error;
use crate::observables::BsmOutcome;

/// The four functions `{0,1} → {0,1}`: constant 0, constant 1, identity, negation.
const RESPONSES: [[u8; 2]; 4] = [[0, 0], [1, 1], [0, 1], [1, 0]];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub alice: [u8; 2],
    pub charlie: [u8; 2],
    /// Bob's raw output `b₀b₁` in `0..4`.
    pub bob: u8,
}

impl DeterministicStrategy {
    pub fn bsm_outcome(&self) -> BsmOutcome {
        match self.bob {
            0b00 => BsmOutcome::PsiPlus00,
            0b01 => BsmOutcome::PsiMinus01,
            _ => BsmOutcome::PhiGroup,
        }
    }

    /// Point-mass probability table of this strategy.
    pub fn table(&self) -> ProbabilityTable {
        let mut t = ProbabilityTable::new();
        let b = self.bsm_outcome();
        for (x, z) in settings() {
            for key in super::table::block_keys(x, z) {
                let hit = key.b == b
                    && key.a == self.alice[x as usize]
                    && key.c == self.charlie[z as usize];
                t.set(key, if hit { 1.0 } else { 0.0 }).expect("0 or 1");
            }
        }
        t
    }
}

/// All 4 × 4 × 4 = 64 deterministic strategies.
pub fn deterministic_strategies() -> impl Iterator<Item = DeterministicStrategy> {
    RESPONSES.into_iter().flat_map(|alice| {
        RESPONSES.into_iter().flat_map(move |charlie| {
            (0..4u8).map(move |bob| DeterministicStrategy { alice, charlie, bob })
        })
    })
}

/// Largest 𝓑₁₃ or conditional S reached by any deterministic strategy.
///
/// For S, strategies whose Bob never outputs Ψ⁻ leave the conditional
/// correlators undefined and are skipped.
pub fn deterministic_strategy_max(objective: Criterion) -> f64 {
    deterministic_strategies()
        .filter_map(|s| {
            let t = s.table();
            match objective {
                Criterion::B13 => Some(b13_from_table(&t).expect("complete table").b13),
                Criterion::Chsh => match chsh_from_table(&t) {
                    Ok(r) => Some(r.s),
                    Err(Error::ZeroSuccessProbability) => None,
                    Err(e) => panic!("complete table: {e}"),
                },
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
