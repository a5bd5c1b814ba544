//! Correlators, I, J, 𝓑₁₃ and the conditional CHSH value, both from
//! probability tables and in closed form.

use serde::Serialize;

use super::table::{settings, OutcomeKey, ProbabilityTable};
use crate::error::{Error, Result};
use crate::observables::BsmOutcome;

fn parity(bits: u8) -> f64 {
    if bits.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `Σ_{a,b,c} (−1)^{a+c} s_y(b) P(a, b, c | x, z)`, where `s_y(b)` is Bob's
/// outcome sign for observable `y`. For `y = 1` the Φ group has weight 0 and
/// its entries are not read.
pub fn correlator_from_table(t: &ProbabilityTable, x: u8, y: u8, z: u8) -> Result<f64> {
    let mut acc = 0.0;
    for b in BsmOutcome::ALL {
        let sign_b = b.sign(y);
        if sign_b == 0.0 {
            continue;
        }
        for a in 0..2 {
            for c in 0..2 {
                acc += parity(a + c) * sign_b * t.get(OutcomeKey::new(x, z, b, a, c)?)?;
            }
        }
    }
    Ok(acc)
}

/// `I = ¼ Σ_{x,z} ⟨A_x B⁰ C_z⟩`, correlators indexed `2x + z`.
pub fn bilocal_i(correlators: &[f64; 4]) -> f64 {
    correlators.iter().sum::<f64>() / 4.0
}

/// `J = ¼ Σ_{x,z} (−1)^{x+z} ⟨A_x B¹ C_z⟩`, correlators indexed `2x + z`.
pub fn bilocal_j(correlators: &[f64; 4]) -> f64 {
    settings()
        .zip(correlators)
        .map(|((x, z), v)| parity(x + z) * v)
        .sum::<f64>()
        / 4.0
}

/// `𝓑₁₃ = √|I| + √|J|`.
pub fn bilocal_parameter(i: f64, j: f64) -> f64 {
    i.abs().sqrt() + j.abs().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BilocalResult {
    /// `⟨A_x B⁰ C_z⟩`, indexed `2x + z`.
    pub correlators_b0: [f64; 4],
    /// `⟨A_x B¹ C_z⟩`, indexed `2x + z`.
    pub correlators_b1: [f64; 4],
    pub i: f64,
    pub j: f64,
    pub b13: f64,
}

pub fn b13_from_table(t: &ProbabilityTable) -> Result<BilocalResult> {
    let mut b0 = [0.0; 4];
    let mut b1 = [0.0; 4];
    for (k, (x, z)) in settings().enumerate() {
        b0[k] = correlator_from_table(t, x, 0, z)?;
        b1[k] = correlator_from_table(t, x, 1, z)?;
    }
    let (i, j) = (bilocal_i(&b0), bilocal_j(&b1));
    Ok(BilocalResult {
        correlators_b0: b0,
        correlators_b1: b1,
        i,
        j,
        b13: bilocal_parameter(i, j),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChshResult {
    /// `⟨A_x C_z⟩` conditioned on Bob's Ψ⁻ outcome, indexed `2x + z`.
    pub correlators: [f64; 4],
    /// Probability of the Ψ⁻ outcome in each setting block.
    pub success_probability: [f64; 4],
    pub s: f64,
}

/// CHSH value of Alice and Charlie conditioned on Bob's Ψ⁻ outcome.
pub fn chsh_from_table(t: &ProbabilityTable) -> Result<ChshResult> {
    let mut correlators = [0.0; 4];
    let mut success = [0.0; 4];
    for (k, (x, z)) in settings().enumerate() {
        let mut num = 0.0;
        let mut den = 0.0;
        for a in 0..2 {
            for c in 0..2 {
                let p = t.get(OutcomeKey::new(x, z, BsmOutcome::PsiMinus01, a, c)?)?;
                num += parity(a + c) * p;
                den += p;
            }
        }
        if den <= 0.0 {
            return Err(Error::ZeroSuccessProbability);
        }
        correlators[k] = num / den;
        success[k] = den;
    }
    let [e00, e01, e10, e11] = correlators;
    Ok(ChshResult {
        correlators,
        success_probability: success,
        s: (e00 + e01 + e10 - e11).abs(),
    })
}

/// ZZ correlation `v(1 − λ) + λ` of one source.
fn zz(v: f64, lam: f64) -> f64 {
    v * (1.0 - lam) + lam
}

/// `𝓑₁₃ = √|2 g_A g_C| / √3 + √(p v_A v_C) / √6` with `g = v(1 − λ) + λ`.
pub fn b13_closed_form(p: f64, v_a: f64, lam_a: f64, v_c: f64, lam_c: f64) -> f64 {
    (2.0 * zz(v_a, lam_a) * zz(v_c, lam_c)).abs().sqrt() / 3f64.sqrt()
        + (p * v_a * v_c).sqrt() / 6f64.sqrt()
}

/// `S = √2 (p v_A v_C + |(v_A(λ_A − 1) − λ_A)(v_C(λ_C − 1) − λ_C)|)`.
pub fn chsh_closed_form(p: f64, v_a: f64, lam_a: f64, v_c: f64, lam_c: f64) -> f64 {
    let fa = v_a * (-1.0 + lam_a) - lam_a;
    let fc = v_c * (-1.0 + lam_c) - lam_c;
    2f64.sqrt() * (p * v_a * v_c + (fa * fc).abs())
}
