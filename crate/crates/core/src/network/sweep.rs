//! Noise sweeps over the BSM indistinguishability and visibility thresholds.

use serde::Serialize;

use super::inequalities::{b13_closed_form, b13_from_table, chsh_closed_form, chsh_from_table};
use super::{Criterion, NetworkConfig, TestMode};
use crate::error::Result;

/// Search interval for the swapped visibility.
pub const BISECTION_BRACKET: (f64, f64) = (0.01, 1.0);
pub const BISECTION_ITERATIONS: usize = 60;

/// Band of 𝓑₁₃ and S at one value of `p`, between the white-noise (`lam_low`)
/// and coloured-noise (`lam_high`) limits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub p: f64,
    pub b13_low: f64,
    pub b13_high: f64,
    pub s_low: f64,
    pub s_high: f64,
}

/// Closed-form bands for each `p` in `p_grid`, with identical sources of
/// per-source weight `√v` (`v` is the swapped visibility).
pub fn noise_sweep(p_grid: &[f64], v: f64, lam_low: f64, lam_high: f64) -> Vec<SweepPoint> {
    let vs = v.sqrt();
    p_grid
        .iter()
        .map(|&p| SweepPoint {
            p,
            b13_low: b13_closed_form(p, vs, lam_low, vs, lam_low),
            b13_high: b13_closed_form(p, vs, lam_high, vs, lam_high),
            s_low: chsh_closed_form(p, vs, lam_low, vs, lam_low),
            s_high: chsh_closed_form(p, vs, lam_high, vs, lam_high),
        })
        .collect()
}

fn criterion_at(which: Criterion, swapped: f64) -> Result<f64> {
    match which {
        Criterion::B13 => {
            let cfg = NetworkConfig::from_swapped_visibility(TestMode::Bilocality, swapped, 0.0, 1.0)?;
            Ok(b13_from_table(&cfg.model()?.probability_table()?)?.b13)
        }
        Criterion::Chsh => {
            let cfg = NetworkConfig::from_swapped_visibility(TestMode::Chsh, swapped, 0.0, 1.0)?;
            Ok(chsh_from_table(&cfg.model()?.probability_table()?)?.s)
        }
    }
}

/// Smallest swapped visibility of white-noise sources (perfect BSM) at which
/// the quantum value reaches the local bound, found by bisection on the
/// density-matrix model.
pub fn threshold_visibility(which: Criterion) -> Result<f64> {
    let bound = which.local_bound();
    let (mut lo, mut hi) = BISECTION_BRACKET;
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if criterion_at(which, mid)? > bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bands_at_full_indistinguishability() {
        let pt = noise_sweep(&[1.0], 0.93, 0.0, 1.0)[0];
        assert_abs_diff_eq!(pt.b13_low, 1.1811, epsilon = 1e-4);
        assert_abs_diff_eq!(pt.b13_high, 1.2102, epsilon = 1e-4);
        assert_abs_diff_eq!(pt.s_low, 2.6304, epsilon = 1e-4);
        assert_abs_diff_eq!(pt.s_high, 2.7294, epsilon = 1e-4);
    }

    #[test]
    fn s_band_floor_at_distinguishable_photons() {
        let pt = noise_sweep(&[0.0], 0.93, 0.0, 1.0)[0];
        assert_abs_diff_eq!(pt.s_low, 2f64.sqrt() * 0.93, epsilon = 1e-12);
    }

    #[test]
    fn thresholds() {
        let b = threshold_visibility(Criterion::B13).unwrap();
        assert_abs_diff_eq!(b, 2.0 / 3.0, epsilon = 1e-6);
        assert!(criterion_at(Criterion::B13, 2.0 / 3.0 + 0.01).unwrap() > 1.0);
        let s = threshold_visibility(Criterion::Chsh).unwrap();
        assert_abs_diff_eq!(s, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-6);
    }
}
