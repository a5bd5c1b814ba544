//! Small experimental estimators: interference visibility, BSM noise
//! parameter, basis-choice fidelity and multi-pair HOM bounds.

use crate::error::{Error, Result};

/// `(C_max − C_min) / (C_max + C_min)`.
pub fn visibility_estimate(c_max: u64, c_min: u64) -> Result<f64> {
    let total = c_max + c_min;
    if total == 0 {
        return Err(Error::InvalidParameter {
            name: "C_max + C_min",
            value: 0.0,
            reason: "visibility needs at least one count",
        });
    }
    Ok((c_max as f64 - c_min as f64) / total as f64)
}

/// `p = (C_D − C(d)) / C_D` from the coincidences at delay `d` and at full
/// distinguishability.
pub fn noise_parameter(c_delay: f64, c_dist: f64) -> Result<f64> {
    if c_dist <= 0.0 || !c_dist.is_finite() {
        return Err(Error::InvalidParameter {
            name: "C_D",
            value: c_dist,
            reason: "distinguishable-photon coincidences must be positive",
        });
    }
    Ok((c_dist - c_delay) / c_dist)
}

/// `F_m = C_r / (C_r + C_w)`.
pub fn qrng_basis_fidelity(c_right: u64, c_wrong: u64) -> Result<f64> {
    let total = c_right + c_wrong;
    if total == 0 {
        return Err(Error::InvalidParameter {
            name: "C_r + C_w",
            value: 0.0,
            reason: "fidelity needs at least one count",
        });
    }
    Ok(c_right as f64 / total as f64)
}

/// Werner visibility `(4F − 1)/3` from the Bell-state fidelity.
pub fn fidelity_to_visibility(fidelity: f64) -> Result<f64> {
    if !(0.25..=1.0).contains(&fidelity) {
        return Err(Error::InvalidParameter {
            name: "F",
            value: fidelity,
            reason: "fidelity must lie in [1/4, 1]",
        });
    }
    Ok((4.0 * fidelity - 1.0) / 3.0)
}

/// Upper bound on the HOM visibility from multi-pair emission at mean pair
/// number `mu`: `(1 + 8μ)/(1 + 12μ)`, or `(1 + 4μ)/(1 + 6μ)` when events
/// with extra detector clicks are discarded.
pub fn hom_visibility_bound(mu: f64, discard_multi_clicks: bool) -> Result<f64> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "mean pair number must be non-negative",
        });
    }
    Ok(if discard_multi_clicks {
        (1.0 + 4.0 * mu) / (1.0 + 6.0 * mu)
    } else {
        (1.0 + 8.0 * mu) / (1.0 + 12.0 * mu)
    })
}
