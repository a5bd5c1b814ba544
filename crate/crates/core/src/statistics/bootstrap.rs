//! Parametric-bootstrap error bars for statistics of a probability table.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{b13_from_table, block_keys, chsh_from_table, settings, ProbabilityTable};

pub const MIN_RESAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub sigma: f64,
}

impl EstimateWithError {
    pub fn new(value: f64, sigma: f64) -> Self {
        assert!(sigma >= 0.0, "negative sigma");
        Self { value, sigma }
    }
}

/// Value of `statistic` on `t`, with sigma taken as the sample standard
/// deviation over `n_boot` resampled tables.
///
/// Each resample perturbs every present entry by independent Gaussian noise
/// of its own sigma (missing sigmas count as zero), clamps at zero and
/// rescales each setting block back to its original total.
pub fn parametric_bootstrap<F>(
    t: &ProbabilityTable,
    n_boot: usize,
    seed: u64,
    statistic: F,
) -> Result<EstimateWithError>
where
    F: Fn(&ProbabilityTable) -> Result<f64>,
{
    if n_boot < MIN_RESAMPLES {
        return Err(Error::InvalidParameter {
            name: "n_boot",
            value: n_boot as f64,
            reason: "at least 100 resamples are required",
        });
    }
    let value = statistic(t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n_boot);
    for _ in 0..n_boot {
        let mut resampled = t.clone();
        for (x, z) in settings() {
            let target = t.block_sum(x, z);
            let mut perturbed = Vec::with_capacity(12);
            for key in block_keys(x, z) {
                let Ok(p) = t.get(key) else { continue };
                let sigma = t.sigma(key).unwrap_or(0.0);
                let noise: f64 = StandardNormal.sample(&mut rng);
                perturbed.push((key, (p + sigma * noise).max(0.0)));
            }
            let sum: f64 = perturbed.iter().map(|(_, p)| p).sum();
            let scale = if sum > 0.0 { target / sum } else { 1.0 };
            for (key, p) in perturbed {
                let p = if scale == 1.0 { p } else { p * scale };
                resampled.set(key, p)?;
            }
        }
        samples.push(statistic(&resampled)?);
    }
    // Welford: exact zero spread when every resample agrees.
    let (mut mean, mut m2) = (0.0, 0.0);
    for (k, s) in samples.iter().enumerate() {
        let delta = s - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (s - mean);
    }
    let var = m2 / (n_boot - 1) as f64;
    Ok(EstimateWithError::new(value, var.max(0.0).sqrt()))
}

pub fn b13_with_error(t: &ProbabilityTable, n_boot: usize, seed: u64) -> Result<EstimateWithError> {
    parametric_bootstrap(t, n_boot, seed, |t| Ok(b13_from_table(t)?.b13))
}

pub fn chsh_with_error(t: &ProbabilityTable, n_boot: usize, seed: u64) -> Result<EstimateWithError> {
    parametric_bootstrap(t, n_boot, seed, |t| Ok(chsh_from_table(t)?.s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{NetworkConfig, OutcomeKey, TestMode};

    fn model_table(sigma: f64) -> ProbabilityTable {
        let cfg = NetworkConfig::symmetric(TestMode::Bilocality, 0.95, 0.1, 0.9).unwrap();
        let mut t = cfg.model().unwrap().probability_table().unwrap();
        for k in OutcomeKey::all() {
            t.set_sigma(k, sigma).unwrap();
        }
        t
    }

    #[test]
    fn zero_sigmas_give_zero_error() {
        let t = model_table(0.0);
        let est = b13_with_error(&t, 200, 1).unwrap();
        assert_eq!(est.sigma, 0.0);
        assert_eq!(est.value, b13_from_table(&t).unwrap().b13);
    }

    #[test]
    fn too_few_resamples_rejected() {
        assert!(b13_with_error(&model_table(0.001), 99, 1).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let t = model_table(0.002);
        assert_eq!(b13_with_error(&t, 300, 9).unwrap(), b13_with_error(&t, 300, 9).unwrap());
    }

    #[test]
    fn sigma_scales_linearly_with_input_errors() {
        let s1 = b13_with_error(&model_table(0.001), 2000, 4).unwrap().sigma;
        let s2 = b13_with_error(&model_table(0.002), 2000, 4).unwrap().sigma;
        let ratio = s2 / s1;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }
}
