//! Coincidence-count tables: Monte Carlo emulation and conversion to
//! probabilities with Poisson error bars.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{block_keys, settings, NetworkConfig, OutcomeKey, ProbabilityTable, TestMode};
use crate::observables::BsmOutcome;

/// Trials per independently seeded shard. Fixed so that the sampled counts do
/// not depend on how many worker threads run the shards.
pub const SHARD_SIZE: u64 = 1 << 16;

fn block_index(x: u8, z: u8) -> usize {
    x as usize * 2 + z as usize
}

/// Counts per outcome and trials per setting block.
#[derive(Clone, Debug, PartialEq)]
pub struct CountsTable {
    counts: BTreeMap<OutcomeKey, u64>,
    trials: [u64; 4],
    mode: Option<TestMode>,
}

impl CountsTable {
    pub fn new(trials: [u64; 4]) -> Self {
        Self {
            counts: BTreeMap::new(),
            trials,
            mode: None,
        }
    }

    pub fn with_mode(mut self, mode: TestMode) -> Self {
        self.mode = Some(mode);
        self
    }

    pub fn mode(&self) -> Option<TestMode> {
        self.mode
    }

    pub fn trials(&self, x: u8, z: u8) -> u64 {
        self.trials[block_index(x, z)]
    }

    pub fn count(&self, key: OutcomeKey) -> u64 {
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn block_total(&self, x: u8, z: u8) -> u64 {
        block_keys(x, z).map(|k| self.count(k)).sum()
    }

    /// Sets a count, keeping the block total within the recorded trials.
    pub fn set(&mut self, key: OutcomeKey, n: u64) -> Result<()> {
        let others = self.block_total(key.x, key.z) - self.count(key);
        if others + n > self.trials(key.x, key.z) {
            return Err(Error::InvalidTable(format!(
                "counts in block x={} z={} exceed {} trials",
                key.x,
                key.z,
                self.trials(key.x, key.z)
            )));
        }
        self.counts.insert(key, n);
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CountsDocument = serde_json::from_str(text)?;
        let mut trials = [0u64; 4];
        for (label, n) in &doc.trials {
            let (x, z) = parse_block_label(label)?;
            trials[block_index(x, z)] = *n;
        }
        let mut table = Self::new(trials);
        table.mode = doc.mode;
        for r in &doc.counts {
            let key = OutcomeKey::new(r.x, r.z, r.b, r.a, r.c)?;
            if table.counts.contains_key(&key) {
                return Err(Error::InvalidTable(format!("duplicate count {key:?}")));
            }
            table.set(key, r.n)?;
        }
        Ok(table)
    }

    /// JSON `{trials: {"x,z": n}, counts: [{x, z, b, a, c, n}]}`, in a fixed
    /// key order so equal tables serialize to identical bytes.
    pub fn to_json(&self) -> String {
        let trials = settings()
            .map(|(x, z)| (format!("{x},{z}"), self.trials(x, z)))
            .collect();
        let counts = OutcomeKey::all()
            .map(|k| CountRecord {
                x: k.x,
                z: k.z,
                b: k.b,
                a: k.a,
                c: k.c,
                n: self.count(k),
            })
            .collect();
        let doc = CountsDocument {
            trials,
            counts,
            mode: self.mode,
        };
        serde_json::to_string_pretty(&doc).expect("counts serialize")
    }
}

fn parse_block_label(label: &str) -> Result<(u8, u8)> {
    let bad = || Error::Parse(format!("trial block label {label:?} is not \"x,z\""));
    let (x, z) = label.split_once(',').ok_or_else(bad)?;
    let x: u8 = x.trim().parse().map_err(|_| bad())?;
    let z: u8 = z.trim().parse().map_err(|_| bad())?;
    if x > 1 || z > 1 {
        return Err(bad());
    }
    Ok((x, z))
}

#[derive(Serialize, Deserialize)]
struct CountsDocument {
    trials: BTreeMap<String, u64>,
    counts: Vec<CountRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<TestMode>,
}

#[derive(Serialize, Deserialize)]
struct CountRecord {
    x: u8,
    z: u8,
    b: BsmOutcome,
    a: u8,
    c: u8,
    n: u64,
}

/// Derived RNG stream for one shard of one setting block.
fn shard_rng(seed: u64, block: usize, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((block as u64) << 32) | shard);
    rng
}

fn draw_shard(cumulative: &[f64; 12], rng: &mut ChaCha8Rng, n: u64) -> [u64; 12] {
    let total = cumulative[11];
    let mut out = [0u64; 12];
    for _ in 0..n {
        let u = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(11);
        out[idx] += 1;
    }
    out
}

/// Emulates `n_trials` runs per setting block, drawing `(b, a, c)` from the
/// model distribution. Identical for a given seed regardless of thread count.
pub fn sample_counts(cfg: &NetworkConfig, n_trials: u64, seed: u64) -> Result<CountsTable> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter {
            name: "n_trials",
            value: 0.0,
            reason: "at least one trial per setting is required",
        });
    }
    let table = cfg.model()?.probability_table()?;
    let mut cumulative = [[0.0f64; 12]; 4];
    for (x, z) in settings() {
        let mut acc = 0.0;
        for (i, key) in block_keys(x, z).enumerate() {
            acc += table.get(key)?;
            cumulative[block_index(x, z)][i] = acc;
        }
    }

    let shards = n_trials.div_ceil(SHARD_SIZE);
    let jobs: Vec<(usize, u64)> = (0..4)
        .flat_map(|block| (0..shards).map(move |s| (block, s)))
        .collect();
    let per_job: Vec<(usize, [u64; 12])> = jobs
        .into_par_iter()
        .map(|(block, shard)| {
            let len = SHARD_SIZE.min(n_trials - shard * SHARD_SIZE);
            let mut rng = shard_rng(seed, block, shard);
            (block, draw_shard(&cumulative[block], &mut rng, len))
        })
        .collect();

    let mut sums = [[0u64; 12]; 4];
    for (block, counts) in per_job {
        for (s, c) in sums[block].iter_mut().zip(counts) {
            *s += c;
        }
    }

    let mut out = CountsTable::new([n_trials; 4]).with_mode(cfg.mode);
    for (x, z) in settings() {
        for (i, key) in block_keys(x, z).enumerate() {
            out.set(key, sums[block_index(x, z)][i])?;
        }
    }
    Ok(out)
}

/// Frequencies `n / trials` with Poisson sigma `√n / trials`; a zero count
/// gets sigma `1 / trials`.
pub fn counts_to_table(counts: &CountsTable) -> Result<ProbabilityTable> {
    let mut t = ProbabilityTable::new();
    for (x, z) in settings() {
        let total = counts.trials(x, z);
        if total == 0 {
            return Err(Error::EmptyBlock { x, z });
        }
        let total = total as f64;
        for key in block_keys(x, z) {
            let n = counts.count(key);
            t.set(key, n as f64 / total)?;
            let sigma = if n == 0 { 1.0 / total } else { (n as f64).sqrt() / total };
            t.set_sigma(key, sigma)?;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::b13_from_table;
    use approx::assert_abs_diff_eq;

    fn key(x: u8, z: u8, b: BsmOutcome, a: u8, c: u8) -> OutcomeKey {
        OutcomeKey::new(x, z, b, a, c).unwrap()
    }

    #[test]
    fn poisson_sigmas() {
        let mut c = CountsTable::new([10_000; 4]);
        c.set(key(0, 0, BsmOutcome::PsiPlus00, 0, 0), 100).unwrap();
        let t = counts_to_table(&c).unwrap();
        let k = key(0, 0, BsmOutcome::PsiPlus00, 0, 0);
        assert_abs_diff_eq!(t.get(k).unwrap(), 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(t.sigma(k).unwrap(), 0.001, epsilon = 1e-15);
        let empty = key(0, 0, BsmOutcome::PhiGroup, 1, 1);
        assert_eq!(t.get(empty).unwrap(), 0.0);
        assert_abs_diff_eq!(t.sigma(empty).unwrap(), 1e-4, epsilon = 1e-18);
    }

    #[test]
    fn empty_block_is_an_error() {
        let c = CountsTable::new([10, 10, 0, 10]);
        assert!(matches!(counts_to_table(&c), Err(Error::EmptyBlock { x: 1, z: 0 })));
    }

    #[test]
    fn counts_cannot_exceed_trials() {
        let mut c = CountsTable::new([10; 4]);
        c.set(key(0, 1, BsmOutcome::PsiPlus00, 0, 0), 6).unwrap();
        assert!(c.set(key(0, 1, BsmOutcome::PsiMinus01, 0, 0), 5).is_err());
        c.set(key(0, 1, BsmOutcome::PsiPlus00, 0, 0), 2).unwrap();
        assert!(c.set(key(0, 1, BsmOutcome::PsiMinus01, 0, 0), 5).is_ok());
    }

    #[test]
    fn sampling_is_deterministic_and_complete() {
        let cfg = NetworkConfig::ideal(TestMode::Bilocality);
        let a = sample_counts(&cfg, 100_000, 11).unwrap();
        let b = sample_counts(&cfg, 100_000, 11).unwrap();
        let other = sample_counts(&cfg, 100_000, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        for (x, z) in settings() {
            assert_eq!(a.block_total(x, z), 100_000);
        }
        let t = counts_to_table(&a).unwrap();
        assert!(t.normalization_violations(1e-12).is_empty());
        assert!(sample_counts(&cfg, 0, 1).is_err());
    }

    #[test]
    fn sampling_independent_of_thread_count() {
        let cfg = NetworkConfig::symmetric(TestMode::Bilocality, 0.9, 0.2, 0.8).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_counts(&cfg, 3 * SHARD_SIZE + 17, 5).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn json_round_trip() {
        let cfg = NetworkConfig::ideal(TestMode::Chsh);
        let c = sample_counts(&cfg, 1000, 3).unwrap();
        let text = c.to_json();
        let back = CountsTable::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        assert_eq!(back.mode(), Some(TestMode::Chsh));
    }

    #[test]
    fn json_rejects_bad_documents() {
        assert!(CountsTable::from_json(r#"{"trials":{"0;0":5},"counts":[]}"#).is_err());
        let over = r#"{"trials":{"0,0":5},"counts":[{"x":0,"z":0,"b":"00","a":0,"c":0,"n":6}]}"#;
        assert!(CountsTable::from_json(over).is_err());
    }

    #[test]
    fn rounded_expectation_counts_reproduce_model() {
        let cfg = NetworkConfig::symmetric(TestMode::Bilocality, 0.93f64.sqrt(), 0.0, 0.965).unwrap();
        let model = cfg.model().unwrap().probability_table().unwrap();
        let n = 1_000_000u64;
        let mut c = CountsTable::new([n; 4]);
        for k in OutcomeKey::all() {
            c.set(k, (model.get(k).unwrap() * n as f64).round() as u64).unwrap();
        }
        let got = b13_from_table(&counts_to_table(&c).unwrap()).unwrap().b13;
        let want = b13_from_table(&model).unwrap().b13;
        assert!((got - want).abs() < 2.0 / n as f64, "{got} vs {want}");
    }
}
