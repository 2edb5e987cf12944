//! Repeated train/test runs comparing the trained network with the random
//! predictor.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::datagen::{gen_sample_pool, sample_model_params, split_pool};
use crate::error::{Error, Result};
use crate::graph::{Topology, WsnGraph};
use crate::learning::{evaluate, random_baseline, train, Metrics, TrainConfig};

/// Sizes of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub worm_count: usize,
    pub pool_size: usize,
    pub num_seeds: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Training pairs also scored after every epoch.
    pub validation_size: usize,
}

impl Setting {
    /// 1000 pairs split 600/400 with `num_seeds` seeds.
    pub fn standard(worm_count: usize, num_seeds: usize) -> Self {
        Setting {
            worm_count,
            pool_size: 1000,
            num_seeds,
            train_size: 600,
            test_size: 400,
            validation_size: 100,
        }
    }
}

/// Test-set scores of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunResult {
    pub proposed: Metrics,
    pub random: Metrics,
}

/// Samples parameters on `topology`, generates and splits a pool, trains and
/// scores both predictors on the test split. All randomness derives from
/// `seed`.
pub fn run_once(
    topology: &Topology,
    setting: &Setting,
    config: &TrainConfig,
    seed: u64,
) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = sample_model_params(topology, setting.worm_count, &mut rng)?;
    let graph = WsnGraph::new(topology.clone(), params)?;
    let pool = gen_sample_pool(&graph, setting.pool_size, setting.num_seeds, seed)?;
    let (tr, te) = split_pool(&pool, setting.train_size, setting.test_size, seed)?;
    if te.is_empty() {
        return Err(Error::Size("test split is empty".into()));
    }
    let val = &tr.pairs[..setting.validation_size.min(tr.len())];
    let config = TrainConfig {
        seed,
        ..config.clone()
    };
    let outcome = train(&graph, &tr, val, &config)?;
    Ok(RunResult {
        proposed: evaluate(&graph, &outcome.params, &te.pairs)?,
        random: random_baseline(&te.pairs, setting.worm_count, &mut rng)?,
    })
}

/// `runs` runs with seeds `base_seed, base_seed + 1, …`.
pub fn run_repeated(
    topology: &Topology,
    setting: &Setting,
    config: &TrainConfig,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<RunResult>> {
    (0..runs as u64)
        .map(|r| run_once(topology, setting, config, base_seed.wrapping_add(r)))
        .collect()
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean and standard deviation of each metric, in the order f1, precision,
/// recall, accuracy.
pub fn summarize(ms: &[Metrics]) -> [(f64, f64); 4] {
    let col = |f: fn(&Metrics) -> f64| mean_std(&ms.iter().map(f).collect::<Vec<_>>());
    [
        col(|m| m.f1),
        col(|m| m.precision),
        col(|m| m.recall),
        col(|m| m.accuracy),
    ]
}
