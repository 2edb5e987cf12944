//! Training the compiled network's thresholds and edge weights from sample
//! pairs, and scoring predictions.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compiler::{
    build_global_network, build_unrolled, large_lower_bound, network_final, params_to_values,
    values_to_params, CompileOptions, DEFAULT_LARGE,
};
use crate::cvnn::{backward, forward, Mode};
use crate::datagen::{prior_weights, SamplePair, SamplePool};
use crate::error::{Error, Result};
use crate::graph::{ModelParams, WsnGraph};
use crate::state::{encode_status, node_loss, AllInfectionMatrix, InfectionState};

const PROB_FLOOR: f64 = 1e-12;

/// Stream of the training generator, apart from the ones data generation uses.
const TRAIN_STREAM: u64 = 0x7472_6169_6e00;

/// How the trainable parameters start out.
#[derive(Debug, Clone, PartialEq)]
pub enum InitScheme {
    /// Every threshold and weight drawn from `U[0, 1]`.
    Uniform01,
    /// Weights `1 / (|N_v| + k)`, thresholds drawn from `U[0, 1]`.
    PaperPrior,
    /// Start from the given parameters.
    Given(ModelParams),
}

/// Fresh parameters for `graph`'s topology and worm count.
pub fn init_params<R: Rng + ?Sized>(graph: &WsnGraph, rng: &mut R, scheme: &InitScheme) -> ModelParams {
    let k = graph.worm_count();
    let topo = graph.topology();
    let nt = graph.node_count() * k;
    let nw = topo.edge_count() * k;
    match scheme {
        InitScheme::Uniform01 => ModelParams {
            worm_count: k,
            thresholds: (0..nt).map(|_| rng.gen()).collect(),
            weights: (0..nw).map(|_| rng.gen()).collect(),
        },
        InitScheme::PaperPrior => ModelParams {
            worm_count: k,
            thresholds: (0..nt).map(|_| rng.gen()).collect(),
            weights: prior_weights(topo, k),
        },
        InitScheme::Given(p) => p.clone(),
    }
}

/// Update rule applied to each mini-batch gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    Sgd,
    /// Adam with the usual `β1 = 0.9`, `β2 = 0.999`, `ε = 1e-8`.
    Adam,
}

/// Hyperparameters of [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    pub epochs: usize,
    pub batch_size: usize,
    /// Temperature of the first epoch, raised linearly to `tau_end`.
    pub tau_start: f64,
    pub tau_end: f64,
    pub seed: u64,
    pub init: InitScheme,
    /// Blocks unrolled during training. `None` unrolls `N` blocks.
    pub unroll_depth: Option<usize>,
    /// Gains of the relaxed network. `large` is replaced by the training
    /// self-link weight.
    pub compile: CompileOptions,
    /// Self-link weight during training. `None` picks one just above what the
    /// initial parameters need.
    pub train_large: Option<f64>,
    /// Return the parameters with the lowest validation loss, the initial
    /// ones included, instead of the last ones.
    pub keep_best: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            optimizer: Optimizer::Adam,
            epochs: 100,
            batch_size: 32,
            tau_start: 2.0,
            tau_end: 20.0,
            seed: 0,
            init: InitScheme::Uniform01,
            unroll_depth: None,
            compile: CompileOptions::default(),
            train_large: None,
            keep_best: true,
        }
    }
}

impl TrainConfig {
    /// Settings used by the experiment harness: Adam at `0.01` for 20
    /// epochs through a single unit-gain block, starting from the prior.
    pub fn tuned(seed: u64) -> Self {
        TrainConfig {
            learning_rate: 0.01,
            epochs: 20,
            seed,
            init: InitScheme::PaperPrior,
            unroll_depth: Some(1),
            compile: CompileOptions {
                pos_gain: 1.0,
                output_gain: 1.0,
                ..CompileOptions::default()
            },
            ..TrainConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Config(format!("learning rate {} must be non-negative", self.learning_rate)));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("epochs and batch size must be positive".into()));
        }
        if !(self.tau_start > 0.0 && self.tau_end.is_finite() && self.tau_end >= self.tau_start) {
            return Err(Error::Config(format!(
                "temperature schedule {} -> {} must be positive and non-decreasing",
                self.tau_start, self.tau_end
            )));
        }
        if self.unroll_depth == Some(0) {
            return Err(Error::Config("unroll depth must be positive".into()));
        }
        Ok(())
    }

    /// Temperature used in epoch `epoch` (0-based).
    pub fn tau(&self, epoch: usize) -> f64 {
        if self.epochs <= 1 {
            return self.tau_start;
        }
        let t = epoch as f64 / (self.epochs - 1) as f64;
        self.tau_start + t * (self.tau_end - self.tau_start)
    }
}

/// One row of the training history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_surrogate_loss: f64,
    pub val_hard_loss: f64,
    pub accuracy: f64,
}

/// History as CSV with a header row.
pub fn history_csv(history: &[EpochRecord]) -> String {
    let mut s = String::from("epoch,train_surrogate_loss,val_hard_loss,accuracy\n");
    for r in history {
        s.push_str(&format!(
            "{},{:?},{:?},{:?}\n",
            r.epoch, r.train_surrogate_loss, r.val_hard_loss, r.accuracy
        ));
    }
    s
}

/// What [`train`] produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub history: Vec<EpochRecord>,
    /// Epoch at which the surrogate loss stopped being finite.
    pub diverged_at: Option<usize>,
}

/// Cross-entropy between the soft labels read off a relaxed output and the
/// target labels, averaged over nodes, with its gradient packed per output.
///
/// Worm `k` scores `s_k = max(Re y_k, 0)`; the innocent class gets
/// `max(1 − Σ s, 0)` and the scores are normalised by `max(Σ s, 1)`.
pub fn surrogate_loss(soft: &[Complex64], target: &AllInfectionMatrix) -> Result<(f64, Vec<Complex64>)> {
    let k = target.worm_count();
    let n = target.node_count();
    if soft.len() != n * k {
        return Err(Error::Dimension {
            expected: n * k,
            got: soft.len(),
        });
    }
    let truth = crate::state::decode_status(target)?;
    let mut grad = vec![Complex64::new(0.0, 0.0); soft.len()];
    let mut total = 0.0;
    for v in 0..n {
        let col = &soft[v * k..(v + 1) * k];
        if col.iter().any(|z| !z.re.is_finite()) {
            return Err(Error::Numeric {
                layer: usize::MAX,
                reason: format!("non-finite output at node {v}"),
            });
        }
        let s: Vec<f64> = col.iter().map(|z| z.re.max(0.0)).collect();
        let sum: f64 = s.iter().sum();
        let t = truth.label(v);
        let g = &mut grad[v * k..(v + 1) * k];
        let live = |j: usize| col[j].re > 0.0;
        let q = if sum < 1.0 {
            if t == 0 {
                let q = 1.0 - sum;
                if q > PROB_FLOOR {
                    for j in (0..k).filter(|&j| live(j)) {
                        g[j].re = 1.0 / q;
                    }
                }
                q
            } else {
                let q = s[t - 1];
                if q > PROB_FLOOR && live(t - 1) {
                    g[t - 1].re = -1.0 / q;
                }
                q
            }
        } else if t == 0 {
            0.0
        } else {
            let q = s[t - 1] / sum;
            if q > PROB_FLOOR {
                for j in (0..k).filter(|&j| live(j)) {
                    g[j].re = 1.0 / sum;
                }
                g[t - 1].re -= 1.0 / s[t - 1];
            }
            q
        };
        total += -q.max(PROB_FLOOR).ln();
    }
    let scale = 1.0 / n.max(1) as f64;
    for z in &mut grad {
        *z *= scale;
    }
    Ok((total * scale, grad))
}

/// Self-link weight for a relaxed network starting at `graph`'s parameters.
pub fn auto_train_large(graph: &WsnGraph) -> f64 {
    1.5 * large_lower_bound(graph) + 0.5
}

fn eval_options(graph: &WsnGraph) -> CompileOptions {
    CompileOptions {
        large: DEFAULT_LARGE.max(2.0 * large_lower_bound(graph) + 1.0),
        ..CompileOptions::default()
    }
}

/// Fits thresholds and weights on `pool` by projected mini-batch gradient
/// descent through the relaxed unrolled network. `validation` is scored in
/// hard mode after each epoch; when empty the training pairs are used.
pub fn train(
    graph: &WsnGraph,
    pool: &SamplePool,
    validation: &[SamplePair],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if pool.is_empty() {
        return Err(Error::Precondition("training pool is empty".into()));
    }
    let k = graph.worm_count();
    if pool.worm_count != k {
        return Err(Error::Precondition(format!(
            "pool has {} worms, graph has {k}",
            pool.worm_count
        )));
    }
    let n = graph.node_count();
    for p in pool.pairs.iter().chain(validation) {
        p.initial.check(n, k)?;
        p.final_state.check(n, k)?;
    }
    let val = if validation.is_empty() { &pool.pairs[..] } else { validation };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(TRAIN_STREAM);
    let mut params = init_params(graph, &mut rng, &config.init);
    let start = graph.with_params(params.clone())?;
    let opts = CompileOptions {
        large: config.train_large.unwrap_or_else(|| auto_train_large(&start)),
        ..config.compile
    };
    let depth = config.unroll_depth.unwrap_or(n);
    let mut net = build_unrolled(&start, depth, &opts)?;

    let inputs: Vec<_> = pool
        .pairs
        .iter()
        .map(|p| Ok((encode_status(&p.initial, k)?, encode_status(&p.final_state, k)?)))
        .collect::<Result<_>>()?;

    let mut history = Vec::with_capacity(config.epochs);
    let mut best = if config.keep_best {
        Some((evaluate(graph, &params, val)?.mean_loss, params.clone()))
    } else {
        None
    };
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut values = params_to_values(&params);
    let mut opt = OptState::new(config, values.len());
    for epoch in 0..config.epochs {
        let mode = Mode::relaxed(config.tau(epoch))?;
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut diverged = false;
        for batch in order.chunks(config.batch_size) {
            let mut grad = vec![0.0; values.len()];
            for &i in batch {
                let (x, y) = &inputs[i];
                let step = forward(&net, x.as_slice(), mode)
                    .and_then(|(out, trace)| Ok((surrogate_loss(&out, y)?, trace)));
                let ((l, g), trace) = match step {
                    Ok(r) => r,
                    Err(Error::Numeric { .. }) => {
                        diverged = true;
                        break;
                    }
                    Err(e) => return Err(e),
                };
                loss_sum += l;
                for (a, b) in grad.iter_mut().zip(backward(&net, &trace, &g)?) {
                    *a += b;
                }
            }
            if diverged || grad.iter().any(|g| !g.is_finite()) {
                diverged = true;
                break;
            }
            for g in &mut grad {
                *g /= batch.len() as f64;
            }
            opt.update(&mut values, &grad);
            net.set_params(&values)?;
        }
        if diverged || !loss_sum.is_finite() {
            return Ok(TrainOutcome {
                params: best.map_or(params, |b| b.1),
                history,
                diverged_at: Some(epoch),
            });
        }
        params = values_to_params(&values, &params)?;
        let m = evaluate(graph, &params, val)?;
        history.push(EpochRecord {
            epoch,
            train_surrogate_loss: loss_sum / inputs.len() as f64,
            val_hard_loss: m.mean_loss,
            accuracy: m.accuracy,
        });
        if best.as_ref().map_or(true, |b| m.mean_loss < b.0) {
            best = Some((m.mean_loss, params.clone()));
        }
    }
    let params = match (config.keep_best, best) {
        (true, Some((_, p))) => p,
        _ => params,
    };
    Ok(TrainOutcome {
        params,
        history,
        diverged_at: None,
    })
}

struct OptState {
    kind: Optimizer,
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl OptState {
    fn new(config: &TrainConfig, len: usize) -> Self {
        let moments = if config.optimizer == Optimizer::Adam { len } else { 0 };
        OptState {
            kind: config.optimizer,
            lr: config.learning_rate,
            m: vec![0.0; moments],
            v: vec![0.0; moments],
            t: 0,
        }
    }

    /// Takes one step and projects onto the non-negative orthant.
    fn update(&mut self, values: &mut [f64], grad: &[f64]) {
        match self.kind {
            Optimizer::Sgd => {
                for (x, g) in values.iter_mut().zip(grad) {
                    *x = (*x - self.lr * g).max(0.0);
                }
            }
            Optimizer::Adam => {
                const B1: f64 = 0.9;
                const B2: f64 = 0.999;
                self.t += 1;
                let c1 = 1.0 - B1.powi(self.t);
                let c2 = 1.0 - B2.powi(self.t);
                for i in 0..values.len() {
                    let g = grad[i];
                    self.m[i] = B1 * self.m[i] + (1.0 - B1) * g;
                    self.v[i] = B2 * self.v[i] + (1.0 - B2) * g * g;
                    let step = self.lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + 1e-8);
                    values[i] = (values[i] - step).max(0.0);
                }
            }
        }
    }
}

/// Classification scores over a set of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Macro-averaged over the worm classes.
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    /// Over all node labels, innocent included.
    pub accuracy: f64,
    /// Mean fraction of mislabelled nodes per sample.
    pub mean_loss: f64,
    pub samples: usize,
}

/// Scores predicted final states against the true ones.
pub fn score(predicted: &[InfectionState], truth: &[InfectionState], worm_count: usize) -> Result<Metrics> {
    if predicted.len() != truth.len() {
        return Err(Error::Dimension {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Precondition("no samples to score".into()));
    }
    let mut tp = vec![0usize; worm_count + 1];
    let mut fp = vec![0usize; worm_count + 1];
    let mut fneg = vec![0usize; worm_count + 1];
    let (mut correct, mut total, mut loss) = (0usize, 0usize, 0.0);
    for (p, t) in predicted.iter().zip(truth) {
        loss += node_loss(p, t)?;
        for (&a, &b) in p.labels().iter().zip(t.labels()) {
            if a > worm_count || b > worm_count {
                return Err(Error::InvalidLabel {
                    node: 0,
                    label: a.max(b),
                    worms: worm_count,
                });
            }
            total += 1;
            if a == b {
                correct += 1;
                tp[a] += 1;
            } else {
                fp[a] += 1;
                fneg[b] += 1;
            }
        }
    }
    let ratio = |a: usize, b: usize| if a + b == 0 { 0.0 } else { a as f64 / (a + b) as f64 };
    let (mut pr, mut re, mut f1) = (0.0, 0.0, 0.0);
    for c in 1..=worm_count {
        let p = ratio(tp[c], fp[c]);
        let r = ratio(tp[c], fneg[c]);
        pr += p;
        re += r;
        f1 += if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    }
    let kf = worm_count as f64;
    Ok(Metrics {
        f1: f1 / kf,
        precision: pr / kf,
        recall: re / kf,
        accuracy: if total == 0 { 1.0 } else { correct as f64 / total as f64 },
        mean_loss: loss / truth.len() as f64,
        samples: truth.len(),
    })
}

/// Hard-mode predictions of the compiled network with `params`.
pub fn predict(graph: &WsnGraph, params: &ModelParams, samples: &[SamplePair]) -> Result<Vec<InfectionState>> {
    let g = graph.with_params(params.clone())?;
    let net = build_global_network(&g, &eval_options(&g))?;
    samples
        .iter()
        .map(|s| network_final(&net, &s.initial, g.worm_count(), true))
        .collect()
}

/// Scores the compiled network with `params` on `samples`.
pub fn evaluate(graph: &WsnGraph, params: &ModelParams, samples: &[SamplePair]) -> Result<Metrics> {
    let pred = predict(graph, params, samples)?;
    let truth: Vec<_> = samples.iter().map(|s| s.final_state.clone()).collect();
    score(&pred, &truth, graph.worm_count())
}

/// Scores a predictor that labels every node uniformly at random.
pub fn random_baseline<R: Rng + ?Sized>(samples: &[SamplePair], worm_count: usize, rng: &mut R) -> Result<Metrics> {
    let pred = samples
        .iter()
        .map(|s| {
            let labels = (0..s.final_state.len()).map(|_| rng.gen_range(0..=worm_count)).collect();
            InfectionState::new(labels, worm_count)
        })
        .collect::<Result<Vec<_>>>()?;
    let truth: Vec<_> = samples.iter().map(|s| s.final_state.clone()).collect();
    score(&pred, &truth, worm_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_er_graph, gen_sample_pool, sample_model_params};
    use crate::graph::Topology;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn target(labels: &[usize], k: usize) -> AllInfectionMatrix {
        encode_status(&InfectionState::new(labels.to_vec(), k).unwrap(), k).unwrap()
    }

    fn er(n: usize, k: usize, seed: u64) -> WsnGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = gen_er_graph(n, 0.3, &mut rng).unwrap();
        let p = sample_model_params(&t, k, &mut rng).unwrap();
        WsnGraph::new(t, p).unwrap()
    }

    #[test]
    fn prior_init_weights() {
        // Node 3 has in-neighbours 0, 1, 2.
        let t = Topology::new(4, vec![(0, 3), (1, 3), (2, 3)]).unwrap();
        let g = WsnGraph::new(
            t,
            ModelParams {
                worm_count: 2,
                thresholds: vec![0.0; 8],
                weights: vec![0.0; 6],
            },
        )
        .unwrap();
        let p = init_params(&g, &mut ChaCha8Rng::seed_from_u64(0), &InitScheme::PaperPrior);
        assert_eq!(p.weight(0, 1), 0.25);
        assert_eq!(p.weight(2, 2), 0.2);
        assert!(p.thresholds.iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn uniform_init_is_reproducible() {
        let g = er(6, 2, 1);
        let a = init_params(&g, &mut ChaCha8Rng::seed_from_u64(3), &InitScheme::Uniform01);
        let b = init_params(&g, &mut ChaCha8Rng::seed_from_u64(3), &InitScheme::Uniform01);
        assert_eq!(a, b);
    }

    #[test]
    fn one_hot_output_has_zero_loss() {
        let y = target(&[0, 1, 2], 2);
        let (l, g) = surrogate_loss(y.as_slice(), &y).unwrap();
        assert_eq!(l, 0.0);
        assert!(g.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn uniform_output_costs_ln_classes() {
        let y = target(&[0, 3, 4], 4);
        let soft = vec![c(0.2); 12];
        let (l, _) = surrogate_loss(&soft, &y).unwrap();
        assert!((l - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn loss_falls_as_true_score_rises() {
        let y = target(&[2], 4);
        let mut prev = f64::INFINITY;
        for s in [0.05, 0.1, 0.3, 0.6, 0.9] {
            let soft = vec![c(0.1), c(s), c(0.2), c(0.1)];
            let (l, _) = surrogate_loss(&soft, &y).unwrap();
            assert!(l < prev);
            prev = l;
        }
    }

    #[test]
    fn surrogate_gradient_matches_differences() {
        let labels = [0, 1, 2, 2];
        let y = target(&labels, 2);
        for soft in [
            vec![c(0.1), c(0.3), c(0.4), c(0.2), c(0.05), c(0.6), c(0.2), c(0.3)],
            vec![c(0.9), c(0.6), c(0.7), c(0.8), c(0.5), c(0.6), c(1.2), c(0.1)],
        ] {
            let (_, g) = surrogate_loss(&soft, &y).unwrap();
            for i in 0..soft.len() {
                let v = i / 2;
                if labels[v] == 0 && soft[2 * v].re + soft[2 * v + 1].re >= 1.0 {
                    continue;
                }
                let h = 1e-6;
                let mut a = soft.clone();
                let mut b = soft.clone();
                a[i].re += h;
                b[i].re -= h;
                let fd = (surrogate_loss(&a, &y).unwrap().0 - surrogate_loss(&b, &y).unwrap().0) / (2.0 * h);
                assert!((fd - g[i].re).abs() < 1e-5, "entry {i}: {fd} vs {}", g[i].re);
            }
        }
    }

    #[test]
    fn non_finite_output_is_rejected() {
        let y = target(&[1], 2);
        let soft = vec![c(f64::NAN), c(0.0)];
        assert!(matches!(surrogate_loss(&soft, &y), Err(Error::Numeric { .. })));
        assert!(surrogate_loss(&soft[..1], &y).is_err());
    }

    #[test]
    fn score_counts() {
        let t = vec![InfectionState::new(vec![0, 1, 2, 1], 2).unwrap()];
        let p = vec![InfectionState::new(vec![0, 1, 1, 0], 2).unwrap()];
        let m = score(&p, &t, 2).unwrap();
        assert_eq!(m.accuracy, 0.5);
        assert_eq!(m.mean_loss, 0.5);
        // Worm 1: tp 1, fp 1, fn 1. Worm 2: tp 0, fp 0, fn 1.
        assert_eq!(m.precision, 0.25);
        assert_eq!(m.recall, 0.25);
        assert_eq!(m.f1, 0.25);
        let all_innocent = vec![InfectionState::innocent(4)];
        assert_eq!(score(&all_innocent, &t, 2).unwrap().recall, 0.0);
        assert_eq!(score(&t, &t, 2).unwrap().accuracy, 1.0);
        assert!(score(&[], &[], 2).is_err());
    }

    #[test]
    fn true_params_score_perfectly() {
        let g = er(10, 2, 5);
        let pool = gen_sample_pool(&g, 30, 3, 9).unwrap();
        let m = evaluate(&g, g.params(), &pool.pairs).unwrap();
        assert_eq!((m.accuracy, m.mean_loss, m.f1), (1.0, 0.0, 1.0));
    }

    #[test]
    fn zero_rate_keeps_params() {
        let g = er(8, 2, 2);
        let pool = gen_sample_pool(&g, 10, 2, 1).unwrap();
        let init = init_params(&g, &mut ChaCha8Rng::seed_from_u64(4), &InitScheme::Uniform01);
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 1,
            batch_size: 4,
            init: InitScheme::Given(init.clone()),
            unroll_depth: Some(3),
            keep_best: false,
            ..TrainConfig::default()
        };
        let out = train(&g, &pool, &[], &cfg).unwrap();
        assert_eq!(out.params, init);
        assert_eq!(out.history.len(), 1);
        assert!(out.history[0].train_surrogate_loss.is_finite());
    }

    #[test]
    fn training_is_reproducible_and_nonnegative() {
        let g = er(8, 2, 7);
        let pool = gen_sample_pool(&g, 16, 2, 3).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.5,
            epochs: 3,
            batch_size: 8,
            unroll_depth: Some(3),
            ..TrainConfig::default()
        };
        let a = train(&g, &pool, &pool.pairs[..4], &cfg).unwrap();
        let b = train(&g, &pool, &pool.pairs[..4], &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.params.is_nonnegative());
        assert_eq!(history_csv(&a.history).lines().count(), 4);
    }

    #[test]
    fn bad_config_is_rejected() {
        let g = er(4, 2, 1);
        let pool = gen_sample_pool(&g, 2, 1, 1).unwrap();
        for cfg in [
            TrainConfig { epochs: 0, ..TrainConfig::default() },
            TrainConfig { tau_end: 1.0, ..TrainConfig::default() },
            TrainConfig { learning_rate: -1.0, ..TrainConfig::default() },
        ] {
            assert!(matches!(train(&g, &pool, &[], &cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn baseline_is_seeded() {
        let g = er(10, 4, 3);
        let pool = gen_sample_pool(&g, 20, 3, 2).unwrap();
        let a = random_baseline(&pool.pairs, 4, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = random_baseline(&pool.pairs, 4, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        for x in [a.f1, a.precision, a.recall, a.accuracy, a.mean_loss] {
            assert!((0.0..=1.0).contains(&x));
        }
    }
}
