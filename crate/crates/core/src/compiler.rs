//! Compiles a [`WsnGraph`] into a complex-valued network that reproduces the
//! simulator exactly in hard mode.
//!
//! One propagation step is a block of `2P + 4` layers for `K = 2^P` worms:
//!
//! * stage 1: per (node, worm) slot the incoming weight plus a large
//!   self-link, thresholded; a surviving slot carries `(sum, k)`.
//! * `P` comparison levels of two layers each. The first layer of a level
//!   computes, for every pair of candidates, which one wins (the right one on
//!   ties). The second layer gates both candidates' value and index by those
//!   booleans using compare gates with a shared twin, so that the difference
//!   of a gate and its twin is exactly the gated value.
//! * a readout layer collapsing the last level to `(max sum, worm index)`.
//! * two format layers turning the index into the one-hot column.
//!
//! Every weight is a real multiple of `1`, `i` or `i - 1` applied to inputs
//! whose other component is zero, every gain is a power of two, and rows are
//! accumulated in column order, so hard-mode arithmetic is exact wherever the
//! simulator's is.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cvnn::{ActivationKind, Binding, LayerSpec, Mode, NetworkSpec, Slot};
use crate::error::{Error, Result};
use crate::graph::{worm_levels, ModelParams, WsnGraph};
use crate::propagation::{enumerate_states, propagate, DEFAULT_ORACLE_CAP};
use crate::state::{decode_lenient, encode_status, InfectionState};

/// Self-link weight used when none is given.
pub const DEFAULT_LARGE: f64 = 1000.0;

/// Constants of the construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions {
    /// Self-link weight keeping infected slots ahead of every other slot.
    pub large: f64,
    /// Margin of the gates selecting comparison winners. Power of two.
    pub product_gain: f64,
    /// Margin of the gates detecting a surviving stage-1 slot. Power of two.
    pub pos_gain: f64,
    /// Margin of the format layers. Power of two.
    pub output_gain: f64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            large: DEFAULT_LARGE,
            product_gain: 2.0,
            pos_gain: 8.0,
            output_gain: 8.0,
        }
    }
}

fn is_power_of_two(x: f64) -> bool {
    x.is_normal() && x > 0.0 && x.to_bits() & ((1u64 << 52) - 1) == 0
}

impl CompileOptions {
    fn check_gains(&self) -> Result<()> {
        for (name, g) in [
            ("product gain", self.product_gain),
            ("position gain", self.pos_gain),
            ("output gain", self.output_gain),
        ] {
            if !is_power_of_two(g) {
                return Err(Error::Config(format!("{name} {g} must be a power of two")));
            }
        }
        Ok(())
    }
}

/// Smallest self-link weight the dominance check accepts for `graph`.
pub fn large_lower_bound(graph: &WsnGraph) -> f64 {
    graph.max_in_weight_sum() + graph.max_threshold()
}

/// Checks that `large` exceeds every achievable slot value of an innocent node.
pub fn check_large(graph: &WsnGraph, large: f64) -> Result<()> {
    let bound = large_lower_bound(graph);
    if large.is_finite() && large > bound {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "self-link weight {large} does not exceed max in-weight plus max threshold {bound}"
        )))
    }
}

/// Layers of one block, grouped by role.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBlockPlan {
    pub stage1: LayerSpec,
    pub comparison_levels: Vec<(LayerSpec, LayerSpec)>,
    pub readout: LayerSpec,
    pub format_adjust: [LayerSpec; 2],
    pub levels: usize,
}

impl LocalBlockPlan {
    /// Layers in application order.
    pub fn layers(&self) -> Vec<LayerSpec> {
        let mut v = vec![self.stage1.clone()];
        for (a, b) in &self.comparison_levels {
            v.push(a.clone());
            v.push(b.clone());
        }
        v.push(self.readout.clone());
        v.extend(self.format_adjust.iter().cloned());
        v
    }

    pub fn layer_count(&self) -> usize {
        2 * self.levels + 4
    }
}

/// Comparison layers plus the readout that follows them.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonLevels {
    pub levels: Vec<(LayerSpec, LayerSpec)>,
    pub readout: LayerSpec,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Stage-1 layer: row `v·K + k − 1` sums `w_(u,v)^k` over in-neighbors plus
/// the self-link, adds `(0, k)` and applies `ThresholdGate(θ_v^k)`.
pub fn build_stage1_layer(graph: &WsnGraph, large: f64) -> Result<LayerSpec> {
    check_large(graph, large)?;
    let k = graph.worm_count();
    let n = graph.node_count();
    let topo = graph.topology();
    let mut rows = Vec::with_capacity(n * k);
    let mut bias = Vec::with_capacity(n * k);
    let mut acts = Vec::with_capacity(n * k);
    for v in 0..n {
        for w in 1..=k {
            let mut row: Vec<(usize, Complex64)> = topo
                .in_edges(v)
                .iter()
                .map(|&(u, e)| (u * k + w - 1, c(graph.weight(e, w), 0.0)))
                .collect();
            row.push((v * k + w - 1, c(large, 0.0)));
            rows.push(row);
            bias.push(c(0.0, w as f64));
            acts.push(ActivationKind::ThresholdGate(graph.threshold(v, w)));
        }
    }
    LayerSpec::new(n * k, rows, bias, acts)
}

/// Per-level neuron offsets within one node.
struct Level {
    /// Candidates entering the level.
    inputs: usize,
}

impl Level {
    fn outputs(&self) -> usize {
        self.inputs / 2
    }
    /// Width of the first (compare) layer per node.
    fn compare_width(&self) -> usize {
        3 * self.inputs
    }
    /// Width of the second (product) layer per node.
    fn product_width(&self) -> usize {
        3 * self.inputs
    }
    // Compare layer: values, then indices, then (aw, bw) per pair.
    fn value(&self, s: usize) -> usize {
        s
    }
    fn index(&self, s: usize) -> usize {
        self.inputs + s
    }
    fn flag(&self, s: usize) -> usize {
        2 * self.inputs + s
    }
    // Product layer: twins, then index gates, then value gates; one per flag.
    fn twin(&self, s: usize) -> usize {
        s
    }
    fn gate_index(&self, s: usize) -> usize {
        self.inputs + s
    }
    fn gate_value(&self, s: usize) -> usize {
        2 * self.inputs + s
    }
}

/// Rows reading the previous level's product layer: the winner `m`'s value
/// and index as pure reals, as lists of `(column offset, weight)`.
fn winner_value(prev: &Level, m: usize) -> Vec<(usize, Complex64)> {
    let (a, b) = (2 * m, 2 * m + 1);
    vec![
        (prev.twin(a), I),
        (prev.twin(b), I),
        (prev.gate_value(a), -I),
        (prev.gate_value(b), -I),
    ]
}

fn winner_index(prev: &Level, m: usize) -> Vec<(usize, Complex64)> {
    let (a, b) = (2 * m, 2 * m + 1);
    vec![
        (prev.twin(a), I),
        (prev.twin(b), I),
        (prev.gate_index(a), -I),
        (prev.gate_index(b), -I),
    ]
}

fn scale(terms: &[(usize, Complex64)], s: Complex64) -> Vec<(usize, Complex64)> {
    terms.iter().map(|&(col, w)| (col, w * s)).collect()
}

fn offset(terms: Vec<(usize, Complex64)>, base: usize) -> Vec<(usize, Complex64)> {
    terms.into_iter().map(|(col, w)| (col + base, w)).collect()
}

/// Builds the compare layer of level `p` for all nodes.
///
/// At the first level the candidates come straight from stage 1, where slot
/// `s` holds `(r, s + 1)` or zero. Later levels read the previous product
/// layer through [`winner_value`] / [`winner_index`].
fn compare_layer(
    n: usize,
    worms: usize,
    level: &Level,
    prev: Option<&Level>,
    opts: &CompileOptions,
) -> Result<LayerSpec> {
    let in_per_node = match prev {
        None => worms,
        Some(p) => p.product_width(),
    };
    let width = level.compare_width();
    let mut rows = Vec::with_capacity(n * width);
    let mut bias = Vec::with_capacity(n * width);
    let mut acts = Vec::with_capacity(n * width);
    let pg = opts.pos_gain;
    for v in 0..n {
        let base = v * in_per_node;
        let value_terms = |s: usize| -> Vec<(usize, Complex64)> {
            match prev {
                None => vec![(s, ONE)],
                Some(p) => winner_value(p, s),
            }
        };
        for s in 0..level.inputs {
            rows.push(offset(value_terms(s), base));
            bias.push(c(0.0, 0.0));
            acts.push(ActivationKind::Identity);
        }
        for s in 0..level.inputs {
            match prev {
                None => {
                    // Fires iff stage-1 slot s survived: its imaginary part is s + 1.
                    let k = (s + 1) as f64;
                    rows.push(vec![(base + s, c(pg, 0.0))]);
                    bias.push(c(0.0, k - pg * k / 2.0));
                    acts.push(ActivationKind::IndexGate((s + 1) as i64));
                }
                Some(p) => {
                    rows.push(offset(winner_index(p, s), base));
                    bias.push(c(0.0, 0.0));
                    acts.push(ActivationKind::Identity);
                }
            }
        }
        for j in 0..level.outputs() {
            let (a, b) = (value_terms(2 * j), value_terms(2 * j + 1));
            // aw = [r_a > r_b] from Re(value_a − value_b).
            let mut aw = a.clone();
            aw.extend(scale(&b, -ONE));
            rows.push(offset(aw, base));
            bias.push(c(0.0, 0.0));
            acts.push(ActivationKind::OneHotGate(0));
            // bw = [r_b ≥ r_a] from Im(i·value_b − i·value_a).
            let mut bw = scale(&a, -I);
            bw.extend(scale(&b, I));
            rows.push(offset(bw, base));
            bias.push(c(0.0, 0.0));
            acts.push(ActivationKind::IndexGate(0));
        }
    }
    LayerSpec::new(n * in_per_node, rows.into_iter().map(merge).collect(), bias, acts)
}

/// Sums weights sharing a column.
fn merge(mut row: Vec<(usize, Complex64)>) -> Vec<(usize, Complex64)> {
    row.sort_by_key(|&(col, _)| col);
    let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
    for (col, w) in row {
        match out.last_mut() {
            Some((last, acc)) if *last == col => *acc += w,
            _ => out.push((col, w)),
        }
    }
    out.retain(|&(_, w)| w != Complex64::new(0.0, 0.0));
    out
}

/// Builds the product layer of a level: for each flag `β` of pair `j`
/// (candidate `s`), a twin `T = cmp(i·2g·β − i·g)`, an index gate and a value
/// gate `cmp(scalar + i·2g·β − i·g)`.
fn product_layer(n: usize, level: &Level, first: bool, opts: &CompileOptions) -> Result<LayerSpec> {
    let g = opts.product_gain;
    let in_w = level.compare_width();
    let width = level.product_width();
    let mut rows = vec![Vec::new(); n * width];
    let bias = vec![c(0.0, -g); n * width];
    let acts = vec![ActivationKind::CompareGate; n * width];
    for v in 0..n {
        let base = v * in_w;
        let out = v * width;
        for s in 0..level.inputs {
            let flag = (base + level.flag(s), c(0.0, 2.0 * g));
            rows[out + level.twin(s)] = vec![flag];
            let value = base + level.value(s);
            let index = base + level.index(s);
            if first {
                let k = (s + 1) as f64;
                rows[out + level.gate_index(s)] = vec![(index, c(k, 0.0)), flag];
                rows[out + level.gate_value(s)] = vec![(value, ONE), (index, c(0.0, -k)), flag];
            } else {
                rows[out + level.gate_index(s)] = vec![(index, ONE), flag];
                rows[out + level.gate_value(s)] = vec![(value, ONE), flag];
            }
        }
    }
    LayerSpec::new(n * in_w, rows, bias, acts)
}

/// Readout: `(max sum, worm index)` per node from the last product layer.
fn readout_layer(n: usize, last: &Level) -> Result<LayerSpec> {
    let in_w = last.product_width();
    let mut rows = Vec::with_capacity(n);
    for v in 0..n {
        let base = v * in_w;
        let mut row = Vec::new();
        for s in 0..2 {
            row.push((base + last.twin(s), c(-1.0, 1.0)));
            row.push((base + last.gate_index(s), ONE));
            row.push((base + last.gate_value(s), -I));
        }
        rows.push(row);
    }
    LayerSpec::new(n * in_w, rows, vec![c(0.0, 0.0); n], vec![ActivationKind::Identity; n])
}

/// The `P` comparison levels and the readout for `K` worms over `N` nodes.
pub fn build_comparison_levels(
    worm_count: usize,
    node_count: usize,
    opts: &CompileOptions,
) -> Result<ComparisonLevels> {
    let p = worm_levels(worm_count)?;
    opts.check_gains()?;
    let mut levels = Vec::with_capacity(p);
    let mut prev: Option<Level> = None;
    for lvl in 0..p {
        let level = Level {
            inputs: worm_count >> lvl,
        };
        let cmp = compare_layer(node_count, worm_count, &level, prev.as_ref(), opts)?;
        let prod = product_layer(node_count, &level, lvl == 0, opts)?;
        levels.push((cmp, prod));
        prev = Some(level);
    }
    let readout = readout_layer(node_count, prev.as_ref().expect("at least one level"))?;
    Ok(ComparisonLevels { levels, readout })
}

/// The two layers mapping `(max, index)` per node to one-hot columns.
pub fn build_format_adjustment(
    worm_count: usize,
    node_count: usize,
    opts: &CompileOptions,
) -> Result<[LayerSpec; 2]> {
    worm_levels(worm_count)?;
    opts.check_gains()?;
    let g = opts.output_gain;
    let k = worm_count;
    let n = node_count;
    let mut rows = Vec::with_capacity(n * k);
    let mut bias = Vec::with_capacity(n * k);
    let mut acts = Vec::with_capacity(n * k);
    for v in 0..n {
        for w in 1..=k {
            // Fires iff the carried index is at least w.
            let wf = w as f64;
            rows.push(vec![(v, c(g, 0.0))]);
            bias.push(c(0.0, g / 2.0 - g * wf + wf));
            acts.push(ActivationKind::IndexGate(w as i64));
        }
    }
    let ge = LayerSpec::new(n, rows, bias, acts)?;
    let mut rows = Vec::with_capacity(n * k);
    for v in 0..n {
        for w in 0..k {
            let mut row = vec![(v * k + w, c(2.0 * g, 0.0))];
            if w + 1 < k {
                row.push((v * k + w + 1, c(-2.0 * g, 0.0)));
            }
            rows.push(row);
        }
    }
    let eq = LayerSpec::new(
        n * k,
        rows,
        vec![c(-g, 0.0); n * k],
        vec![ActivationKind::OneHotGate(0); n * k],
    )?;
    Ok([ge, eq])
}

/// All layers of one block, grouped by role.
pub fn build_block_plan(graph: &WsnGraph, opts: &CompileOptions) -> Result<LocalBlockPlan> {
    let levels = worm_levels(graph.worm_count())?;
    opts.check_gains()?;
    let stage1 = build_stage1_layer(graph, opts.large)?;
    let cmp = build_comparison_levels(graph.worm_count(), graph.node_count(), opts)?;
    let format_adjust = build_format_adjustment(graph.worm_count(), graph.node_count(), opts)?;
    Ok(LocalBlockPlan {
        stage1,
        comparison_levels: cmp.levels,
        readout: cmp.readout,
        format_adjust,
        levels,
    })
}

/// Binding names and slots for every threshold then every edge weight, in
/// [`ModelParams`] order.
fn stage1_bindings(graph: &WsnGraph, stage1: &LayerSpec) -> Vec<Binding> {
    let k = graph.worm_count();
    let mut out = Vec::with_capacity((graph.node_count() + graph.edge_count()) * k);
    for v in 0..graph.node_count() {
        for w in 1..=k {
            out.push(Binding {
                name: format!("theta:{v}:{w}"),
                slots: vec![Slot::Threshold {
                    body: 0,
                    neuron: v * k + w - 1,
                }],
            });
        }
    }
    for &(u, v) in graph.topology().edges() {
        for w in 1..=k {
            let row = v * k + w - 1;
            let entry = stage1
                .entry_index(row, u * k + w - 1)
                .expect("edge entry present");
            out.push(Binding {
                name: format!("w:{u}:{v}:{w}"),
                slots: vec![Slot::Weight {
                    body: 0,
                    row,
                    entry,
                }],
            });
        }
    }
    out
}

/// One propagation step as a network of `2P + 4` layers.
pub fn build_local_block(graph: &WsnGraph, opts: &CompileOptions) -> Result<NetworkSpec> {
    build_unrolled(graph, 1, opts)
}

/// The local block repeated `N` times with shared parameters.
pub fn build_global_network(graph: &WsnGraph, opts: &CompileOptions) -> Result<NetworkSpec> {
    build_unrolled(graph, graph.node_count(), opts)
}

/// The local block repeated `depth` times with shared parameters.
pub fn build_unrolled(graph: &WsnGraph, depth: usize, opts: &CompileOptions) -> Result<NetworkSpec> {
    if depth == 0 {
        return Err(Error::Config("unroll depth must be positive".into()));
    }
    let plan = build_block_plan(graph, opts)?;
    let bindings = stage1_bindings(graph, &plan.stage1);
    let bodies = plan.layers();
    let len = bodies.len();
    let sequence = (0..depth).flat_map(|_| 0..len).collect();
    NetworkSpec::new(bodies, sequence, bindings)
}

/// Parameter vector in binding order for `params`.
pub fn params_to_values(params: &ModelParams) -> Vec<f64> {
    let mut v = params.thresholds.clone();
    v.extend_from_slice(&params.weights);
    v
}

/// Inverse of [`params_to_values`].
pub fn values_to_params(values: &[f64], like: &ModelParams) -> Result<ModelParams> {
    let nt = like.thresholds.len();
    if values.len() != nt + like.weights.len() {
        return Err(Error::Dimension {
            expected: nt + like.weights.len(),
            got: values.len(),
        });
    }
    Ok(ModelParams {
        worm_count: like.worm_count,
        thresholds: values[..nt].to_vec(),
        weights: values[nt..].to_vec(),
    })
}

/// Layers per block for `K` worms.
pub fn block_len(worm_count: usize) -> Result<usize> {
    Ok(2 * worm_levels(worm_count)? + 4)
}

/// Hard forward block by block, optionally stopping at the first block whose
/// output equals its input. Returns the output and the number of blocks run.
pub fn forward_blocks(
    net: &NetworkSpec,
    input: &[Complex64],
    block: usize,
    early_exit: bool,
) -> Result<(Vec<Complex64>, usize)> {
    if block == 0 || net.layer_count() % block != 0 {
        return Err(Error::Config(format!(
            "{} layers do not split into blocks of {block}",
            net.layer_count()
        )));
    }
    let blocks = net.layer_count() / block;
    let mut h = input.to_vec();
    for b in 0..blocks {
        let next = crate::cvnn::forward_range(net, &h, Mode::Hard, b * block..(b + 1) * block)?;
        if early_exit && next == h {
            return Ok((next, b + 1));
        }
        h = next;
    }
    Ok((h, blocks))
}

/// Runs the compiled network from `initial` and decodes the result.
pub fn network_final(
    net: &NetworkSpec,
    initial: &InfectionState,
    worm_count: usize,
    early_exit: bool,
) -> Result<InfectionState> {
    let x = encode_status(initial, worm_count)?;
    let (y, _) = forward_blocks(net, x.as_slice(), block_len(worm_count)?, early_exit)?;
    crate::state::decode_slice(&y, worm_count)
}

/// Simulator and network labels after one step of a mismatching trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDiff {
    pub step: usize,
    pub simulator: Vec<usize>,
    pub network: Vec<Option<usize>>,
}

/// A trial where the network disagreed with the simulator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub trial: usize,
    pub initial: Vec<usize>,
    pub expected: Vec<usize>,
    pub got: Vec<Option<usize>>,
    pub trace_diff: Vec<StepDiff>,
}

/// Outcome of an equivalence run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub trials: usize,
    pub mismatches: usize,
    /// Up to [`MAX_RECORDS`] mismatches in trial order.
    pub records: Vec<Mismatch>,
}

/// Most mismatch records kept in a report.
pub const MAX_RECORDS: usize = 100;

impl VerifyReport {
    pub fn first_counterexample(&self) -> Option<&Mismatch> {
        self.records.first()
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches == 0
    }

    /// One JSON object per line, one line per recorded mismatch.
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|m| serde_json::to_string(m).expect("serialisable") + "\n")
            .collect()
    }
}

/// Which initial states to try.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerifyMode {
    /// `trials` random states; trial `t` draws from stream `t` of `seed`.
    Random { trials: usize, seed: u64 },
    /// Every state, refusing more than `cap`.
    Exhaustive { cap: u128 },
}

/// Random initial state with a per-trial infection density.
pub fn random_initial<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> InfectionState {
    let density: f64 = rng.gen();
    let labels = (0..n)
        .map(|_| {
            if rng.gen::<f64>() < density {
                rng.gen_range(1..=k)
            } else {
                0
            }
        })
        .collect();
    InfectionState::new(labels, k).expect("labels in range")
}

fn check_one(
    graph: &WsnGraph,
    net: &NetworkSpec,
    block: usize,
    trial: usize,
    initial: &InfectionState,
) -> Result<Option<Mismatch>> {
    let k = graph.worm_count();
    let (expected, trace) = propagate(graph, initial)?;
    let x = encode_status(initial, k)?;
    let (y, _) = forward_blocks(net, x.as_slice(), block, false)?;
    let got = decode_lenient(&y, k);
    if got.iter().zip(expected.labels()).all(|(g, e)| *g == Some(*e)) {
        return Ok(None);
    }
    let mut trace_diff = Vec::new();
    let mut h = x.into_vec();
    for b in 0..net.layer_count() / block {
        h = crate::cvnn::forward_range(net, &h, Mode::Hard, b * block..(b + 1) * block)?;
        let sim = &trace.states[(b + 1).min(trace.converged_at)];
        let dec = decode_lenient(&h, k);
        let differs = dec.iter().zip(sim.labels()).any(|(g, e)| *g != Some(*e));
        if differs {
            trace_diff.push(StepDiff {
                step: b + 1,
                simulator: sim.labels().to_vec(),
                network: dec,
            });
        }
        if b + 1 > trace.converged_at && !differs {
            break;
        }
    }
    Ok(Some(Mismatch {
        trial,
        initial: initial.labels().to_vec(),
        expected: expected.labels().to_vec(),
        got,
        trace_diff,
    }))
}

/// Compares `net` against the simulator on `graph`.
pub fn verify_network(graph: &WsnGraph, net: &NetworkSpec, mode: VerifyMode) -> Result<VerifyReport> {
    let n = graph.node_count();
    let k = graph.worm_count();
    let block = block_len(k)?;
    if net.input_dim() != n * k || net.output_dim() != n * k {
        return Err(Error::Dimension {
            expected: n * k,
            got: net.input_dim(),
        });
    }
    let mut report = VerifyReport {
        trials: 0,
        mismatches: 0,
        records: Vec::new(),
    };
    let record = |report: &mut VerifyReport, m: Option<Mismatch>| {
        report.trials += 1;
        if let Some(m) = m {
            report.mismatches += 1;
            if report.records.len() < MAX_RECORDS {
                report.records.push(m);
            }
        }
    };
    match mode {
        VerifyMode::Random { trials, seed } => {
            if trials == 0 {
                return Err(Error::Precondition("at least one trial is required".into()));
            }
            for t in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let init = random_initial(n, k, &mut rng);
                let m = check_one(graph, net, block, t, &init)?;
                record(&mut report, m);
            }
        }
        VerifyMode::Exhaustive { cap } => {
            for (t, init) in enumerate_states(n, k, cap)?.enumerate() {
                let m = check_one(graph, net, block, t, &init)?;
                record(&mut report, m);
            }
        }
    }
    Ok(report)
}

/// Builds the global network for `graph` and verifies it with random states.
pub fn verify_equivalence(graph: &WsnGraph, trials: usize, rng_seed: u64) -> Result<VerifyReport> {
    let opts = CompileOptions {
        large: DEFAULT_LARGE.max(2.0 * large_lower_bound(graph) + 1.0),
        ..CompileOptions::default()
    };
    let net = build_global_network(graph, &opts)?;
    verify_network(graph, &net, VerifyMode::Random { trials, seed: rng_seed })
}

/// Exhaustive variant of [`verify_equivalence`].
pub fn verify_exhaustive(graph: &WsnGraph) -> Result<VerifyReport> {
    let opts = CompileOptions {
        large: DEFAULT_LARGE.max(2.0 * large_lower_bound(graph) + 1.0),
        ..CompileOptions::default()
    };
    let net = build_global_network(graph, &opts)?;
    verify_network(graph, &net, VerifyMode::Exhaustive { cap: DEFAULT_ORACLE_CAP })
}
