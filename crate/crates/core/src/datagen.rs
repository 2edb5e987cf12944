//! Graph, parameter and sample-pool generation.

use std::path::Path;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::graph::{worm_levels, ModelParams, Topology, WsnGraph};
use crate::io::Lines;
use crate::propagation::propagate;
use crate::state::InfectionState;

/// An initial state and the final state it propagates to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePair {
    pub initial: InfectionState,
    pub final_state: InfectionState,
}

/// Ordered sample pairs plus how they were produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePool {
    pub graph_id: String,
    pub worm_count: usize,
    pub num_seeds: usize,
    pub master_seed: u64,
    pub pairs: Vec<SamplePair>,
}

impl SamplePool {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn with_pairs(&self, pairs: Vec<SamplePair>) -> SamplePool {
        SamplePool {
            graph_id: self.graph_id.clone(),
            worm_count: self.worm_count,
            num_seeds: self.num_seeds,
            master_seed: self.master_seed,
            pairs,
        }
    }
}

/// Directed Erdős–Rényi graph: every ordered pair `u ≠ v` is an edge with
/// probability `p`, independently.
pub fn gen_er_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Topology> {
    if n == 0 {
        return Err(Error::Precondition("graph needs at least one node".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Precondition(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Topology::new(n, edges)
}

/// Thresholds drawn from U[0,1]; the weight of `u → v` for worm `k` is
/// `1 / (|N_v| + k)`.
pub fn sample_model_params<R: Rng + ?Sized>(
    topology: &Topology,
    worm_count: usize,
    rng: &mut R,
) -> Result<ModelParams> {
    worm_levels(worm_count)?;
    let thresholds = (0..topology.node_count() * worm_count)
        .map(|_| rng.gen::<f64>())
        .collect();
    Ok(ModelParams {
        worm_count,
        thresholds,
        weights: prior_weights(topology, worm_count),
    })
}

/// The deterministic edge weights `1 / (|N_v| + k)`.
pub fn prior_weights(topology: &Topology, worm_count: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(topology.edge_count() * worm_count);
    for &(_, dst) in topology.edges() {
        let deg = topology.in_degree(dst) as f64;
        w.extend((1..=worm_count).map(|k| 1.0 / (deg + k as f64)));
    }
    w
}

/// Generator for pair `index` of a pool with the given master seed.
pub fn pair_rng(master_seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index as u64);
    rng
}

/// Random initial state with exactly `num_seeds` infected nodes.
pub fn random_seed_state<R: Rng + ?Sized>(
    n: usize,
    worm_count: usize,
    num_seeds: usize,
    rng: &mut R,
) -> Result<InfectionState> {
    if num_seeds == 0 || num_seeds > n {
        return Err(Error::Precondition(format!(
            "seed count {num_seeds} outside 1..={n}"
        )));
    }
    let mut labels = vec![0; n];
    for v in sample(rng, n, num_seeds).into_iter() {
        labels[v] = rng.gen_range(1..=worm_count);
    }
    InfectionState::new(labels, worm_count)
}

/// `count` pairs whose initial states seed `num_seeds` distinct nodes with
/// uniformly chosen worms. Pair `i` draws from [`pair_rng`]`(master_seed, i)`.
pub fn gen_sample_pool(
    graph: &WsnGraph,
    count: usize,
    num_seeds: usize,
    master_seed: u64,
) -> Result<SamplePool> {
    let n = graph.node_count();
    let k = graph.worm_count();
    let pairs = (0..count)
        .map(|i| {
            let mut rng = pair_rng(master_seed, i);
            let initial = random_seed_state(n, k, num_seeds, &mut rng)?;
            let (final_state, _) = propagate(graph, &initial)?;
            Ok(SamplePair {
                initial,
                final_state,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SamplePool {
        graph_id: crate::io::graph_id(graph),
        worm_count: k,
        num_seeds,
        master_seed,
        pairs,
    })
}

/// Disjoint uniformly chosen train and test subsets.
pub fn split_pool(
    pool: &SamplePool,
    train_size: usize,
    test_size: usize,
    seed: u64,
) -> Result<(SamplePool, SamplePool)> {
    if train_size
        .checked_add(test_size)
        .map_or(true, |t| t > pool.len())
    {
        return Err(Error::Size(format!(
            "{train_size} + {test_size} samples requested from a pool of {}",
            pool.len()
        )));
    }
    let mut idx: Vec<usize> = (0..pool.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pick = |r: &[usize]| r.iter().map(|&i| pool.pairs[i].clone()).collect();
    Ok((
        pool.with_pairs(pick(&idx[..train_size])),
        pool.with_pairs(pick(&idx[train_size..train_size + test_size])),
    ))
}

/// Indices of pairs whose stored final state differs from the simulator's.
pub fn audit_pool(graph: &WsnGraph, pool: &SamplePool) -> Result<Vec<usize>> {
    let mut bad = Vec::new();
    for (i, p) in pool.pairs.iter().enumerate() {
        let (f, _) = propagate(graph, &p.initial)?;
        if f != p.final_state {
            bad.push(i);
        }
    }
    Ok(bad)
}

/// How a sensor file becomes edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensorRule {
    /// Use the `link` records as directed edges.
    EdgeList,
    /// Connect both directions of every pair within `radius` of each other.
    Distance { radius: f64 },
}

/// A loaded sensor topology and its number of weakly connected components.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorGraph {
    pub topology: Topology,
    pub components: usize,
}

/// Parses a sensor file:
///
/// ```text
/// wsn-sensors 1 <N>
/// pos <id> <x> <y>
/// link <src> <dst>
/// ```
pub fn parse_sensor_graph(text: &str, rule: SensorRule) -> Result<SensorGraph> {
    let mut lines = Lines::new(text);
    let (ln, h) = lines.next_fields()?;
    if h.first() != Some(&"wsn-sensors") || h.len() != 3 {
        return Err(parse_err(ln, "expected `wsn-sensors 1 <N>`"));
    }
    if h[1] != "1" {
        return Err(Error::Version {
            kind: "sensor file",
            version: h[1].to_string(),
        });
    }
    let n: usize = lines.num(h[2], ln)?;
    if n == 0 {
        return Err(parse_err(ln, "sensor file declares no nodes"));
    }
    let mut pos: Vec<Option<(f64, f64)>> = Vec::new();
    let mut links = Vec::new();
    while let Some((ln, f)) = lines.next_line() {
        match f[0] {
            "pos" if f.len() == 4 => {
                let id: usize = lines.num(f[1], ln)?;
                if id >= n {
                    return Err(parse_err(ln, format!("sensor {id} out of range")));
                }
                if pos.is_empty() {
                    pos = vec![None; n];
                }
                if pos[id].is_some() {
                    return Err(parse_err(ln, format!("sensor {id} positioned twice")));
                }
                pos[id] = Some((lines.float(f[2], ln)?, lines.float(f[3], ln)?));
            }
            "link" if f.len() == 3 => {
                links.push((lines.num(f[1], ln)?, lines.num(f[2], ln)?));
            }
            _ => return Err(parse_err(ln, "expected `pos id x y` or `link src dst`")),
        }
    }
    let edges = match rule {
        SensorRule::EdgeList => links,
        SensorRule::Distance { radius } => {
            if !(radius.is_finite() && radius >= 0.0) {
                return Err(Error::Config(format!("radius {radius} must be non-negative")));
            }
            if pos.len() != n || pos.iter().any(|p| p.is_none()) {
                return Err(parse_err(ln, "distance rule needs a position for every sensor"));
            }
            let pts: Vec<(f64, f64)> = pos.into_iter().map(|p| p.expect("checked")).collect();
            let mut e = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    let d = (pts[u].0 - pts[v].0).hypot(pts[u].1 - pts[v].1);
                    if u != v && d <= radius {
                        e.push((u, v));
                    }
                }
            }
            e
        }
    };
    let topology = Topology::new(n, edges).map_err(|e| parse_err(0, e.to_string()))?;
    let components = topology.weak_components();
    Ok(SensorGraph {
        topology,
        components,
    })
}

/// Reads and parses a sensor file from disk.
pub fn load_sensor_graph(path: &Path, rule: SensorRule) -> Result<SensorGraph> {
    parse_sensor_graph(&std::fs::read_to_string(path)?, rule)
}

/// The bundled synthetic 54-sensor deployment.
pub const SENSOR54: &str = include_str!("../data/sensor54.txt");
