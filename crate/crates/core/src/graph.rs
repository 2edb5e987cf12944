//! Directed sensor graphs with per-worm thresholds and edge weights.

use crate::error::{Error, Result};

/// A worm label in `1..=K`. Label 0 is reserved for innocent nodes and never
/// wrapped in this type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WormIndex(usize);

impl WormIndex {
    pub fn new(value: usize, worm_count: usize) -> Result<Self> {
        if value == 0 || value > worm_count {
            return Err(Error::Precondition(format!(
                "worm index {value} outside 1..={worm_count}"
            )));
        }
        Ok(WormIndex(value))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// `log2(K)` when `K` is a power of two.
pub fn worm_levels(worm_count: usize) -> Result<usize> {
    if worm_count >= 2 && worm_count.is_power_of_two() {
        Ok(worm_count.trailing_zeros() as usize)
    } else {
        Err(Error::NotPowerOfTwo(worm_count))
    }
}

/// Graph structure without any worm parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    /// Per destination: `(source, edge index)` sorted by source.
    in_adj: Vec<Vec<(usize, usize)>>,
}

impl Topology {
    /// Builds a topology. Edges are stored sorted by `(src, dst)`.
    pub fn new(node_count: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge {} -> {}",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut in_adj = vec![Vec::new(); node_count];
        for (idx, &(src, dst)) in edges.iter().enumerate() {
            if src >= node_count || dst >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {src} -> {dst} references a node outside 0..{node_count}"
                )));
            }
            if src == dst {
                return Err(Error::InvalidGraph(format!("self-loop on node {src}")));
            }
            in_adj[dst].push((src, idx));
        }
        // Edges are sorted by source, so each in-list already is.
        Ok(Topology {
            node_count,
            edges,
            in_adj,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// In-neighbors of `v` as `(source, edge index)`, ascending by source.
    pub fn in_edges(&self, v: usize) -> &[(usize, usize)] {
        &self.in_adj[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn edge_index(&self, src: usize, dst: usize) -> Option<usize> {
        self.in_adj
            .get(dst)?
            .binary_search_by_key(&src, |&(s, _)| s)
            .ok()
            .map(|i| self.in_adj[dst][i].1)
    }

    /// Number of weakly connected components.
    pub fn weak_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.node_count).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        (0..self.node_count)
            .filter(|&v| find(&mut parent, v) == v)
            .count()
    }
}

/// Trainable worm parameters: thresholds `θ_v^k` and edge weights `w_(u,v)^k`.
///
/// Both are stored flat with worm index fastest: threshold of node `v` for
/// worm `k` sits at `v * K + (k - 1)`, and the weight of edge `e` at
/// `e * K + (k - 1)` where `e` follows the topology's edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub worm_count: usize,
    pub thresholds: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ModelParams {
    pub fn threshold(&self, v: usize, k: usize) -> f64 {
        self.thresholds[v * self.worm_count + k - 1]
    }

    pub fn weight(&self, edge: usize, k: usize) -> f64 {
        self.weights[edge * self.worm_count + k - 1]
    }

    /// Clamps every parameter to be non-negative.
    pub fn project_nonnegative(&mut self) {
        for x in self.thresholds.iter_mut().chain(self.weights.iter_mut()) {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.thresholds
            .iter()
            .chain(self.weights.iter())
            .all(|&x| x >= 0.0)
    }
}

/// A sensor network carrying per-worm thresholds and edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WsnGraph {
    topology: Topology,
    params: ModelParams,
}

impl WsnGraph {
    pub fn new(topology: Topology, params: ModelParams) -> Result<Self> {
        let k = params.worm_count;
        if k == 0 {
            return Err(Error::InvalidGraph("worm count must be positive".into()));
        }
        let n = topology.node_count();
        if params.thresholds.len() != n * k {
            return Err(Error::Dimension {
                expected: n * k,
                got: params.thresholds.len(),
            });
        }
        if params.weights.len() != topology.edge_count() * k {
            return Err(Error::Dimension {
                expected: topology.edge_count() * k,
                got: params.weights.len(),
            });
        }
        if let Some(x) = params
            .thresholds
            .iter()
            .chain(params.weights.iter())
            .find(|x| !x.is_finite() || **x < 0.0)
        {
            return Err(Error::InvalidGraph(format!(
                "parameter {x} is not a finite non-negative number"
            )));
        }
        Ok(WsnGraph { topology, params })
    }

    /// Convenience constructor from explicit edge records.
    pub fn from_parts(
        node_count: usize,
        worm_count: usize,
        thresholds: Vec<Vec<f64>>,
        edges: Vec<(usize, usize, Vec<f64>)>,
    ) -> Result<Self> {
        if thresholds.len() != node_count {
            return Err(Error::Dimension {
                expected: node_count,
                got: thresholds.len(),
            });
        }
        let topology = Topology::new(
            node_count,
            edges.iter().map(|(s, d, _)| (*s, *d)).collect(),
        )?;
        let mut weights = vec![0.0; topology.edge_count() * worm_count];
        for (s, d, w) in &edges {
            if w.len() != worm_count {
                return Err(Error::Dimension {
                    expected: worm_count,
                    got: w.len(),
                });
            }
            let e = topology.edge_index(*s, *d).expect("edge was just inserted");
            weights[e * worm_count..(e + 1) * worm_count].copy_from_slice(w);
        }
        let mut flat = Vec::with_capacity(node_count * worm_count);
        for t in &thresholds {
            if t.len() != worm_count {
                return Err(Error::Dimension {
                    expected: worm_count,
                    got: t.len(),
                });
            }
            flat.extend_from_slice(t);
        }
        WsnGraph::new(
            topology,
            ModelParams {
                worm_count,
                thresholds: flat,
                weights,
            },
        )
    }

    pub fn node_count(&self) -> usize {
        self.topology.node_count()
    }

    pub fn worm_count(&self) -> usize {
        self.params.worm_count
    }

    pub fn edge_count(&self) -> usize {
        self.topology.edge_count()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn threshold(&self, v: usize, k: usize) -> f64 {
        self.params.threshold(v, k)
    }

    pub fn weight(&self, edge: usize, k: usize) -> f64 {
        self.params.weight(edge, k)
    }

    /// Same topology with different parameters.
    pub fn with_params(&self, params: ModelParams) -> Result<Self> {
        WsnGraph::new(self.topology.clone(), params)
    }

    /// Largest total incoming weight of any node for any worm.
    pub fn max_in_weight_sum(&self) -> f64 {
        let k = self.worm_count();
        let mut best = 0.0f64;
        for v in 0..self.node_count() {
            for worm in 1..=k {
                let s: f64 = self
                    .topology
                    .in_edges(v)
                    .iter()
                    .map(|&(_, e)| self.weight(e, worm))
                    .sum();
                best = best.max(s);
            }
        }
        best
    }

    pub fn max_threshold(&self) -> f64 {
        self.params.thresholds.iter().copied().fold(0.0, f64::max)
    }
}
