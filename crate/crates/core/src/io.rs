//! Versioned text formats for graphs, states, sample pools and traces.
//!
//! Blank lines and lines starting with `#` are ignored everywhere. Floats are
//! written in their shortest round-trip form.
//!
//! ```text
//! wsn-graph 1 <N> <K>
//! node <v> <θ_v^1> … <θ_v^K>          N lines, v = 0..N-1 in order
//! edge <src> <dst> <w^1> … <w^K>       one line per edge
//!
//! wsn-state 1 <N> <K>
//! labels <l_0> … <l_{N-1}>             one or more lines
//!
//! wsn-pool 1 <graph id> <K> <Q> <seeds> <master seed>
//! init <labels…>                       Q init/final line pairs
//! final <labels…>
//!
//! wsn-trace 1 <N> <K> <T>
//! <t> <labels…>                        T+1 lines
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::datagen::{SamplePair, SamplePool};
use crate::error::{parse_err, Error, Result};
use crate::graph::{ModelParams, Topology, WsnGraph};
use crate::propagation::PropagationTrace;
use crate::state::InfectionState;

/// Line cursor that skips blanks and comments and tracks 1-based numbers.
pub(crate) struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    pub(crate) fn next_line(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            self.last = i + 1;
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Some((i + 1, t.split_whitespace().collect()));
        }
        None
    }

    pub(crate) fn next_fields(&mut self) -> Result<(usize, Vec<&'a str>)> {
        self.next_line()
            .ok_or_else(|| parse_err(self.last + 1, "unexpected end of input"))
    }

    pub(crate) fn keyed_count(&mut self, key: &str) -> Result<usize> {
        let (ln, f) = self.next_fields()?;
        if f.len() != 2 || f[0] != key {
            return Err(parse_err(ln, format!("expected `{key} <count>`")));
        }
        self.num(f[1], ln)
    }

    pub(crate) fn num<T: FromStr>(&self, tok: &str, line: usize) -> Result<T> {
        tok.parse()
            .map_err(|_| parse_err(line, format!("invalid integer {tok:?}")))
    }

    pub(crate) fn float(&self, tok: &str, line: usize) -> Result<f64> {
        match tok.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(parse_err(line, format!("invalid number {tok:?}"))),
        }
    }

    pub(crate) fn expect_eof(&mut self) -> Result<()> {
        match self.next_line() {
            None => Ok(()),
            Some((ln, _)) => Err(parse_err(ln, "trailing content")),
        }
    }
}

fn header<'a>(
    lines: &mut Lines<'a>,
    magic: &str,
    kind: &'static str,
    arity: usize,
) -> Result<(usize, Vec<&'a str>)> {
    let (ln, f) = lines.next_fields()?;
    if f.first() != Some(&magic) {
        return Err(parse_err(ln, format!("missing {magic} header")));
    }
    if f.len() >= 2 && f[1] != "1" {
        return Err(Error::Version {
            kind,
            version: f[1].to_string(),
        });
    }
    if f.len() != arity {
        return Err(parse_err(ln, format!("{magic} header needs {} fields", arity - 1)));
    }
    Ok((ln, f))
}

fn write_floats(s: &mut String, xs: &[f64]) {
    for x in xs {
        let _ = write!(s, " {x:?}");
    }
}

fn write_labels(s: &mut String, labels: &[usize]) {
    for l in labels {
        let _ = write!(s, " {l}");
    }
}

/// Serialises a graph together with its parameters.
pub fn write_graph(g: &WsnGraph) -> String {
    let k = g.worm_count();
    let p = g.params();
    let mut s = format!("wsn-graph 1 {} {}\n", g.node_count(), k);
    for v in 0..g.node_count() {
        let _ = write!(s, "node {v}");
        write_floats(&mut s, &p.thresholds[v * k..(v + 1) * k]);
        s.push('\n');
    }
    for (e, &(src, dst)) in g.topology().edges().iter().enumerate() {
        let _ = write!(s, "edge {src} {dst}");
        write_floats(&mut s, &p.weights[e * k..(e + 1) * k]);
        s.push('\n');
    }
    s
}

/// Parses the format written by [`write_graph`].
pub fn parse_graph(text: &str) -> Result<WsnGraph> {
    let mut lines = Lines::new(text);
    let (ln, h) = header(&mut lines, "wsn-graph", "graph", 4)?;
    let n: usize = lines.num(h[2], ln)?;
    let k: usize = lines.num(h[3], ln)?;
    if n == 0 || k == 0 {
        return Err(parse_err(ln, "node and worm counts must be positive"));
    }
    let mut thresholds = Vec::new();
    for v in 0..n {
        let (ln, f) = lines.next_fields()?;
        if k.checked_add(2) != Some(f.len()) || f[0] != "node" {
            return Err(parse_err(ln, format!("expected `node {v}` with {k} thresholds")));
        }
        if lines.num::<usize>(f[1], ln)? != v {
            return Err(parse_err(ln, format!("nodes must be listed in order, expected {v}")));
        }
        for t in &f[2..] {
            thresholds.push(lines.float(t, ln)?);
        }
    }
    let mut raw = Vec::new();
    while let Some((ln, f)) = lines.next_line() {
        if k.checked_add(3) != Some(f.len()) || f[0] != "edge" {
            return Err(parse_err(ln, format!("expected `edge src dst` with {k} weights")));
        }
        let src: usize = lines.num(f[1], ln)?;
        let dst: usize = lines.num(f[2], ln)?;
        let w = f[3..]
            .iter()
            .map(|t| lines.float(t, ln))
            .collect::<Result<Vec<_>>>()?;
        raw.push((ln, src, dst, w));
    }
    let topology = Topology::new(n, raw.iter().map(|(_, s, d, _)| (*s, *d)).collect())
        .map_err(|e| parse_err(0, e.to_string()))?;
    let mut weights = vec![0.0; topology.edge_count() * k];
    for (_, s, d, w) in &raw {
        let e = topology.edge_index(*s, *d).expect("edge present");
        weights[e * k..(e + 1) * k].copy_from_slice(w);
    }
    WsnGraph::new(
        topology,
        ModelParams {
            worm_count: k,
            thresholds,
            weights,
        },
    )
    .map_err(|e| parse_err(0, e.to_string()))
}

/// Hex SHA-256 of the canonical graph serialisation.
pub fn graph_id(g: &WsnGraph) -> String {
    let digest = Sha256::digest(write_graph(g).as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Serialises one or more states sharing `N` and `K`.
pub fn write_states(states: &[InfectionState], worm_count: usize) -> String {
    let n = states.first().map_or(0, |s| s.len());
    let mut s = format!("wsn-state 1 {n} {worm_count}\n");
    for st in states {
        s.push_str("labels");
        write_labels(&mut s, st.labels());
        s.push('\n');
    }
    s
}

fn parse_labels(lines: &Lines, f: &[&str], n: usize, k: usize, ln: usize) -> Result<InfectionState> {
    if f.len() != n {
        return Err(parse_err(ln, format!("expected {n} labels, found {}", f.len())));
    }
    let labels = f
        .iter()
        .map(|t| lines.num::<usize>(t, ln))
        .collect::<Result<Vec<_>>>()?;
    InfectionState::new(labels, k).map_err(|e| parse_err(ln, e.to_string()))
}

/// Parses a state file; returns `K` and every state in it (at least one).
pub fn parse_states(text: &str) -> Result<(usize, Vec<InfectionState>)> {
    let mut lines = Lines::new(text);
    let (ln, h) = header(&mut lines, "wsn-state", "state", 4)?;
    let n: usize = lines.num(h[2], ln)?;
    let k: usize = lines.num(h[3], ln)?;
    let mut out = Vec::new();
    while let Some((ln, f)) = lines.next_line() {
        if f[0] != "labels" {
            return Err(parse_err(ln, "expected `labels`"));
        }
        out.push(parse_labels(&lines, &f[1..], n, k, ln)?);
    }
    if out.is_empty() {
        return Err(parse_err(ln, "state file holds no states"));
    }
    Ok((k, out))
}

/// Serialises a sample pool.
pub fn write_pool(pool: &SamplePool) -> String {
    let mut s = format!(
        "wsn-pool 1 {} {} {} {} {}\n",
        pool.graph_id,
        pool.worm_count,
        pool.pairs.len(),
        pool.num_seeds,
        pool.master_seed
    );
    for p in &pool.pairs {
        s.push_str("init");
        write_labels(&mut s, p.initial.labels());
        s.push_str("\nfinal");
        write_labels(&mut s, p.final_state.labels());
        s.push('\n');
    }
    s
}

/// Parses the format written by [`write_pool`].
pub fn parse_pool(text: &str) -> Result<SamplePool> {
    let mut lines = Lines::new(text);
    let (ln, h) = header(&mut lines, "wsn-pool", "pool", 7)?;
    let graph_id = h[2].to_string();
    let k: usize = lines.num(h[3], ln)?;
    let q: usize = lines.num(h[4], ln)?;
    let num_seeds: usize = lines.num(h[5], ln)?;
    let master_seed: u64 = lines.num(h[6], ln)?;
    let mut pairs = Vec::new();
    let mut n = None;
    for _ in 0..q {
        let (ln, a) = lines.next_fields()?;
        if a[0] != "init" {
            return Err(parse_err(ln, "expected `init`"));
        }
        let width = *n.get_or_insert(a.len() - 1);
        let initial = parse_labels(&lines, &a[1..], width, k, ln)?;
        let (ln, b) = lines.next_fields()?;
        if b[0] != "final" {
            return Err(parse_err(ln, "expected `final`"));
        }
        let final_state = parse_labels(&lines, &b[1..], width, k, ln)?;
        pairs.push(SamplePair {
            initial,
            final_state,
        });
    }
    lines.expect_eof()?;
    Ok(SamplePool {
        graph_id,
        worm_count: k,
        num_seeds,
        master_seed,
        pairs,
    })
}

/// One line per step: `t` followed by the labels at that step.
pub fn write_trace(trace: &PropagationTrace, worm_count: usize) -> String {
    let n = trace.states.first().map_or(0, |s| s.len());
    let mut s = format!("wsn-trace 1 {n} {worm_count} {}\n", trace.converged_at);
    for (t, st) in trace.states.iter().enumerate() {
        let _ = write!(s, "{t}");
        write_labels(&mut s, st.labels());
        s.push('\n');
    }
    s
}
