//! Reference simulator for competitive multi-worm propagation.

use crate::error::{Error, Result};
use crate::graph::{WormIndex, WsnGraph};
use crate::state::InfectionState;

/// Default cap on the number of states [`exhaustive_oracle`] will enumerate.
pub const DEFAULT_ORACLE_CAP: u128 = 1_000_000;

/// States visited by [`propagate`], from the initial state to the fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationTrace {
    pub states: Vec<InfectionState>,
    pub converged_at: usize,
}

impl PropagationTrace {
    pub fn final_state(&self) -> &InfectionState {
        &self.states[self.converged_at]
    }
}

/// Incoming weight per worm at `v`, summed over in-neighbors infected by that
/// worm in ascending source order. Index `k - 1` holds worm `k`.
pub fn worm_sums(graph: &WsnGraph, state: &InfectionState, v: usize) -> Vec<f64> {
    let k = graph.worm_count();
    let mut sums = vec![0.0f64; k];
    for &(u, e) in graph.topology().in_edges(v) {
        let label = state.label(u);
        if label != 0 {
            sums[label - 1] += graph.weight(e, label);
        }
    }
    sums
}

fn passes(sum: f64, threshold: f64) -> bool {
    sum >= threshold && sum > 0.0
}

fn check_state(graph: &WsnGraph, state: &InfectionState) -> Result<()> {
    state.check(graph.node_count(), graph.worm_count())
}

/// Worms whose incoming weight at innocent node `v` reaches its threshold.
///
/// A worm only qualifies when its incoming sum is strictly positive, so an
/// isolated node with a zero threshold is not infected from nowhere.
pub fn candidate_worms(
    graph: &WsnGraph,
    state: &InfectionState,
    v: usize,
) -> Result<Vec<WormIndex>> {
    check_state(graph, state)?;
    if v >= graph.node_count() {
        return Err(Error::Precondition(format!("node {v} out of range")));
    }
    if state.label(v) != 0 {
        return Err(Error::Precondition(format!(
            "node {v} is already infected by worm {}",
            state.label(v)
        )));
    }
    let sums = worm_sums(graph, state, v);
    let k = graph.worm_count();
    Ok((1..=k)
        .filter(|&w| passes(sums[w - 1], graph.threshold(v, w)))
        .map(|w| WormIndex::new(w, k).expect("in range"))
        .collect())
}

/// Picks the candidate with the largest incoming sum, preferring the larger
/// worm index on ties.
pub fn resolve_infection(
    graph: &WsnGraph,
    state: &InfectionState,
    v: usize,
    candidates: &[WormIndex],
) -> Result<WormIndex> {
    check_state(graph, state)?;
    if candidates.is_empty() {
        return Err(Error::Precondition("empty candidate set".into()));
    }
    if let Some(c) = candidates.iter().find(|c| c.get() > graph.worm_count()) {
        return Err(Error::Precondition(format!(
            "candidate {} exceeds worm count",
            c.get()
        )));
    }
    let sums = worm_sums(graph, state, v);
    Ok(argmax_large_index(candidates.iter().map(|c| (c.get(), sums[c.get() - 1])))
        .map(|w| WormIndex::new(w, graph.worm_count()).expect("in range"))
        .expect("nonempty"))
}

fn argmax_large_index(items: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (w, s) in items {
        best = match best {
            Some((bw, bs)) if s < bs || (s == bs && w < bw) => Some((bw, bs)),
            _ => Some((w, s)),
        };
    }
    best.map(|(w, _)| w)
}

/// Label innocent node `v` takes after one step, or 0.
fn next_label(graph: &WsnGraph, state: &InfectionState, v: usize) -> usize {
    let sums = worm_sums(graph, state, v);
    argmax_large_index(
        (1..=graph.worm_count())
            .filter(|&w| passes(sums[w - 1], graph.threshold(v, w)))
            .map(|w| (w, sums[w - 1])),
    )
    .unwrap_or(0)
}

/// One synchronous step: every stage-1 test reads `state` as given.
pub fn step(graph: &WsnGraph, state: &InfectionState) -> Result<InfectionState> {
    check_state(graph, state)?;
    Ok(step_unchecked(graph, state))
}

fn step_unchecked(graph: &WsnGraph, state: &InfectionState) -> InfectionState {
    let mut next = state.clone();
    for v in 0..graph.node_count() {
        if state.label(v) == 0 {
            next.set(v, next_label(graph, state, v));
        }
    }
    next
}

/// Runs [`step`] to a fixed point.
pub fn propagate(
    graph: &WsnGraph,
    initial: &InfectionState,
) -> Result<(InfectionState, PropagationTrace)> {
    check_state(graph, initial)?;
    let mut states = vec![initial.clone()];
    loop {
        let cur = states.last().expect("nonempty");
        let next = step_unchecked(graph, cur);
        if &next == cur {
            break;
        }
        states.push(next);
    }
    let converged_at = states.len() - 1;
    debug_assert!(converged_at <= graph.node_count());
    let final_state = states[converged_at].clone();
    Ok((
        final_state,
        PropagationTrace {
            states,
            converged_at,
        },
    ))
}

/// Number of label vectors over `n` nodes and `k` worms, if it fits in `u128`.
pub fn state_space_size(n: usize, k: usize) -> Option<u128> {
    let base = k as u128 + 1;
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.checked_mul(base)?;
    }
    Some(total)
}

/// Every label vector over `n` nodes and `k` worms, node 0 varying fastest.
pub fn enumerate_states(
    n: usize,
    k: usize,
    cap: u128,
) -> Result<impl Iterator<Item = InfectionState>> {
    let total = state_space_size(n, k).unwrap_or(u128::MAX);
    if total > cap {
        return Err(Error::TooLarge { states: total, cap });
    }
    let mut labels = vec![0usize; n];
    let mut remaining = total;
    Ok(std::iter::from_fn(move || {
        if remaining == 0 {
            return None;
        }
        remaining -= 1;
        let out = InfectionState::new(labels.clone(), k).expect("labels in range");
        for l in labels.iter_mut() {
            if *l < k {
                *l += 1;
                break;
            }
            *l = 0;
        }
        Some(out)
    }))
}

/// Final state for every possible initial state.
#[derive(Debug, Clone)]
pub struct ExhaustiveOracle {
    pub worm_count: usize,
    pub entries: Vec<(InfectionState, InfectionState)>,
}

impl ExhaustiveOracle {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Final state for `initial`, looked up by its mixed-radix code.
    pub fn get(&self, initial: &InfectionState) -> Option<&InfectionState> {
        let base = self.worm_count + 1;
        let mut idx = 0usize;
        for &l in initial.labels().iter().rev() {
            idx = idx.checked_mul(base)?.checked_add(l)?;
        }
        self.entries.get(idx).map(|(_, f)| f)
    }
}

/// Runs [`propagate`] on all `(K+1)^N` initial states, refusing above `cap`.
pub fn exhaustive_oracle(graph: &WsnGraph, cap: u128) -> Result<ExhaustiveOracle> {
    let entries = enumerate_states(graph.node_count(), graph.worm_count(), cap)?
        .map(|s| {
            let (f, _) = propagate(graph, &s)?;
            Ok((s, f))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExhaustiveOracle {
        worm_count: graph.worm_count(),
        entries,
    })
}
