use std::collections::{BTreeMap, BTreeSet};

use super::{CycleSpec, SignalError};
use crate::family::{Edge, ModeId};

/// A closed walk using every edge exactly once (Hierholzer). Successors are
/// visited in ascending order and the walk starts at the smallest vertex,
/// so the result depends only on the edge set.
pub fn eulerian_transition_cycle(edges: &BTreeSet<Edge>) -> Result<Vec<Edge>, SignalError> {
    let Some(first) = edges.iter().next() else {
        return Err(SignalError::NoEdges);
    };
    let mut adj: BTreeMap<ModeId, Vec<ModeId>> = BTreeMap::new();
    let mut in_deg: BTreeMap<ModeId, usize> = BTreeMap::new();
    for e in edges {
        adj.entry(e.from).or_default().push(e.to);
        adj.entry(e.to).or_default();
        *in_deg.entry(e.to).or_insert(0) += 1;
    }
    for (&v, succ) in &adj {
        let i = in_deg.get(&v).copied().unwrap_or(0);
        if i != succ.len() {
            return Err(SignalError::NotEulerian { vertex: v, in_degree: i, out_degree: succ.len() });
        }
    }

    let mut next: BTreeMap<ModeId, usize> = adj.keys().map(|&v| (v, 0)).collect();
    let mut stack = vec![first.from];
    let mut walk = Vec::with_capacity(edges.len() + 1);
    while let Some(&v) = stack.last() {
        let i = next.get_mut(&v).expect("vertex in adjacency");
        if let Some(&u) = adj[&v].get(*i) {
            *i += 1;
            stack.push(u);
        } else {
            walk.push(v);
            stack.pop();
        }
    }
    if walk.len() != edges.len() + 1 {
        return Err(SignalError::Disconnected);
    }
    walk.reverse();
    Ok(walk.windows(2).map(|w| Edge { from: w[0], to: w[1] }).collect())
}

/// Turns a closed walk into a cycle that dwells `dwell[p]` in each visited
/// mode `p`.
pub fn cycle_from_circuit(circuit: &[Edge], dwell: &BTreeMap<ModeId, f64>) -> Result<CycleSpec, SignalError> {
    let entries = circuit
        .iter()
        .map(|e| dwell.get(&e.from).map(|&d| (e.from, d)).ok_or(SignalError::MissingDwell(e.from)))
        .collect::<Result<Vec<_>, _>>()?;
    CycleSpec::new(entries)
}
