//! Exhaustive enumeration of small mapping spaces: counts against closed-form
//! upper bounds, and reachability of the whole space under the move set.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::anneal::{apply_move, enabled_moves, legal_moves, SearchMode};
use crate::graph::HardwareGraph;
use crate::mapping::{bonsai_tree, Braid, MappingError, MappingTree, Node};

pub const MAX_ENUM_MODES: usize = 4;
pub const MAX_ENUM_QUBITS: usize = 8;
const MAX_REACH_STATES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnumerateError {
    #[error("enumeration limited to {MAX_ENUM_MODES} modes and {MAX_ENUM_QUBITS} qubits (got {n_modes} and {n_qubits})")]
    TooLarge { n_modes: usize, n_qubits: usize },
    #[error("reachability space has {0} states, above the limit of {MAX_REACH_STATES}")]
    TooManyStates(usize),
    #[error("need at least one mode and no more modes than qubits")]
    BadSize,
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// `n! (2n)! C(Q, n)`: bound on mappings of `n` modes into `Q` qubits.
pub fn mapping_bound(n: usize, q: usize) -> u128 {
    factorial(n) * factorial(2 * n) * binomial(q, n)
}

/// `Q 3^n d^n (n-1)! 2^n n!`: bound on mappings whose tree is a subgraph of a
/// device with maximum degree `d`.
pub fn bounded_degree_bound(n: usize, q: usize, d: usize) -> u128 {
    let p = |b: u128| b.pow(n as u32);
    q as u128 * p(3) * p(d as u128) * factorial(n.saturating_sub(1)) * p(2) * factorial(n)
}

/// The looser form `Q (6d)^n (n!)^2`.
pub fn bounded_degree_bound_loose(n: usize, q: usize, d: usize) -> u128 {
    q as u128 * (6 * d as u128).pow(n as u32) * factorial(n).pow(2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub n_modes: usize,
    pub n_qubits: usize,
    pub max_degree: usize,
    /// Distinct labelled trees on any `n` of the qubits.
    pub trees: u128,
    pub mappings: u128,
    pub bound: u128,
    /// Distinct labelled trees that are subgraphs of the device.
    pub connected_trees: u128,
    pub connected_mappings: u128,
    pub bounded_degree_bound: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachabilityReport {
    pub n_modes: usize,
    pub n_qubits: usize,
    pub total: usize,
    pub reached: usize,
    pub fraction: f64,
}

fn check_limits(n: usize, g: &HardwareGraph) -> Result<(), EnumerateError> {
    if n > MAX_ENUM_MODES || g.n_vertices() > MAX_ENUM_QUBITS {
        return Err(EnumerateError::TooLarge {
            n_modes: n,
            n_qubits: g.n_vertices(),
        });
    }
    if n == 0 || n > g.n_vertices() {
        return Err(EnumerateError::BadSize);
    }
    Ok(())
}

/// All distinct tree shapes (qubit placement plus slot structure) with `n`
/// nodes; `connected` restricts tree edges to device edges. Modes follow node
/// order and braids are `+`.
pub fn enumerate_shapes(g: &HardwareGraph, n: usize, connected: bool) -> Vec<MappingTree> {
    fn grow(
        g: &HardwareGraph,
        n: usize,
        connected: bool,
        nodes: &mut Vec<Node>,
        used: &mut [bool],
        seen: &mut HashSet<Vec<u32>>,
        out: &mut Vec<MappingTree>,
    ) {
        if nodes.len() == n {
            let t = MappingTree {
                nodes: nodes.clone(),
                root: 0,
            };
            if seen.insert(t.shape_key()) {
                out.push(t);
            }
            return;
        }
        let id = nodes.len();
        for p in 0..nodes.len() {
            for s in nodes[p].free_slots().collect::<Vec<_>>() {
                let candidates: Vec<usize> = if connected {
                    g.neighbors(nodes[p].qubit).to_vec()
                } else {
                    (0..g.n_vertices()).collect()
                };
                for q in candidates {
                    if used[q] {
                        continue;
                    }
                    used[q] = true;
                    nodes[p].children[s.index()] = Some(id);
                    nodes.push(Node::leaf(q, id));
                    grow(g, n, connected, nodes, used, seen, out);
                    nodes.pop();
                    nodes[p].children[s.index()] = None;
                    used[q] = false;
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for r in 0..g.n_vertices() {
        let mut used = vec![false; g.n_vertices()];
        used[r] = true;
        let mut nodes = vec![Node::leaf(r, 0)];
        grow(g, n, connected, &mut nodes, &mut used, &mut seen, &mut out);
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every labelling (modes and braids) of every shape.
pub fn enumerate_mappings(shapes: &[MappingTree]) -> Vec<MappingTree> {
    let Some(n) = shapes.first().map(|t| t.nodes.len()) else {
        return Vec::new();
    };
    let perms = permutations(n);
    let mut out = Vec::with_capacity((shapes.len() * perms.len()) << n);
    for shape in shapes {
        for perm in &perms {
            for braids in 0..1u32 << n {
                let mut t = shape.clone();
                for (i, node) in t.nodes.iter_mut().enumerate() {
                    node.mode = perm[i];
                    node.braid = if braids >> i & 1 == 1 { Braid::Minus } else { Braid::Plus };
                }
                out.push(t);
            }
        }
    }
    out
}

pub fn count(g: &HardwareGraph, n: usize) -> Result<CountReport, EnumerateError> {
    check_limits(n, g)?;
    let labels = factorial(n) << n;
    let trees = enumerate_shapes(g, n, false).len() as u128;
    let connected_trees = enumerate_shapes(g, n, true).len() as u128;
    let q = g.n_vertices();
    let d = g.max_degree();
    Ok(CountReport {
        n_modes: n,
        n_qubits: q,
        max_degree: d,
        trees,
        mappings: trees * labels,
        bound: mapping_bound(n, q),
        connected_trees,
        connected_mappings: connected_trees * labels,
        bounded_degree_bound: bounded_degree_bound(n, q, d),
    })
}

/// Breadth-first search over connectivity-preserving moves from the bonsai
/// tree, compared against the enumerated set of on-device mappings.
pub fn reachability(g: &HardwareGraph, n: usize) -> Result<ReachabilityReport, EnumerateError> {
    check_limits(n, g)?;
    let shapes = enumerate_shapes(g, n, true);
    let total_states = (shapes.len() * factorial(n) as usize) << n;
    if total_states > MAX_REACH_STATES {
        return Err(EnumerateError::TooManyStates(total_states));
    }
    let all: HashSet<Vec<u32>> = enumerate_mappings(&shapes).iter().map(|t| t.canonical_key()).collect();
    let start = bonsai_tree(g, n)?;
    let mut seen = HashSet::from([start.canonical_key()]);
    let mut queue = VecDeque::from([start]);
    let kinds = enabled_moves(SearchMode::Cp, true);
    while let Some(t) = queue.pop_front() {
        for &k in &kinds {
            for mv in legal_moves(&t, g, SearchMode::Cp, k) {
                let next = apply_move(&t, mv).expect("legal moves apply");
                if seen.insert(next.canonical_key()) {
                    queue.push_back(next);
                }
            }
        }
    }
    let reached = seen.intersection(&all).count();
    Ok(ReachabilityReport {
        n_modes: n,
        n_qubits: g.n_vertices(),
        total: all.len(),
        reached,
        fraction: reached as f64 / all.len() as f64,
    })
}
