//! Simulated annealing over mapping trees.
//!
//! Five moves act on a [`MappingTree`]: leaf moves, root changes, Pauli
//! shuffles, mode swaps and braid flips. Each step picks a move kind uniformly
//! from the enabled set, then one legal outcome of that kind uniformly. A kind
//! without legal outcomes wastes the step.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{compiled_cost, pauli_cost, Connectivity, CostError};
use crate::fermion::FermionicAnsatz;
use crate::graph::HardwareGraph;
use crate::mapping::{bonsai_tree, jw_tree, MappingError, MappingTree, Slot};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnealError {
    #[error("invalid anneal config: {0}")]
    BadConfig(String),
    #[error("no legal move exists for this mapping and search mode")]
    NoLegalMove,
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("mapping tree is not a subgraph of the device")]
    NotOnDevice,
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Any tree on a fully connected device.
    Free,
    /// Trees stay subgraphs of the device.
    Cp,
    /// Any tree, costed on the device.
    Ncp,
    /// Jordan-Wigner tree with permuted modes.
    Ms,
}

impl SearchMode {
    pub fn name(self) -> &'static str {
        match self {
            SearchMode::Free => "free",
            SearchMode::Cp => "cp",
            SearchMode::Ncp => "ncp",
            SearchMode::Ms => "ms",
        }
    }
}

impl std::str::FromStr for SearchMode {
    type Err = AnnealError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free" => Ok(SearchMode::Free),
            "cp" => Ok(SearchMode::Cp),
            "ncp" => Ok(SearchMode::Ncp),
            "ms" => Ok(SearchMode::Ms),
            _ => Err(AnnealError::BadConfig(format!("unknown search mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnealCost {
    Pauli,
    Compiled,
}

impl std::str::FromStr for AnnealCost {
    type Err = AnnealError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pauli" => Ok(AnnealCost::Pauli),
            "compiled" => Ok(AnnealCost::Compiled),
            _ => Err(AnnealError::BadConfig(format!("unknown cost kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealConfig {
    pub iterations: u64,
    /// Starting temperature; `None` picks `max(1, initial_cost / 10)`.
    pub initial_temp: Option<f64>,
    pub cooling_factor: f64,
    pub seed: u64,
    pub restarts: usize,
    pub search_mode: SearchMode,
    pub cost_kind: AnnealCost,
    pub enable_braiding: bool,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            iterations: 20_000,
            initial_temp: None,
            cooling_factor: 0.995,
            seed: 0,
            restarts: 5,
            search_mode: SearchMode::Cp,
            cost_kind: AnnealCost::Pauli,
            enable_braiding: true,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<(), AnnealError> {
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(AnnealError::BadConfig(format!(
                "cooling_factor must be in (0, 1), got {}",
                self.cooling_factor
            )));
        }
        if let Some(t) = self.initial_temp {
            if !(t > 0.0 && t.is_finite()) {
                return Err(AnnealError::BadConfig(format!("initial_temp must be positive, got {t}")));
            }
        }
        if self.restarts == 0 {
            return Err(AnnealError::BadConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Leaf,
    RootChange,
    PauliShuffle,
    ModeSwap,
    BraidFlip,
}

impl MoveKind {
    pub const ALL: [MoveKind; 5] = [
        MoveKind::Leaf,
        MoveKind::RootChange,
        MoveKind::PauliShuffle,
        MoveKind::ModeSwap,
        MoveKind::BraidFlip,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Move kinds available in a search mode.
pub fn enabled_moves(mode: SearchMode, enable_braiding: bool) -> Vec<MoveKind> {
    match mode {
        SearchMode::Ms => vec![MoveKind::ModeSwap],
        _ => MoveKind::ALL
            .into_iter()
            .filter(|&k| enable_braiding || k != MoveKind::BraidFlip)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Detach leaf `v` and hang it under `target` at `slot`, on `qubit`.
    Leaf {
        v: usize,
        target: usize,
        slot: Slot,
        qubit: usize,
    },
    /// Make `v` the root; the old parent of `v` takes `slot` of `v`.
    RootChange { v: usize, slot: Slot },
    /// Replace `v`'s slot contents.
    PauliShuffle { v: usize, children: [Option<usize>; 3] },
    ModeSwap { a: usize, b: usize },
    BraidFlip { v: usize },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::Leaf { .. } => MoveKind::Leaf,
            Move::RootChange { .. } => MoveKind::RootChange,
            Move::PauliShuffle { .. } => MoveKind::PauliShuffle,
            Move::ModeSwap { .. } => MoveKind::ModeSwap,
            Move::BraidFlip { .. } => MoveKind::BraidFlip,
        }
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Every legal outcome of one move kind.
pub fn legal_moves(m: &MappingTree, g: &HardwareGraph, mode: SearchMode, kind: MoveKind) -> Vec<Move> {
    let n = m.nodes.len();
    let mut out = Vec::new();
    match kind {
        MoveKind::Leaf => {
            let parents = m.parents();
            let mut used = vec![false; g.n_vertices().max(m.qubit_width())];
            for node in &m.nodes {
                used[node.qubit] = true;
            }
            for v in 0..n {
                if v == m.root || m.nodes[v].out_degree() != 0 {
                    continue;
                }
                let parent = parents[v].map(|(p, _)| p);
                for w in 0..n {
                    if w == v || Some(w) == parent {
                        continue;
                    }
                    for slot in m.nodes[w].free_slots() {
                        if mode == SearchMode::Cp {
                            for &q in g.neighbors(m.nodes[w].qubit) {
                                if !used[q] || q == m.nodes[v].qubit {
                                    out.push(Move::Leaf {
                                        v,
                                        target: w,
                                        slot,
                                        qubit: q,
                                    });
                                }
                            }
                        } else {
                            out.push(Move::Leaf {
                                v,
                                target: w,
                                slot,
                                qubit: m.nodes[v].qubit,
                            });
                        }
                    }
                }
            }
        }
        MoveKind::RootChange => {
            for v in 0..n {
                if v != m.root && m.nodes[v].out_degree() <= 2 {
                    for slot in m.nodes[v].free_slots() {
                        out.push(Move::RootChange { v, slot });
                    }
                }
            }
        }
        MoveKind::PauliShuffle => {
            for (v, node) in m.nodes.iter().enumerate() {
                if node.out_degree() == 0 {
                    continue;
                }
                let mut seen = vec![node.children];
                for p in PERMUTATIONS {
                    let children = [node.children[p[0]], node.children[p[1]], node.children[p[2]]];
                    if !seen.contains(&children) {
                        seen.push(children);
                        out.push(Move::PauliShuffle { v, children });
                    }
                }
            }
        }
        MoveKind::ModeSwap => {
            for a in 0..n {
                for b in a + 1..n {
                    out.push(Move::ModeSwap { a, b });
                }
            }
        }
        MoveKind::BraidFlip => out.extend((0..n).map(|v| Move::BraidFlip { v })),
    }
    out
}

/// Applies a move, re-checking the tree invariants.
pub fn apply_move(m: &MappingTree, mv: Move) -> Result<MappingTree, AnnealError> {
    let mut t = m.clone();
    let n = t.nodes.len();
    let bad = |msg: String| Err(AnnealError::IllegalMove(msg));
    match mv {
        Move::Leaf { v, target, slot, qubit } => {
            if v >= n || target >= n || v == target {
                return bad(format!("leaf move {v} -> {target}"));
            }
            if v == t.root || t.nodes[v].out_degree() != 0 {
                return bad(format!("node {v} is not a leaf"));
            }
            if t.nodes[target].child(slot).is_some() {
                // a full slot would give the target a fourth tree edge
                return bad(format!("slot {slot:?} of node {target} is occupied"));
            }
            let (p, ps) = t.parent(v).expect("non-root has a parent");
            t.nodes[p].children[ps.index()] = None;
            t.nodes[target].children[slot.index()] = Some(v);
            t.nodes[v].qubit = qubit;
        }
        Move::RootChange { v, slot } => {
            if v >= n || v == t.root || t.nodes[v].child(slot).is_some() {
                return bad(format!("root change to {v} via {slot:?}"));
            }
            let parents = t.parents();
            let mut path = vec![v];
            while let Some((p, _)) = parents[*path.last().unwrap()] {
                path.push(p);
            }
            // path = v, p1, ..., root; reverse each parent link
            for i in 0..path.len() - 1 {
                let (child, parent) = (path[i], path[i + 1]);
                let freed = parents[child].expect("on path").1;
                t.nodes[parent].children[freed.index()] = None;
                let s = if i == 0 {
                    slot
                } else {
                    parents[path[i - 1]].expect("on path").1
                };
                t.nodes[child].children[s.index()] = Some(parent);
            }
            t.root = v;
        }
        Move::PauliShuffle { v, children } => {
            if v >= n {
                return bad(format!("shuffle of node {v}"));
            }
            let mut a: Vec<_> = t.nodes[v].children.to_vec();
            let mut b: Vec<_> = children.to_vec();
            a.sort();
            b.sort();
            if a != b {
                return bad(format!("shuffle of node {v} changes its children"));
            }
            t.nodes[v].children = children;
        }
        Move::ModeSwap { a, b } => {
            if a >= n || b >= n || a == b {
                return bad(format!("mode swap {a}, {b}"));
            }
            let ma = t.nodes[a].mode;
            t.nodes[a].mode = t.nodes[b].mode;
            t.nodes[b].mode = ma;
        }
        Move::BraidFlip { v } => {
            if v >= n {
                return bad(format!("braid flip of node {v}"));
            }
            t.nodes[v].braid = t.nodes[v].braid.flipped();
        }
    }
    t.validate()?;
    Ok(t)
}

/// Draws one move: kind uniformly from the enabled set, then an outcome
/// uniformly. `Ok(None)` when the drawn kind has no legal outcome.
pub fn propose_move<R: Rng + ?Sized>(
    m: &MappingTree,
    g: &HardwareGraph,
    mode: SearchMode,
    enable_braiding: bool,
    rng: &mut R,
) -> Result<Option<(MoveKind, MappingTree)>, AnnealError> {
    let kinds = enabled_moves(mode, enable_braiding);
    let kind = kinds[rng.gen_range(0..kinds.len())];
    let moves = legal_moves(m, g, mode, kind);
    if moves.is_empty() {
        if kinds.iter().all(|&k| legal_moves(m, g, mode, k).is_empty()) {
            return Err(AnnealError::NoLegalMove);
        }
        return Ok(None);
    }
    let mv = moves[rng.gen_range(0..moves.len())];
    Ok(Some((kind, apply_move(m, mv)?)))
}

/// Metropolis rule: always accept improvements, otherwise accept with
/// probability `exp(-delta / temp)`.
pub fn accept<R: Rng + ?Sized>(delta: f64, temp: f64, rng: &mut R) -> bool {
    delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnealResult {
    #[serde(skip)]
    pub best_mapping: MappingTree,
    pub best_cost: usize,
    pub initial_cost: usize,
    pub best_restart: usize,
    /// `(iteration, cost of the current state)` for the winning restart,
    /// starting with `(0, initial_cost)`.
    pub cost_trace: Vec<(u64, usize)>,
    /// Accepted moves per kind, indexed by [`MoveKind::index`].
    pub accepted_moves: [u64; 5],
}

/// Start tree for a search mode.
pub fn initial_mapping(g: &HardwareGraph, n_modes: usize, mode: SearchMode) -> Result<MappingTree, AnnealError> {
    let t = match mode {
        SearchMode::Free | SearchMode::Ms => jw_tree(n_modes)?,
        SearchMode::Cp | SearchMode::Ncp => bonsai_tree(g, n_modes)?,
    };
    t.check_fits_width(g.n_vertices())?;
    Ok(t)
}

/// Cost used by the search: free mode counts as fully connected, the other
/// modes use Steiner trees on the device.
pub struct Objective<'a> {
    ansatz: &'a FermionicAnsatz,
    graph: HardwareGraph,
    connectivity: Connectivity,
    kind: AnnealCost,
}

impl<'a> Objective<'a> {
    pub fn new(ansatz: &'a FermionicAnsatz, g: &HardwareGraph, mode: SearchMode, kind: AnnealCost) -> Result<Self, AnnealError> {
        let (graph, connectivity) = match mode {
            SearchMode::Free => (
                HardwareGraph::complete(g.n_vertices()).map_err(|e| AnnealError::BadConfig(e.to_string()))?,
                Connectivity::Full,
            ),
            _ => (g.clone(), Connectivity::Limited),
        };
        Ok(Objective {
            ansatz,
            graph,
            connectivity,
            kind,
        })
    }

    pub fn cost(&self, m: &MappingTree) -> Result<usize, AnnealError> {
        Ok(match self.kind {
            AnnealCost::Pauli => {
                let mapped = m.map_ansatz(self.ansatz)?;
                pauli_cost(&mapped, &self.graph, m, self.connectivity)?.total_cnots
            }
            AnnealCost::Compiled => compiled_cost(self.ansatz, m, &self.graph)?.total_cnots,
        })
    }
}

struct Chain {
    best: MappingTree,
    best_cost: usize,
    trace: Vec<(u64, usize)>,
    accepted: [u64; 5],
}

fn run_chain(
    objective: &Objective,
    g: &HardwareGraph,
    cfg: &AnnealConfig,
    start: &MappingTree,
    start_cost: usize,
    restart: usize,
) -> Result<Chain, AnnealError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let t0 = cfg.initial_temp.unwrap_or((start_cost as f64 / 10.0).max(1.0));
    let mut cur = start.clone();
    let mut cur_cost = start_cost;
    let mut chain = Chain {
        best: start.clone(),
        best_cost: start_cost,
        trace: Vec::with_capacity(cfg.iterations as usize + 1),
        accepted: [0; 5],
    };
    chain.trace.push((0, start_cost));
    let mut temp = t0;
    for k in 1..=cfg.iterations {
        if let Some((kind, cand)) = propose_move(&cur, g, cfg.search_mode, cfg.enable_braiding, &mut rng)? {
            let c = objective.cost(&cand)?;
            if accept(c as f64 - cur_cost as f64, temp, &mut rng) {
                cur = cand;
                cur_cost = c;
                chain.accepted[kind.index()] += 1;
                if c < chain.best_cost {
                    chain.best_cost = c;
                    chain.best = cur.clone();
                }
            }
        }
        chain.trace.push((k, cur_cost));
        temp *= cfg.cooling_factor;
    }
    Ok(chain)
}

/// Searches for a low-cost mapping of `a` onto `g`.
pub fn treespile(a: &FermionicAnsatz, g: &HardwareGraph, cfg: &AnnealConfig) -> Result<AnnealResult, AnnealError> {
    let start = initial_mapping(g, a.n_modes, cfg.search_mode)?;
    treespile_from(a, g, cfg, &start)
}

/// As [`treespile`] but from a given start mapping.
pub fn treespile_from(
    a: &FermionicAnsatz,
    g: &HardwareGraph,
    cfg: &AnnealConfig,
    start: &MappingTree,
) -> Result<AnnealResult, AnnealError> {
    cfg.validate()?;
    a.validate().map_err(MappingError::from)?;
    start.validate()?;
    start.check_fits_width(g.n_vertices())?;
    if cfg.search_mode == SearchMode::Cp && !start.is_subgraph_of(g) {
        return Err(AnnealError::NotOnDevice);
    }
    let objective = Objective::new(a, g, cfg.search_mode, cfg.cost_kind)?;
    let initial_cost = objective.cost(start)?;
    let chains: Vec<Result<Chain, AnnealError>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_chain(&objective, g, cfg, start, initial_cost, r))
        .collect();
    let mut best: Option<(usize, Chain)> = None;
    for (r, chain) in chains.into_iter().enumerate() {
        let chain = chain?;
        if best.as_ref().is_none_or(|(_, b)| chain.best_cost < b.best_cost) {
            best = Some((r, chain));
        }
    }
    let (best_restart, chain) = best.expect("at least one restart");
    Ok(AnnealResult {
        best_mapping: chain.best,
        best_cost: chain.best_cost,
        initial_cost,
        best_restart,
        cost_trace: chain.trace,
        accepted_moves: chain.accepted,
    })
}
