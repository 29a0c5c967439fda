//! Product-preserving ternary-tree mappings.
//!
//! A [`MappingTree`] places one fermionic mode on each node. Every node owns a
//! physical qubit and three labelled slots; a slot either holds a child or is a
//! leg. Walking from the root to a leg and writing the slot label on each
//! visited qubit yields a Majorana string. Pairing the X- and Y-slot strings of
//! each node (each followed by its maximal Z descent) gives the two Majorana
//! operators of that node's mode, and the left-over all-Z string is dropped.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fermion::{expand_generator, FermionError, FermionicAnsatz, MajoranaMonomial};
use crate::graph::HardwareGraph;
use crate::pauli::{Letter, PauliString, PauliSum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MappingError {
    #[error("mapping tree has no nodes")]
    Empty,
    #[error("node id {0} out of range")]
    NodeOutOfRange(usize),
    #[error("node {0} has more than one parent")]
    MultipleParents(usize),
    #[error("node {0} is not reachable from the root")]
    Unreachable(usize),
    #[error("root node {0} has a parent")]
    RootHasParent(usize),
    #[error("qubit {0} used by more than one node")]
    DuplicateQubit(usize),
    #[error("modes must be a permutation of 0..{0}")]
    BadModes(usize),
    #[error("node ids must be 0..{0} without gaps")]
    BadIds(usize),
    #[error("mapping has {mapping} modes but the operator needs {expected}")]
    ModeCount { mapping: usize, expected: usize },
    #[error("majorana index {index} out of range for {n_modes} modes")]
    MajoranaOutOfRange { index: usize, n_modes: usize },
    #[error("mode {0} number operator is not -Z type; pairing is broken")]
    NotProductPreserving(usize),
    #[error("occupation system is singular; pairing is broken")]
    SingularOccupation,
    #[error("mapped generator {0} is not anti-hermitian")]
    NotAntiHermitian(usize),
    #[error("graph with {available} vertices cannot host {needed} modes")]
    GraphTooSmall { needed: usize, available: usize },
    #[error("no connected ternary subtree with {0} nodes found in the graph")]
    NoSubtree(usize),
    #[error("qubit {qubit} is outside the {n_qubits}-qubit device")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("invalid mapping json: {0}")]
    Json(String),
    #[error(transparent)]
    Fermion(#[from] FermionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Slot {
    X,
    Y,
    Z,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::X, Slot::Y, Slot::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> Letter {
        match self {
            Slot::X => Letter::X,
            Slot::Y => Letter::Y,
            Slot::Z => Letter::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Braid {
    Plus,
    Minus,
}

impl Braid {
    pub fn flipped(self) -> Braid {
        match self {
            Braid::Plus => Braid::Minus,
            Braid::Minus => Braid::Plus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub qubit: usize,
    pub mode: usize,
    pub braid: Braid,
    /// Child node id per slot, indexed by [`Slot::index`]; `None` is a leg.
    pub children: [Option<usize>; 3],
}

impl Node {
    pub fn leaf(qubit: usize, mode: usize) -> Node {
        Node {
            qubit,
            mode,
            braid: Braid::Plus,
            children: [None; 3],
        }
    }

    pub fn child(&self, s: Slot) -> Option<usize> {
        self.children[s.index()]
    }

    pub fn out_degree(&self) -> usize {
        self.children.iter().flatten().count()
    }

    pub fn free_slots(&self) -> impl Iterator<Item = Slot> + '_ {
        Slot::ALL.into_iter().filter(|s| self.children[s.index()].is_none())
    }
}

/// A ternary tree with one node per fermionic mode. Node ids are indices into
/// `nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MappingTree {
    pub nodes: Vec<Node>,
    pub root: usize,
}

/// Majorana operator `k` is `sign · strings[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaAssignment {
    pub strings: Vec<PauliString>,
    pub signs: Vec<i8>,
}

impl MajoranaAssignment {
    pub fn n_majoranas(&self) -> usize {
        self.strings.len()
    }

    /// The signed string for Majorana `k`, sign folded into the phase.
    pub fn operator(&self, k: usize) -> PauliString {
        if self.signs[k] < 0 {
            self.strings[k].negated()
        } else {
            self.strings[k].clone()
        }
    }
}

/// One mapped ansatz generator `exp(theta · sum)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedGenerator {
    pub theta: f64,
    pub sum: PauliSum,
}

impl MappingTree {
    pub fn new(nodes: Vec<Node>, root: usize) -> Result<Self, MappingError> {
        let t = MappingTree { nodes, root };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), MappingError> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(MappingError::Empty);
        }
        if self.root >= n {
            return Err(MappingError::NodeOutOfRange(self.root));
        }
        let mut has_parent = vec![false; n];
        for node in &self.nodes {
            for &c in node.children.iter().flatten() {
                if c >= n {
                    return Err(MappingError::NodeOutOfRange(c));
                }
                if has_parent[c] {
                    return Err(MappingError::MultipleParents(c));
                }
                has_parent[c] = true;
            }
        }
        if has_parent[self.root] {
            return Err(MappingError::RootHasParent(self.root));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            seen[v] = true;
            stack.extend(self.nodes[v].children.iter().flatten());
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(MappingError::Unreachable(v));
        }
        let mut qubits = BTreeSet::new();
        for node in &self.nodes {
            if !qubits.insert(node.qubit) {
                return Err(MappingError::DuplicateQubit(node.qubit));
            }
        }
        let mut modes: Vec<usize> = self.nodes.iter().map(|x| x.mode).collect();
        modes.sort_unstable();
        if modes.iter().enumerate().any(|(i, &m)| i != m) {
            return Err(MappingError::BadModes(n));
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.nodes.len()
    }

    /// Width of the generated strings: highest qubit id plus one.
    pub fn qubit_width(&self) -> usize {
        self.nodes.iter().map(|n| n.qubit).max().map_or(0, |q| q + 1)
    }

    pub fn qubits(&self) -> Vec<usize> {
        let mut q: Vec<usize> = self.nodes.iter().map(|n| n.qubit).collect();
        q.sort_unstable();
        q
    }

    pub fn node_of_mode(&self, mode: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.mode == mode)
    }

    pub fn node_of_qubit(&self, qubit: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.qubit == qubit)
    }

    pub fn parent(&self, v: usize) -> Option<(usize, Slot)> {
        self.nodes.iter().enumerate().find_map(|(p, node)| {
            Slot::ALL
                .into_iter()
                .find(|s| node.child(*s) == Some(v))
                .map(|s| (p, s))
        })
    }

    /// Parent ids for all nodes (`None` for the root).
    pub fn parents(&self) -> Vec<Option<(usize, Slot)>> {
        let mut p = vec![None; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for s in Slot::ALL {
                if let Some(c) = node.child(s) {
                    p[c] = Some((i, s));
                }
            }
        }
        p
    }

    pub fn n_legs(&self) -> usize {
        self.nodes.iter().map(|n| 3 - n.out_degree()).sum()
    }

    /// Tree edges as qubit pairs `(min, max)`.
    pub fn qubit_edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for node in &self.nodes {
            for &c in node.children.iter().flatten() {
                let (a, b) = (node.qubit, self.nodes[c].qubit);
                e.push((a.min(b), a.max(b)));
            }
        }
        e.sort_unstable();
        e
    }

    /// True when every tree edge is a device edge.
    pub fn is_subgraph_of(&self, g: &HardwareGraph) -> bool {
        self.nodes.iter().all(|n| n.qubit < g.n_vertices())
            && self.qubit_edges().iter().all(|&(a, b)| g.has_edge(a, b))
    }

    /// Errors unless every qubit id is below `n_qubits`.
    pub fn check_fits_width(&self, n_qubits: usize) -> Result<(), MappingError> {
        match self.nodes.iter().find(|n| n.qubit >= n_qubits) {
            Some(n) => Err(MappingError::QubitOutOfRange {
                qubit: n.qubit,
                n_qubits,
            }),
            None => Ok(()),
        }
    }

    /// Label-independent key: two trees with equal keys are the same mapping.
    pub fn canonical_key(&self) -> Vec<u32> {
        let mut rows: Vec<[u32; 6]> = self
            .nodes
            .iter()
            .map(|n| {
                let c = |s: Slot| n.child(s).map_or(u32::MAX, |c| self.nodes[c].qubit as u32);
                [
                    n.qubit as u32,
                    n.mode as u32,
                    (n.braid == Braid::Minus) as u32,
                    c(Slot::X),
                    c(Slot::Y),
                    c(Slot::Z),
                ]
            })
            .collect();
        rows.sort_unstable();
        let mut key = vec![self.nodes[self.root].qubit as u32];
        key.extend(rows.iter().flatten());
        key
    }

    /// Shape-only key (qubits and child structure, ignoring modes and braids).
    pub fn shape_key(&self) -> Vec<u32> {
        let mut rows: Vec<[u32; 4]> = self
            .nodes
            .iter()
            .map(|n| {
                let c = |s: Slot| n.child(s).map_or(u32::MAX, |c| self.nodes[c].qubit as u32);
                [n.qubit as u32, c(Slot::X), c(Slot::Y), c(Slot::Z)]
            })
            .collect();
        rows.sort_unstable();
        let mut key = vec![self.nodes[self.root].qubit as u32];
        key.extend(rows.iter().flatten());
        key
    }

    /// All root-to-leg strings in depth-first order (slots X, Y, Z).
    pub fn strings(&self) -> Vec<PauliString> {
        let width = self.qubit_width();
        let mut out = Vec::with_capacity(2 * self.nodes.len() + 1);
        fn walk(t: &MappingTree, v: usize, prefix: &PauliString, out: &mut Vec<PauliString>) {
            let node = &t.nodes[v];
            for s in Slot::ALL {
                let mut p = prefix.clone();
                p.set(node.qubit, s.letter());
                match node.child(s) {
                    Some(c) => walk(t, c, &p, out),
                    None => out.push(p),
                }
            }
        }
        walk(self, self.root, &PauliString::identity(width), &mut out);
        out
    }

    /// Prefix string acting on the ancestors of `v` (not on `v` itself).
    fn prefix(&self, v: usize, parents: &[Option<(usize, Slot)>]) -> PauliString {
        let mut p = PauliString::identity(self.qubit_width());
        let mut cur = v;
        while let Some((par, s)) = parents[cur] {
            p.set(self.nodes[par].qubit, s.letter());
            cur = par;
        }
        p
    }

    /// Adds `Z` on the maximal Z descent starting at `start` (if any).
    fn add_z_descent(&self, p: &mut PauliString, start: Option<usize>) {
        let mut cur = start;
        while let Some(c) = cur {
            p.set(self.nodes[c].qubit, Letter::Z);
            cur = self.nodes[c].child(Slot::Z);
        }
    }

    /// Majorana strings per mode, with braids applied.
    pub fn pair_strings(&self) -> MajoranaAssignment {
        let n = self.nodes.len();
        let parents = self.parents();
        let mut strings = vec![PauliString::identity(self.qubit_width()); 2 * n];
        let mut signs = vec![1i8; 2 * n];
        for (v, node) in self.nodes.iter().enumerate() {
            let prefix = self.prefix(v, &parents);
            let mut sx = prefix.clone();
            sx.set(node.qubit, Letter::X);
            self.add_z_descent(&mut sx, node.child(Slot::X));
            let mut sy = prefix;
            sy.set(node.qubit, Letter::Y);
            self.add_z_descent(&mut sy, node.child(Slot::Y));
            let j = node.mode;
            match node.braid {
                Braid::Plus => {
                    strings[2 * j] = sx;
                    strings[2 * j + 1] = sy;
                }
                Braid::Minus => {
                    strings[2 * j] = sy;
                    signs[2 * j] = -1;
                    strings[2 * j + 1] = sx;
                }
            }
        }
        MajoranaAssignment { strings, signs }
    }

    /// Maps `coeff · m_{i_0} m_{i_1} …` to `c · P` with `P` phase-free.
    pub fn map_monomial(&self, mono: &MajoranaMonomial) -> Result<(Complex64, PauliString), MappingError> {
        self.map_monomial_with(&self.pair_strings(), mono)
    }

    pub fn map_monomial_with(
        &self,
        assignment: &MajoranaAssignment,
        mono: &MajoranaMonomial,
    ) -> Result<(Complex64, PauliString), MappingError> {
        let n = self.nodes.len();
        let mut p = PauliString::identity(self.qubit_width());
        for &k in &mono.indices {
            if k >= 2 * n {
                return Err(MappingError::MajoranaOutOfRange { index: k, n_modes: n });
            }
            p = p.multiply(&assignment.operator(k)).expect("equal widths");
        }
        Ok((mono.coeff * p.phase_factor(), p.unsigned()))
    }

    /// Maps every generator of the ansatz; each mapped sum is anti-Hermitian.
    pub fn map_ansatz(&self, a: &FermionicAnsatz) -> Result<Vec<MappedGenerator>, MappingError> {
        if a.n_modes != self.n_modes() {
            return Err(MappingError::ModeCount {
                mapping: self.n_modes(),
                expected: a.n_modes,
            });
        }
        let assignment = self.pair_strings();
        let width = self.qubit_width();
        a.generators
            .iter()
            .enumerate()
            .map(|(idx, g)| {
                let monos = expand_generator(&g.kind, a.n_modes)?;
                let mut sum = PauliSum::zero(width);
                for m in &monos {
                    let (c, p) = self.map_monomial_with(&assignment, m)?;
                    sum.add_term(c, p).expect("equal widths");
                }
                sum.simplify();
                if !sum.is_anti_hermitian(1e-9) {
                    return Err(MappingError::NotAntiHermitian(idx));
                }
                Ok(MappedGenerator { theta: g.theta, sum })
            })
            .collect()
    }

    /// Qubit sets `D_j` with `i m_{2j} m_{2j+1} ↦ -Z_{D_j}`; errors if the sign
    /// or type is wrong.
    pub fn number_operator_supports(&self) -> Result<Vec<Vec<usize>>, MappingError> {
        let assignment = self.pair_strings();
        (0..self.n_modes())
            .map(|j| {
                let mono = MajoranaMonomial::new(vec![2 * j, 2 * j + 1], Complex64::new(0.0, 1.0));
                let (c, p) = self.map_monomial_with(&assignment, &mono)?;
                if !p.is_z_type() || (c - Complex64::new(-1.0, 0.0)).norm() > 1e-12 {
                    return Err(MappingError::NotProductPreserving(j));
                }
                Ok(p.support())
            })
            .collect()
    }

    /// Computational basis state (one bit per qubit up to [`Self::qubit_width`])
    /// encoding the Fock state with the given occupations.
    pub fn occupation_to_bitstring(&self, occ: &[u8]) -> Result<Vec<u8>, MappingError> {
        let n = self.n_modes();
        if occ.len() != n {
            return Err(FermionError::OccupationLength {
                expected: n,
                got: occ.len(),
            }
            .into());
        }
        if let Some(&b) = occ.iter().find(|&&b| b > 1) {
            return Err(FermionError::BadOccupation(b).into());
        }
        let supports = self.number_operator_supports()?;
        let cols = self.qubits();
        // augmented rows: bits over `cols`, last entry is the right-hand side
        let mut rows: Vec<Vec<u8>> = supports
            .iter()
            .zip(occ)
            .map(|(s, &o)| {
                let mut r: Vec<u8> = cols.iter().map(|q| s.contains(q) as u8).collect();
                r.push(o);
                r
            })
            .collect();
        let mut pivot_row = 0;
        let mut pivots = Vec::new();
        for col in 0..n {
            let Some(r) = (pivot_row..n).find(|&r| rows[r][col] == 1) else {
                return Err(MappingError::SingularOccupation);
            };
            rows.swap(pivot_row, r);
            for r in 0..n {
                if r != pivot_row && rows[r][col] == 1 {
                    let src = rows[pivot_row].clone();
                    rows[r].iter_mut().zip(&src).for_each(|(a, b)| *a ^= b);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        let mut bits = vec![0u8; self.qubit_width()];
        for (r, &col) in pivots.iter().enumerate() {
            bits[cols[col]] = rows[r][n];
        }
        Ok(bits)
    }

    /// JSON mapping file text.
    pub fn to_json(&self) -> String {
        let file = MappingFile {
            n_modes: self.nodes.len(),
            root: self.root,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeRecord {
                    id,
                    qubit: n.qubit,
                    mode: n.mode,
                    braid: match n.braid {
                        Braid::Plus => "+".into(),
                        Braid::Minus => "-".into(),
                    },
                    children: ChildRecord {
                        x: n.children[0],
                        y: n.children[1],
                        z: n.children[2],
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("mapping serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MappingError> {
        let file: MappingFile = serde_json::from_str(text).map_err(|e| MappingError::Json(e.to_string()))?;
        let n = file.nodes.len();
        if file.n_modes != n {
            return Err(MappingError::Json(format!(
                "n_modes is {} but {} nodes are listed",
                file.n_modes, n
            )));
        }
        let mut nodes = vec![None; n];
        for rec in file.nodes {
            if rec.id >= n || nodes[rec.id].is_some() {
                return Err(MappingError::BadIds(n));
            }
            let braid = match rec.braid.as_str() {
                "+" => Braid::Plus,
                "-" => Braid::Minus,
                other => return Err(MappingError::Json(format!("braid must be \"+\" or \"-\", got {other:?}"))),
            };
            nodes[rec.id] = Some(Node {
                qubit: rec.qubit,
                mode: rec.mode,
                braid,
                children: [rec.children.x, rec.children.y, rec.children.z],
            });
        }
        let nodes = nodes.into_iter().map(|n| n.expect("all ids present")).collect();
        MappingTree::new(nodes, file.root)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ChildRecord {
    #[serde(rename = "X")]
    x: Option<usize>,
    #[serde(rename = "Y")]
    y: Option<usize>,
    #[serde(rename = "Z")]
    z: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    qubit: usize,
    mode: usize,
    braid: String,
    children: ChildRecord,
}

#[derive(Debug, Serialize, Deserialize)]
struct MappingFile {
    n_modes: usize,
    root: usize,
    nodes: Vec<NodeRecord>,
}

/// Jordan-Wigner: a Z-linked chain, mode and qubit `j` at depth `j`.
pub fn jw_tree(n: usize) -> Result<MappingTree, MappingError> {
    if n == 0 {
        return Err(MappingError::Empty);
    }
    let nodes = (0..n)
        .map(|j| {
            let mut node = Node::leaf(j, j);
            if j + 1 < n {
                node.children[Slot::Z.index()] = Some(j + 1);
            }
            node
        })
        .collect();
    MappingTree::new(nodes, 0)
}

/// Connected-on-device start tree: breadth-first from the highest-degree
/// vertex, children filling X, Y, Z in discovery order, modes in BFS order.
pub fn bonsai_tree(g: &HardwareGraph, n: usize) -> Result<MappingTree, MappingError> {
    if n == 0 {
        return Err(MappingError::Empty);
    }
    if g.n_vertices() < n {
        return Err(MappingError::GraphTooSmall {
            needed: n,
            available: g.n_vertices(),
        });
    }
    let start = (0..g.n_vertices())
        .max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))
        .expect("graph is nonempty");
    let mut node_of = vec![None; g.n_vertices()];
    let mut nodes = vec![Node::leaf(start, 0)];
    node_of[start] = Some(0);
    let mut head = 0;
    while head < nodes.len() && nodes.len() < n {
        let v = nodes[head].qubit;
        for &w in g.neighbors(v) {
            if nodes.len() == n {
                break;
            }
            if node_of[w].is_some() {
                continue;
            }
            let Some(slot) = nodes[head].free_slots().next() else {
                break;
            };
            let id = nodes.len();
            nodes[head].children[slot.index()] = Some(id);
            nodes.push(Node::leaf(w, id));
            node_of[w] = Some(id);
        }
        head += 1;
    }
    if nodes.len() < n {
        return Err(MappingError::NoSubtree(n));
    }
    MappingTree::new(nodes, 0)
}

fn relabel_randomly<R: Rng + ?Sized>(nodes: &mut [Node], rng: &mut R) {
    let mut modes: Vec<usize> = (0..nodes.len()).collect();
    modes.shuffle(rng);
    for (node, m) in nodes.iter_mut().zip(modes) {
        node.mode = m;
        node.braid = if rng.gen_bool(0.5) { Braid::Minus } else { Braid::Plus };
    }
}

/// Random mapping on qubits `0..n`: nodes attach to uniformly chosen free
/// slots, then qubits, modes and braids are shuffled.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MappingTree, MappingError> {
    if n == 0 {
        return Err(MappingError::Empty);
    }
    let mut nodes = vec![Node::leaf(0, 0)];
    for id in 1..n {
        let free: Vec<(usize, Slot)> = nodes
            .iter()
            .enumerate()
            .flat_map(|(p, node)| node.free_slots().map(move |s| (p, s)))
            .collect();
        let (p, s) = free[rng.gen_range(0..free.len())];
        nodes[p].children[s.index()] = Some(id);
        nodes.push(Node::leaf(id, id));
    }
    let mut qubits: Vec<usize> = (0..n).collect();
    qubits.shuffle(rng);
    for (node, q) in nodes.iter_mut().zip(qubits) {
        node.qubit = q;
    }
    relabel_randomly(&mut nodes, rng);
    MappingTree::new(nodes, 0)
}

/// Random mapping whose tree is a connected subtree of `g`.
pub fn random_subtree<R: Rng + ?Sized>(
    g: &HardwareGraph,
    n: usize,
    rng: &mut R,
) -> Result<MappingTree, MappingError> {
    if n == 0 {
        return Err(MappingError::Empty);
    }
    if g.n_vertices() < n {
        return Err(MappingError::GraphTooSmall {
            needed: n,
            available: g.n_vertices(),
        });
    }
    'attempt: for _ in 0..100 {
        let start = rng.gen_range(0..g.n_vertices());
        let mut used = vec![false; g.n_vertices()];
        used[start] = true;
        let mut nodes = vec![Node::leaf(start, 0)];
        for id in 1..n {
            let mut options = Vec::new();
            for (p, node) in nodes.iter().enumerate() {
                for s in node.free_slots() {
                    for &w in g.neighbors(node.qubit) {
                        if !used[w] {
                            options.push((p, s, w));
                        }
                    }
                }
            }
            if options.is_empty() {
                continue 'attempt;
            }
            let (p, s, w) = options[rng.gen_range(0..options.len())];
            nodes[p].children[s.index()] = Some(id);
            nodes.push(Node::leaf(w, id));
            used[w] = true;
        }
        relabel_randomly(&mut nodes, rng);
        return MappingTree::new(nodes, 0);
    }
    Err(MappingError::NoSubtree(n))
}
