//! Steiner trees over a [`HardwareGraph`].
//!
//! Three solvers share one result type:
//! - [`steiner_pptt`] solves the polynomial cases that arise for products of
//!   two or four Majorana strings when the mapping tree lives on the device;
//! - [`steiner_exact_small`] is an exact Dreyfus-Wagner solver for small inputs;
//! - [`steiner_heuristic`] is the metric-closure MST 2-approximation.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::HardwareGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteinerError {
    #[error("no terminals given")]
    NoTerminals,
    #[error("terminal {0} is not a vertex of the graph")]
    TerminalOutOfRange(usize),
    #[error("terminal set is not a polynomial tree-mapping instance ({components} components, no single fixing vertex)")]
    NotPpttInstance { components: usize },
    #[error("exact solver limits exceeded: {terminals} terminals, {vertices} vertices (max 10 and 20)")]
    TooLarge { terminals: usize, vertices: usize },
    #[error("invalid steiner tree: {0}")]
    Invalid(String),
}

/// Which polynomial case produced a [`steiner_pptt`] result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpttCase {
    Connected,
    TwoComponents { distance: u32 },
    SingleVertexFix { vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerResult {
    pub tree_vertices: Vec<usize>,
    pub tree_edges: Vec<(usize, usize)>,
    pub is_certified_optimal: bool,
}

impl SteinerResult {
    pub fn size(&self) -> usize {
        self.tree_vertices.len()
    }

    /// Checks the tree is acyclic, connected, on graph edges and covers the
    /// terminals.
    pub fn verify(&self, g: &HardwareGraph, terminals: &[usize]) -> Result<(), SteinerError> {
        let set: BTreeSet<usize> = self.tree_vertices.iter().copied().collect();
        if set.len() != self.tree_vertices.len() {
            return Err(SteinerError::Invalid("repeated vertex".into()));
        }
        if let Some(t) = terminals.iter().find(|t| !set.contains(t)) {
            return Err(SteinerError::Invalid(format!("terminal {t} not covered")));
        }
        if self.tree_edges.len() + 1 != set.len() {
            return Err(SteinerError::Invalid(format!(
                "{} edges for {} vertices",
                self.tree_edges.len(),
                set.len()
            )));
        }
        for &(a, b) in &self.tree_edges {
            if !g.has_edge(a, b) || !set.contains(&a) || !set.contains(&b) {
                return Err(SteinerError::Invalid(format!("edge ({a}, {b}) not usable")));
            }
        }
        // n-1 edges plus connectivity implies acyclic
        let mut parent: Vec<usize> = (0..g.n_vertices()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let n = p[c];
                p[c] = r;
                c = n;
            }
            r
        }
        for &(a, b) in &self.tree_edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(SteinerError::Invalid("cycle".into()));
            }
            parent[ra] = rb;
        }
        Ok(())
    }
}

fn check_terminals(g: &HardwareGraph, terminals: &[usize]) -> Result<Vec<usize>, SteinerError> {
    if terminals.is_empty() {
        return Err(SteinerError::NoTerminals);
    }
    if let Some(&t) = terminals.iter().find(|&&t| t >= g.n_vertices()) {
        return Err(SteinerError::TerminalOutOfRange(t));
    }
    let mut t = terminals.to_vec();
    t.sort_unstable();
    t.dedup();
    Ok(t)
}

/// Tree over `vertices` (which must induce a connected subgraph), with
/// non-terminal leaves pruned repeatedly.
fn tree_on(g: &HardwareGraph, vertices: &[usize], terminals: &[usize], certified: bool) -> SteinerResult {
    let mut verts: BTreeSet<usize> = vertices.iter().copied().collect();
    let mut edges = g
        .spanning_tree(&verts.iter().copied().collect::<Vec<_>>())
        .expect("vertex set induces a connected subgraph");
    let term: BTreeSet<usize> = terminals.iter().copied().collect();
    loop {
        let leaf = verts.iter().copied().find(|v| {
            !term.contains(v) && edges.iter().filter(|&&(a, b)| a == *v || b == *v).count() <= 1
        });
        match leaf {
            Some(v) if verts.len() > 1 => {
                verts.remove(&v);
                edges.retain(|&(a, b)| a != v && b != v);
            }
            _ => break,
        }
    }
    edges.sort_unstable();
    SteinerResult {
        tree_vertices: verts.into_iter().collect(),
        tree_edges: edges,
        is_certified_optimal: certified,
    }
}

/// Classifies the terminal set into one of the polynomial cases.
pub fn classify_pptt(g: &HardwareGraph, terminals: &[usize]) -> Result<PpttCase, SteinerError> {
    let t = check_terminals(g, terminals)?;
    let comps = g.induced_components(&t);
    match comps.len() {
        1 => Ok(PpttCase::Connected),
        2 => {
            let mut best = u32::MAX;
            for &v in &comps[0] {
                for &w in &comps[1] {
                    best = best.min(g.distance(v, w));
                }
            }
            Ok(PpttCase::TwoComponents { distance: best })
        }
        n => {
            let mut with = t.clone();
            with.push(0);
            for v in (0..g.n_vertices()).filter(|v| t.binary_search(v).is_err()) {
                *with.last_mut().unwrap() = v;
                if g.is_connected_set(&with) {
                    return Ok(PpttCase::SingleVertexFix { vertex: v });
                }
            }
            Err(SteinerError::NotPpttInstance { components: n })
        }
    }
}

/// Exact Steiner tree for terminal sets that induce a connected subgraph, two
/// components, or components joined by a single extra vertex.
pub fn steiner_pptt(g: &HardwareGraph, terminals: &[usize]) -> Result<SteinerResult, SteinerError> {
    let t = check_terminals(g, terminals)?;
    let case = classify_pptt(g, &t)?;
    let vertices = match case {
        PpttCase::Connected => t.clone(),
        PpttCase::TwoComponents { distance } => {
            let comps = g.induced_components(&t);
            let (v, w) = comps[0]
                .iter()
                .flat_map(|&v| comps[1].iter().map(move |&w| (v, w)))
                .find(|&(v, w)| g.distance(v, w) == distance)
                .expect("minimum attained");
            let mut vs = t.clone();
            vs.extend(g.shortest_path(v, w));
            vs.sort_unstable();
            vs.dedup();
            vs
        }
        PpttCase::SingleVertexFix { vertex } => {
            let mut vs = t.clone();
            vs.push(vertex);
            vs
        }
    };
    let r = tree_on(g, &vertices, &t, true);
    r.verify(g, &t)?;
    Ok(r)
}

/// Exact minimum Steiner tree by Dreyfus-Wagner dynamic programming.
/// Limited to 10 terminals on graphs of at most 20 vertices.
pub fn steiner_exact_small(g: &HardwareGraph, terminals: &[usize]) -> Result<SteinerResult, SteinerError> {
    let t = check_terminals(g, terminals)?;
    let n = g.n_vertices();
    if t.len() > 10 || n > 20 {
        return Err(SteinerError::TooLarge {
            terminals: t.len(),
            vertices: n,
        });
    }
    let k = t.len();
    if k == 1 {
        return Ok(SteinerResult {
            tree_vertices: t,
            tree_edges: vec![],
            is_certified_optimal: true,
        });
    }
    #[derive(Clone, Copy)]
    enum Back {
        None,
        Leaf,
        Split(usize),
        Via(usize),
    }
    let full = (1usize << k) - 1;
    let inf = u32::MAX / 4;
    let mut cost = vec![vec![inf; n]; full + 1];
    let mut back = vec![vec![Back::None; n]; full + 1];
    for (i, &ti) in t.iter().enumerate() {
        for v in 0..n {
            cost[1 << i][v] = g.distance(ti, v);
            back[1 << i][v] = Back::Leaf;
        }
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        for v in 0..n {
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                // each unordered split once
                if sub < (mask ^ sub) {
                    let c = cost[sub][v] + cost[mask ^ sub][v];
                    if c < cost[mask][v] {
                        cost[mask][v] = c;
                        back[mask][v] = Back::Split(sub);
                    }
                }
                sub = (sub - 1) & mask;
            }
        }
        let split_cost = cost[mask].clone();
        for v in 0..n {
            for u in 0..n {
                let c = split_cost[u] + g.distance(u, v);
                if c < cost[mask][v] {
                    cost[mask][v] = c;
                    back[mask][v] = Back::Via(u);
                }
            }
        }
    }
    let mut verts = BTreeSet::new();
    let mut stack = vec![(full, t[0])];
    while let Some((mask, v)) = stack.pop() {
        match back[mask][v] {
            Back::Leaf => {
                let ti = t[mask.trailing_zeros() as usize];
                verts.extend(g.shortest_path(ti, v));
            }
            Back::Split(sub) => {
                stack.push((sub, v));
                stack.push((mask ^ sub, v));
            }
            Back::Via(u) => {
                verts.extend(g.shortest_path(u, v));
                stack.push((mask, u));
            }
            Back::None => unreachable!("every state is reached"),
        }
    }
    let verts: Vec<usize> = verts.into_iter().collect();
    let r = tree_on(g, &verts, &t, true);
    debug_assert_eq!(r.tree_edges.len() as u32, cost[full][t[0]]);
    r.verify(g, &t)?;
    Ok(r)
}

/// Metric-closure minimum spanning tree heuristic. Returns the terminals alone
/// when they already induce a connected subgraph.
pub fn steiner_heuristic(g: &HardwareGraph, terminals: &[usize]) -> Result<SteinerResult, SteinerError> {
    let t = check_terminals(g, terminals)?;
    if g.is_connected_set(&t) {
        let r = tree_on(g, &t, &t, false);
        r.verify(g, &t)?;
        return Ok(r);
    }
    // Prim over the terminal metric closure
    let k = t.len();
    let mut in_tree = vec![false; k];
    let mut best = vec![(u32::MAX, 0usize); k];
    in_tree[0] = true;
    for j in 1..k {
        best[j] = (g.distance(t[0], t[j]), 0);
    }
    let mut verts: BTreeSet<usize> = t.iter().copied().collect();
    for _ in 1..k {
        let j = (0..k)
            .filter(|&j| !in_tree[j])
            .min_by_key(|&j| (best[j].0, j))
            .expect("remaining terminal");
        in_tree[j] = true;
        verts.extend(g.shortest_path(t[best[j].1], t[j]));
        for m in 0..k {
            if !in_tree[m] {
                let d = g.distance(t[j], t[m]);
                if d < best[m].0 {
                    best[m] = (d, j);
                }
            }
        }
    }
    let verts: Vec<usize> = verts.into_iter().collect();
    let r = tree_on(g, &verts, &t, false);
    r.verify(g, &t)?;
    Ok(r)
}
