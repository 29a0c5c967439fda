//! Undirected qubit-connectivity graphs: presets, JSON form, cached
//! all-pairs shortest paths.

use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph needs at least one vertex")]
    Empty,
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("cannot parse graph spec {0:?}")]
    BadSpec(String),
    #[error("cannot read graph file: {0}")]
    Io(String),
    #[error("invalid graph json: {0}")]
    Json(String),
}

/// Simple connected undirected graph on vertices `0..n`.
#[derive(Debug, Clone)]
pub struct HardwareGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
    distances: OnceLock<Vec<Vec<u32>>>,
}

impl PartialEq for HardwareGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for HardwareGraph {}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

pub const UNREACHABLE: u32 = u32::MAX;

impl HardwareGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange(a, b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        let g = HardwareGraph {
            n,
            adj,
            edges: set,
            distances: OnceLock::new(),
        };
        if !g.is_connected_set(&(0..n).collect::<Vec<_>>()) {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn complete(q: usize) -> Result<Self, GraphError> {
        if q == 0 {
            return Err(GraphError::InvalidSize("complete graph needs Q >= 1".into()));
        }
        let edges = (0..q).flat_map(|a| (a + 1..q).map(move |b| (a, b)));
        Self::new(q, edges)
    }

    pub fn line(q: usize) -> Result<Self, GraphError> {
        if q == 0 {
            return Err(GraphError::InvalidSize("line graph needs Q >= 1".into()));
        }
        Self::new(q, (1..q).map(|b| (b - 1, b)))
    }

    /// `rows x cols` lattice, vertex `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Result<Self, GraphError> {
        if rows == 0 || cols == 0 {
            return Err(GraphError::InvalidSize(format!("grid {rows}x{cols}")));
        }
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Self::new(rows * cols, edges)
    }

    /// Heavy-hexagon lattice truncated to `q` vertices.
    ///
    /// Rows of qubits are joined by bridge qubits placed every fourth column,
    /// alternating between column offsets 0 and 2. For `q > 40` rows are 15
    /// wide with the first row missing its last column and the final row its
    /// first column, so `heavy_hex(127)` has the IBM Eagle layout and
    /// numbering. Smaller devices use rows of 5, so `heavy_hex(12)` is a
    /// single heavy hexagon. The lattice is truncated by growing from vertex
    /// 0, always adding the lowest-numbered adjacent vertex.
    pub fn heavy_hex(q: usize) -> Result<Self, GraphError> {
        if q == 0 {
            return Err(GraphError::InvalidSize("heavy_hex needs Q >= 1".into()));
        }
        let (width, trim) = if q > 40 { (15, true) } else { (5, false) };
        let mut rows = 1;
        let (n, edges) = loop {
            let lattice = heavy_hex_lattice(width, rows, trim);
            if lattice.0 >= q {
                break lattice;
            }
            rows += if trim { 2 } else { 1 };
        };
        let full = Self::new(n, edges)?;
        let mut chosen = vec![false; n];
        chosen[0] = true;
        for _ in 1..q {
            let next = (0..n)
                .find(|&v| !chosen[v] && full.adj[v].iter().any(|&u| chosen[u]))
                .expect("lattice is connected");
            chosen[next] = true;
        }
        let mut relabel = vec![usize::MAX; n];
        let mut k = 0;
        for v in 0..n {
            if chosen[v] {
                relabel[v] = k;
                k += 1;
            }
        }
        let sub = full
            .edges
            .iter()
            .filter(|(a, b)| chosen[*a] && chosen[*b])
            .map(|&(a, b)| (relabel[a], relabel[b]));
        Self::new(q, sub)
    }

    /// `complete:Q`, `line:Q`, `heavy_hex:Q`, `grid:RxC` or `file:path`.
    pub fn from_spec(spec: &str) -> Result<Self, GraphError> {
        let bad = || GraphError::BadSpec(spec.to_string());
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        match kind {
            "complete" => Self::complete(num(arg)?),
            "line" => Self::line(num(arg)?),
            "heavy_hex" => Self::heavy_hex(num(arg)?),
            "grid" => {
                let (r, c) = arg.split_once(['x', 'X']).ok_or_else(bad)?;
                Self::grid(num(r)?, num(c)?)
            }
            "file" => {
                let text = std::fs::read_to_string(arg).map_err(|e| GraphError::Io(format!("{arg}: {e}")))?;
                Self::from_json(&text)
            }
            _ => Err(bad()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let f: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        Self::new(f.n, f.edges.into_iter().map(|[a, b]| (a, b)))
    }

    pub fn to_json(&self) -> String {
        let f = GraphFile {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_string(&f).expect("graph serializes")
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * (self.n - 1) / 2
    }

    /// New graph with one extra edge; `None` if it already exists or is a loop.
    pub fn with_edge(&self, a: usize, b: usize) -> Option<Self> {
        if a == b || a >= self.n || b >= self.n || self.has_edge(a, b) {
            return None;
        }
        Self::new(self.n, self.edges.iter().copied().chain([(a, b)])).ok()
    }

    fn all_distances(&self) -> &Vec<Vec<u32>> {
        self.distances.get_or_init(|| {
            (0..self.n)
                .map(|s| {
                    let mut d = vec![UNREACHABLE; self.n];
                    d[s] = 0;
                    let mut q = VecDeque::from([s]);
                    while let Some(v) = q.pop_front() {
                        for &u in &self.adj[v] {
                            if d[u] == UNREACHABLE {
                                d[u] = d[v] + 1;
                                q.push_back(u);
                            }
                        }
                    }
                    d
                })
                .collect()
        })
    }

    pub fn distance(&self, a: usize, b: usize) -> u32 {
        self.all_distances()[a][b]
    }

    /// Shortest path from `a` to `b`; at each step the lowest-numbered
    /// neighbour that stays on a shortest path is taken.
    pub fn shortest_path(&self, a: usize, b: usize) -> Vec<usize> {
        let d = self.all_distances();
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            cur = *self.adj[cur]
                .iter()
                .find(|&&u| d[u][b] + 1 == d[cur][b])
                .expect("connected graph");
            path.push(cur);
        }
        path
    }

    fn membership(&self, vertices: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &v in vertices {
            m[v] = true;
        }
        m
    }

    /// Connected components of the induced subgraph, each sorted, ordered by
    /// smallest vertex.
    pub fn induced_components(&self, vertices: &[usize]) -> Vec<Vec<usize>> {
        let inside = self.membership(vertices);
        let mut seen = vec![false; self.n];
        let mut sorted: Vec<usize> = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut comps = Vec::new();
        for &s in &sorted {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &u in &self.adj[v] {
                    if inside[u] && !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected_set(&self, vertices: &[usize]) -> bool {
        self.induced_components(vertices).len() <= 1
    }

    /// BFS spanning tree of the induced subgraph on `vertices`, rooted at the
    /// smallest vertex. `None` when the induced subgraph is disconnected.
    pub fn spanning_tree(&self, vertices: &[usize]) -> Option<Vec<(usize, usize)>> {
        let inside = self.membership(vertices);
        let start = *vertices.iter().min()?;
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut edges = Vec::new();
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            for &u in &self.adj[v] {
                if inside[u] && !seen[u] {
                    seen[u] = true;
                    edges.push((v.min(u), v.max(u)));
                    q.push_back(u);
                }
            }
        }
        let count = inside.iter().filter(|&&b| b).count();
        (edges.len() + 1 == count).then_some(edges)
    }
}

/// Builds the row/bridge heavy-hex lattice; returns vertex count and edges.
fn heavy_hex_lattice(width: usize, rows: usize, trim: bool) -> (usize, Vec<(usize, usize)>) {
    let row_cols = |r: usize| -> Vec<usize> {
        (0..width)
            .filter(|&c| !(trim && rows > 1 && r == 0 && c == width - 1))
            .filter(|&c| !(trim && rows > 1 && r == rows - 1 && c == 0))
            .collect()
    };
    let bridge_cols = |gap: usize| -> Vec<usize> {
        let offset = if gap % 2 == 0 { 0 } else { 2 };
        (offset..width).step_by(4).collect()
    };
    // ids: row r, then the bridges below row r
    let mut row_ids: Vec<Vec<Option<usize>>> = vec![vec![None; width]; rows];
    let mut bridges: Vec<(usize, usize, usize)> = Vec::new(); // (id, gap, col)
    let mut next = 0;
    for r in 0..rows {
        for c in row_cols(r) {
            row_ids[r][c] = Some(next);
            next += 1;
        }
        if r + 1 < rows {
            for c in bridge_cols(r) {
                bridges.push((next, r, c));
                next += 1;
            }
        }
    }
    let mut edges = Vec::new();
    for ids in &row_ids {
        for c in 1..width {
            if let (Some(a), Some(b)) = (ids[c - 1], ids[c]) {
                edges.push((a, b));
            }
        }
    }
    for &(id, gap, c) in &bridges {
        edges.push((row_ids[gap][c].expect("bridge top"), id));
        edges.push((id, row_ids[gap + 1][c].expect("bridge bottom")));
    }
    (next, edges)
}
