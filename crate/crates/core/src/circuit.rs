//! Gate-level circuits: Steiner-tree exponentiation of Pauli strings,
//! peephole cancellation, reference-state preparation and OpenQASM 2.0 text.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::HardwareGraph;
use crate::mapping::{MappedGenerator, MappingError, MappingTree};
use crate::pauli::{Letter, PauliString};
use crate::steiner::{steiner_heuristic, steiner_pptt, SteinerError, SteinerResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("steiner tree does not cover qubit {0} of the string")]
    NotCovered(usize),
    #[error("cnot ({0}, {1}) is not on a device edge")]
    OffEdge(usize, usize),
    #[error("string {0} is not hermitian (phase must be + or -)")]
    NonHermitian(String),
    #[error("string is the identity; nothing to exponentiate")]
    Identity,
    #[error("mapping tree is not a subgraph of the device")]
    NotConnectivityPreserving,
    #[error("gate on qubit {qubit} in a {n_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qasm line {line}: {msg}")]
    Qasm { line: usize, msg: String },
    #[error(transparent)]
    Steiner(#[from] SteinerError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Cnot { control: usize, target: usize },
    Rz { qubit: usize, angle: f64 },
}

impl Gate {
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Rz { qubit: q, .. } => ([q, q], 1),
            Gate::Cnot { control, target } => ([control, target], 2),
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    /// True when `self · other` is the identity (exactly, not up to phase).
    fn cancels(&self, other: &Gate) -> bool {
        match (*self, *other) {
            (Gate::H(a), Gate::H(b)) | (Gate::X(a), Gate::X(b)) => a == b,
            (Gate::S(a), Gate::Sdg(b)) | (Gate::Sdg(a), Gate::S(b)) => a == b,
            (Gate::Cnot { control: c1, target: t1 }, Gate::Cnot { control: c2, target: t2 }) => {
                c1 == c2 && t1 == t2
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for g in &self.gates {
            let (qs, k) = g.qubits();
            if let Some(&q) = qs[..k].iter().find(|&&q| q >= self.n_qubits) {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        Ok(())
    }

    /// Every CNOT must sit on a device edge.
    pub fn check_edges(&self, g: &HardwareGraph) -> Result<(), CircuitError> {
        for gate in &self.gates {
            if let Gate::Cnot { control, target } = *gate {
                if !g.has_edge(control, target) {
                    return Err(CircuitError::OffEdge(control, target));
                }
            }
        }
        Ok(())
    }

    pub fn to_qasm(&self) -> String {
        emit_qasm(self)
    }
}

/// Circuit plus, per gate, the index of the ansatz generator it came from
/// (`None` for reference-state preparation).
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedCircuit {
    pub circuit: Circuit,
    pub tags: Vec<Option<usize>>,
}

impl TaggedCircuit {
    /// CNOTs attributed to each of `n_generators` generators.
    pub fn cnots_per_generator(&self, n_generators: usize) -> Vec<usize> {
        let mut out = vec![0; n_generators];
        for (g, t) in self.circuit.gates.iter().zip(&self.tags) {
            if let (true, Some(i)) = (g.is_cnot(), t) {
                out[*i] += 1;
            }
        }
        out
    }
}

/// Compiles `exp(i · theta · P)` for a Hermitian string `P` (phase `+` or `-`)
/// using a CNOT ladder over the given Steiner tree.
pub fn compile_pauli_exp(
    p: &PauliString,
    theta: f64,
    g: &HardwareGraph,
    steiner: &SteinerResult,
) -> Result<Circuit, CircuitError> {
    let mut c = Circuit::new(g.n_vertices());
    append_pauli_exp(&mut c, p, theta, g, steiner)?;
    Ok(c)
}

fn append_pauli_exp(
    c: &mut Circuit,
    p: &PauliString,
    theta: f64,
    g: &HardwareGraph,
    steiner: &SteinerResult,
) -> Result<(), CircuitError> {
    let sign = match p.phase_exp() {
        0 => 1.0,
        2 => -1.0,
        _ => return Err(CircuitError::NonHermitian(p.to_string())),
    };
    let support = p.support();
    if support.is_empty() {
        return Err(CircuitError::Identity);
    }
    if let Some(&q) = support.iter().find(|q| steiner.tree_vertices.binary_search(q).is_err()) {
        return Err(CircuitError::NotCovered(q));
    }
    for &(a, b) in &steiner.tree_edges {
        if !g.has_edge(a, b) {
            return Err(CircuitError::OffEdge(a, b));
        }
    }

    let mut basis = Vec::new();
    for &q in &support {
        match p.letter(q) {
            Letter::X => basis.push(Gate::H(q)),
            Letter::Y => {
                basis.push(Gate::Sdg(q));
                basis.push(Gate::H(q));
            }
            _ => {}
        }
    }

    // leaf elimination, lowest-index leaf first
    let verts = &steiner.tree_vertices;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    let pos = |v: usize| verts.binary_search(&v).expect("edge endpoint in tree");
    for &(a, b) in &steiner.tree_edges {
        adj[pos(a)].push(pos(b));
        adj[pos(b)].push(pos(a));
    }
    let mut carrying: Vec<bool> = verts.iter().map(|v| support.binary_search(v).is_ok()).collect();
    let mut alive = vec![true; verts.len()];
    let mut ladder = Vec::new();
    let mut remaining = verts.len();
    while remaining > 1 {
        let leaf = (0..verts.len())
            .find(|&i| alive[i] && adj[i].iter().filter(|&&j| alive[j]).count() == 1)
            .expect("a tree with two or more vertices has a leaf");
        let w = *adj[leaf].iter().find(|&&j| alive[j]).expect("leaf has a neighbour");
        if !carrying[w] {
            ladder.push(Gate::Cnot {
                control: verts[w],
                target: verts[leaf],
            });
            carrying[w] = true;
        }
        ladder.push(Gate::Cnot {
            control: verts[leaf],
            target: verts[w],
        });
        alive[leaf] = false;
        remaining -= 1;
    }
    let last = verts[alive.iter().position(|&a| a).expect("one vertex left")];

    c.gates.extend(basis.iter().copied());
    c.gates.extend(ladder.iter().copied());
    c.push(Gate::Rz {
        qubit: last,
        angle: -2.0 * sign * theta,
    });
    c.gates.extend(ladder.iter().rev().copied());
    for gate in basis.iter().rev() {
        c.push(match *gate {
            Gate::Sdg(q) => Gate::S(q),
            other => other,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompileMode {
    /// Mapping tree lies on the device; uses the polynomial Steiner solver.
    Cp,
    /// Any mapping; uses the approximate Steiner solver.
    General,
}

/// Steiner tree used for a string's support under the given mode.
pub fn steiner_for(g: &HardwareGraph, support: &[usize], mode: CompileMode) -> Result<SteinerResult, SteinerError> {
    match mode {
        CompileMode::Cp => match steiner_pptt(g, support) {
            Err(SteinerError::NotPpttInstance { .. }) => steiner_heuristic(g, support),
            r => r,
        },
        CompileMode::General => steiner_heuristic(g, support),
    }
}

/// Reference-state preparation: X on each qubit set in the encoded occupation.
pub fn hf_state_prep(m: &MappingTree, occ: &[u8], n_qubits: usize) -> Result<Circuit, CircuitError> {
    m.check_fits_width(n_qubits)?;
    let bits = m.occupation_to_bitstring(occ)?;
    let mut c = Circuit::new(n_qubits);
    for (q, &b) in bits.iter().enumerate() {
        if b == 1 {
            c.push(Gate::X(q));
        }
    }
    Ok(c)
}

/// Reference state followed by each generator's terms in canonical order.
/// Identity terms are global phases and are skipped.
pub fn compile_ansatz(
    mapped: &[MappedGenerator],
    reference_occupations: &[u8],
    m: &MappingTree,
    g: &HardwareGraph,
    mode: CompileMode,
) -> Result<TaggedCircuit, CircuitError> {
    if mode == CompileMode::Cp && !m.is_subgraph_of(g) {
        return Err(CircuitError::NotConnectivityPreserving);
    }
    let prep = hf_state_prep(m, reference_occupations, g.n_vertices())?;
    let mut tags = vec![None; prep.len()];
    let mut circuit = prep;
    for (idx, gen) in mapped.iter().enumerate() {
        for (coeff, p) in gen.sum.terms() {
            if p.is_identity() {
                continue;
            }
            // T = i·h·P, so exp(theta·T) = exp(i·theta·h·P)
            let h = coeff.im;
            let p = p.padded(g.n_vertices()).map_err(|_| CircuitError::QubitOutOfRange {
                qubit: p.width() - 1,
                n_qubits: g.n_vertices(),
            })?;
            let st = steiner_for(g, &p.support(), mode)?;
            let before = circuit.len();
            append_pauli_exp(&mut circuit, &p, gen.theta * h, g, &st)?;
            tags.extend(std::iter::repeat_n(Some(idx), circuit.len() - before));
        }
    }
    Ok(TaggedCircuit { circuit, tags })
}

/// Cancels adjacent inverse pairs and merges adjacent RZ rotations, where
/// gates on disjoint qubits are treated as commuting. Repeats to a fixed point.
pub fn peephole_cancel(c: &Circuit) -> Circuit {
    let tagged = TaggedCircuit {
        circuit: c.clone(),
        tags: vec![None; c.len()],
    };
    peephole_cancel_tagged(&tagged).circuit
}

pub fn peephole_cancel_tagged(c: &TaggedCircuit) -> TaggedCircuit {
    let mut cur = c.clone();
    loop {
        let next = peephole_pass(&cur);
        if next.circuit.len() == cur.circuit.len() {
            return next;
        }
        cur = next;
    }
}

fn angle_is_trivial(a: f64) -> bool {
    let r = a.rem_euclid(2.0 * std::f64::consts::PI);
    r < 1e-12 || 2.0 * std::f64::consts::PI - r < 1e-12
}

fn peephole_pass(c: &TaggedCircuit) -> TaggedCircuit {
    let n = c.circuit.n_qubits;
    let mut out: Vec<Option<(Gate, Option<usize>)>> = Vec::with_capacity(c.circuit.len());
    // live output indices touching each qubit, most recent last
    let mut last: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (&gate, &tag) in c.circuit.gates.iter().zip(&c.tags) {
        let (qs, k) = gate.qubits();
        let qs = &qs[..k];
        let prev = qs.iter().filter_map(|&q| last[q].last().copied()).max();
        if let Some(i) = prev {
            let (pg, _) = out[i].expect("indices in `last` are live");
            let (pqs, pk) = pg.qubits();
            let same_qubits = pk == k && pqs[..pk] == *qs;
            if same_qubits && pg.cancels(&gate) {
                out[i] = None;
                for &q in qs {
                    last[q].pop();
                }
                continue;
            }
            if let (Gate::Rz { qubit: a, angle: x }, Gate::Rz { qubit: b, angle: y }) = (pg, gate) {
                if a == b {
                    let merged = x + y;
                    if angle_is_trivial(merged) {
                        out[i] = None;
                        last[a].pop();
                    } else {
                        out[i] = Some((Gate::Rz { qubit: a, angle: merged }, out[i].unwrap().1));
                    }
                    continue;
                }
            }
        }
        if let Gate::Rz { angle, .. } = gate {
            if angle_is_trivial(angle) {
                continue;
            }
        }
        let idx = out.len();
        out.push(Some((gate, tag)));
        for &q in qs {
            last[q].push(idx);
        }
    }
    let (gates, tags) = out.into_iter().flatten().unzip();
    TaggedCircuit {
        circuit: Circuit { n_qubits: n, gates },
        tags,
    }
}

/// OpenQASM 2.0 text, one gate per line.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", c.n_qubits);
    for g in &c.gates {
        let _ = match *g {
            Gate::H(q) => writeln!(s, "h q[{q}];"),
            Gate::S(q) => writeln!(s, "s q[{q}];"),
            Gate::Sdg(q) => writeln!(s, "sdg q[{q}];"),
            Gate::X(q) => writeln!(s, "x q[{q}];"),
            Gate::Cnot { control, target } => writeln!(s, "cx q[{control}],q[{target}];"),
            Gate::Rz { qubit, angle } => writeln!(s, "rz({angle:?}) q[{qubit}];"),
        };
    }
    s
}

/// Reads the subset of OpenQASM 2.0 written by [`emit_qasm`].
pub fn parse_qasm(text: &str) -> Result<Circuit, CircuitError> {
    let mut n_qubits = None;
    let mut gates = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: &str| CircuitError::Qasm {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        if line.is_empty() || line.starts_with("//") || line.starts_with("OPENQASM") || line.starts_with("include") {
            continue;
        }
        let body = line.strip_suffix(';').ok_or_else(|| err("missing ';'"))?;
        let qubit = |t: &str| -> Result<usize, CircuitError> {
            t.trim()
                .strip_prefix("q[")
                .and_then(|r| r.strip_suffix(']'))
                .and_then(|i| i.parse().ok())
                .ok_or_else(|| err("bad qubit operand"))
        };
        if let Some(rest) = body.strip_prefix("qreg ") {
            n_qubits = Some(qubit(rest)?);
            continue;
        }
        let (op, args) = body.split_once(' ').ok_or_else(|| err("missing operands"))?;
        let gate = match op {
            "h" => Gate::H(qubit(args)?),
            "s" => Gate::S(qubit(args)?),
            "sdg" => Gate::Sdg(qubit(args)?),
            "x" => Gate::X(qubit(args)?),
            "cx" => {
                let (a, b) = args.split_once(',').ok_or_else(|| err("cx needs two operands"))?;
                Gate::Cnot {
                    control: qubit(a)?,
                    target: qubit(b)?,
                }
            }
            _ => {
                let angle = op
                    .strip_prefix("rz(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| err("unsupported gate"))?
                    .parse::<f64>()
                    .map_err(|_| err("bad angle"))?;
                Gate::Rz {
                    qubit: qubit(args)?,
                    angle,
                }
            }
        };
        gates.push(gate);
    }
    let c = Circuit {
        n_qubits: n_qubits.ok_or(CircuitError::Qasm {
            line: 0,
            msg: "missing qreg".into(),
        })?,
        gates,
    };
    c.validate()?;
    Ok(c)
}
