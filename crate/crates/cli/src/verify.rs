//! Dense-oracle verification suites run by `treespile verify`.

use anyhow::{bail, Context, Result};
use serde::Serialize;

use treespile::circuit::{compile_ansatz, hf_state_prep, peephole_cancel, CompileMode};
use treespile::fermion::{annihilation, creation, FermionicAnsatz, MajoranaPoly};
use treespile::mapping::MappingTree;
use treespile::sim::{
    ansatz_state, circuit_unitary, map_poly, phase_insensitive_distance, sum_exp_matrix, DenseState,
    MAX_STATE_QUBITS, MAX_UNITARY_QUBITS,
};
use treespile::HardwareGraph;

pub const VACUUM_TOL: f64 = 1e-12;
pub const ENERGY_TOL: f64 = 1e-9;
pub const UNITARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Vacuum,
    Energy,
    Circuit,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub suite: Suite,
    pub mapping: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CaseResult {
    fn new(suite: Suite, mapping: &str, value: f64, tolerance: f64) -> Self {
        CaseResult {
            suite,
            mapping: mapping.to_string(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub n_modes: usize,
    pub cases: Vec<CaseResult>,
}

/// Hopping chain plus neighbouring density interactions, all unit weight.
pub fn chain_hamiltonian(n: usize) -> MajoranaPoly {
    let mut h = MajoranaPoly::default();
    let mut extend = |p: MajoranaPoly| p.monomials().into_iter().for_each(|m| h.add(m));
    for j in 0..n {
        extend(creation(j).mul(&annihilation(j)));
        if j + 1 < n {
            extend(creation(j).mul(&annihilation(j + 1)));
            extend(creation(j + 1).mul(&annihilation(j)));
            let nj = creation(j).mul(&annihilation(j));
            let nk = creation(j + 1).mul(&annihilation(j + 1));
            extend(nj.mul(&nk));
        }
    }
    h
}

fn vacuum_residual(t: &MappingTree) -> Result<f64> {
    let w = t.qubit_width();
    let vac = DenseState::zero(w)?;
    let mut worst = 0.0f64;
    for j in 0..t.n_modes() {
        let a = map_poly(t, &annihilation(j), w)?;
        worst = worst.max(vac.apply_sum(&a)?.norm());
    }
    Ok(worst)
}

fn energy(t: &MappingTree, a: &FermionicAnsatz, h: &MajoranaPoly) -> Result<f64> {
    let s = ansatz_state(t, a)?;
    let e = s.expectation(&map_poly(t, h, t.qubit_width())?)?;
    if e.im.abs() > ENERGY_TOL {
        bail!("energy has imaginary part {:e}", e.im);
    }
    Ok(e.re)
}

/// Worst distance between the compiled circuit (before and after peephole)
/// and the exact product of generator exponentials.
fn circuit_distance(t: &MappingTree, a: &FermionicAnsatz, graph: Option<&HardwareGraph>) -> Result<f64> {
    let g = match graph {
        Some(g) => g.clone(),
        None => HardwareGraph::complete(t.qubit_width())?,
    };
    let nq = g.n_vertices();
    if nq > MAX_UNITARY_QUBITS {
        bail!("circuit suite is limited to {MAX_UNITARY_QUBITS} qubits, device has {nq}");
    }
    t.check_fits_width(nq)?;
    let mode = if t.is_subgraph_of(&g) { CompileMode::Cp } else { CompileMode::General };
    let mapped = t.map_ansatz(a)?;
    let compiled = compile_ansatz(&mapped, &a.reference_occupations, t, &g, mode)?;
    compiled.circuit.check_edges(&g)?;
    let mut exact = circuit_unitary(&hf_state_prep(t, &a.reference_occupations, nq)?)?;
    for gen in &mapped {
        exact = sum_exp_matrix(&gen.sum.padded(nq)?, gen.theta, nq)?.mul(&exact);
    }
    let raw = phase_insensitive_distance(&circuit_unitary(&compiled.circuit)?, &exact);
    let opt = phase_insensitive_distance(&circuit_unitary(&peephole_cancel(&compiled.circuit))?, &exact);
    Ok(raw.max(opt))
}

/// Runs the selected suites over labelled mappings. Energies are compared to
/// the first mapping.
pub fn run(
    a: &FermionicAnsatz,
    h: &MajoranaPoly,
    mappings: &[(String, MappingTree)],
    graph: Option<&HardwareGraph>,
    suites: &[Suite],
) -> Result<VerifyReport> {
    for (label, t) in mappings {
        if t.n_modes() != a.n_modes {
            bail!("mapping {label} has {} modes, ansatz has {}", t.n_modes(), a.n_modes);
        }
        if t.qubit_width() > MAX_STATE_QUBITS {
            bail!("mapping {label} needs {} qubits, oracle cap is {MAX_STATE_QUBITS}", t.qubit_width());
        }
    }
    let mut cases = Vec::new();
    let mut reference = None;
    for (label, t) in mappings {
        let ctx = || format!("mapping {label}");
        for suite in suites {
            let case = match suite {
                Suite::Vacuum => CaseResult::new(*suite, label, vacuum_residual(t).with_context(ctx)?, VACUUM_TOL),
                Suite::Energy => {
                    let e = energy(t, a, h).with_context(ctx)?;
                    let e0 = *reference.get_or_insert(e);
                    CaseResult::new(*suite, label, (e - e0).abs(), ENERGY_TOL)
                }
                Suite::Circuit => {
                    CaseResult::new(*suite, label, circuit_distance(t, a, graph).with_context(ctx)?, UNITARY_TOL)
                }
            };
            cases.push(case);
        }
    }
    Ok(VerifyReport {
        passed: cases.iter().all(|c| c.passed),
        n_modes: a.n_modes,
        cases,
    })
}
