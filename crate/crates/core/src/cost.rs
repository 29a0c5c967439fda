//! CNOT cost estimates for a mapped ansatz.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{compile_ansatz, peephole_cancel_tagged, CircuitError, CompileMode};
use crate::fermion::FermionicAnsatz;
use crate::graph::HardwareGraph;
use crate::mapping::{MappedGenerator, MappingError, MappingTree};
use crate::steiner::{steiner_heuristic, steiner_pptt, SteinerError, SteinerResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Steiner(#[from] SteinerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    PauliFc,
    PauliLc,
    Compiled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    Full,
    Limited,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total_cnots: usize,
    pub per_generator: Vec<usize>,
    pub cost_kind: CostKind,
}

impl CostBreakdown {
    fn from_parts(per_generator: Vec<usize>, cost_kind: CostKind) -> Self {
        CostBreakdown {
            total_cnots: per_generator.iter().sum(),
            per_generator,
            cost_kind,
        }
    }
}

/// Smallest Steiner tree we can certify, falling back to the approximation
/// when the terminal set is outside the polynomial cases.
pub fn best_steiner(g: &HardwareGraph, support: &[usize]) -> Result<SteinerResult, SteinerError> {
    match steiner_pptt(g, support) {
        Err(SteinerError::NotPpttInstance { .. }) => steiner_heuristic(g, support),
        r => r,
    }
}

/// `2(k-1)` CNOTs for a weight-`k` string on a complete device, 0 for `k = 0`.
pub fn full_term_cost(weight: usize) -> usize {
    2 * weight.saturating_sub(1)
}

/// `2(2n-k-1)` CNOTs for a weight-`k` string whose Steiner tree has `n`
/// vertices, 0 for `k = 0`.
pub fn limited_term_cost(tree_size: usize, weight: usize) -> usize {
    if weight == 0 {
        0
    } else {
        2 * (2 * tree_size - weight - 1)
    }
}

/// Closed-form CNOT estimate summed over every term of every generator.
pub fn pauli_cost(
    mapped: &[MappedGenerator],
    g: &HardwareGraph,
    m: &MappingTree,
    connectivity: Connectivity,
) -> Result<CostBreakdown, CostError> {
    m.check_fits_width(g.n_vertices())?;
    let mut per = Vec::with_capacity(mapped.len());
    for gen in mapped {
        let mut total = 0;
        for (_, p) in gen.sum.terms() {
            let (k, support) = p.weight_and_support();
            total += match (connectivity, k) {
                (_, 0) => 0,
                (Connectivity::Full, _) => full_term_cost(k),
                (Connectivity::Limited, _) => limited_term_cost(best_steiner(g, &support)?.size(), k),
            };
        }
        per.push(total);
    }
    let kind = match connectivity {
        Connectivity::Full => CostKind::PauliFc,
        Connectivity::Limited => CostKind::PauliLc,
    };
    Ok(CostBreakdown::from_parts(per, kind))
}

/// CNOTs left after compiling the ansatz and running peephole cancellation.
/// Surviving CNOTs are attributed to the generator that emitted them.
pub fn compiled_cost(a: &FermionicAnsatz, m: &MappingTree, g: &HardwareGraph) -> Result<CostBreakdown, CostError> {
    m.check_fits_width(g.n_vertices())?;
    let mapped = m.map_ansatz(a)?;
    let mode = if m.is_subgraph_of(g) {
        CompileMode::Cp
    } else {
        CompileMode::General
    };
    let c = compile_ansatz(&mapped, &a.reference_occupations, m, g, mode)?;
    let c = peephole_cancel_tagged(&c);
    Ok(CostBreakdown::from_parts(
        c.cnots_per_generator(mapped.len()),
        CostKind::Compiled,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{FermionicGenerator, GeneratorKind};
    use crate::mapping::jw_tree;
    use crate::pauli::{PauliString, PauliSum};
    use num_complex::Complex64;

    fn gen(s: &str) -> MappedGenerator {
        let p: PauliString = s.parse().unwrap();
        MappedGenerator {
            theta: 0.1,
            sum: PauliSum::from_terms(p.width(), [(Complex64::new(0.0, 1.0), p)]).unwrap(),
        }
    }

    #[test]
    fn closed_form_examples() {
        let m = jw_tree(4).unwrap();
        let g = HardwareGraph::complete(4).unwrap();
        let c = pauli_cost(&[gen("XYZX")], &g, &m, Connectivity::Full).unwrap();
        assert_eq!((c.total_cnots, c.per_generator), (6, vec![6]));
        let line = HardwareGraph::line(4).unwrap();
        // support {0, 1, 3} needs vertex 2 as well
        let c = pauli_cost(&[gen("ZXIY")], &line, &m, Connectivity::Limited).unwrap();
        assert_eq!(c.total_cnots, 8);
        assert_eq!(pauli_cost(&[], &g, &m, Connectivity::Full).unwrap().total_cnots, 0);
        assert_eq!(pauli_cost(&[gen("IIII")], &g, &m, Connectivity::Limited).unwrap().total_cnots, 0);
    }

    #[test]
    fn full_equals_limited_on_complete_graphs() {
        let m = jw_tree(5).unwrap();
        let g = HardwareGraph::complete(5).unwrap();
        let gens = [gen("XZZZY"), gen("IXIYI"), gen("ZIIII")];
        let f = pauli_cost(&gens, &g, &m, Connectivity::Full).unwrap();
        let l = pauli_cost(&gens, &g, &m, Connectivity::Limited).unwrap();
        assert_eq!(f.per_generator, l.per_generator);
    }

    #[test]
    fn compiled_examples() {
        let m = jw_tree(4).unwrap();
        let g = HardwareGraph::complete(4).unwrap();
        let maj2 = FermionicGenerator::new(GeneratorKind::Maj2 { u: 0, v: 1 }, 0.3);
        let a = FermionicAnsatz::new(4, vec![1, 0, 0, 0], vec![maj2]).unwrap();
        assert_eq!(compiled_cost(&a, &m, &g).unwrap().total_cnots, 0);

        let maj4 = FermionicGenerator::new(GeneratorKind::Maj4 { u: 0, v: 2, r: 5, s: 7 }, 0.3);
        let one = FermionicAnsatz::new(4, vec![0; 4], vec![maj4]).unwrap();
        let two = FermionicAnsatz::new(4, vec![0; 4], vec![maj4, maj4]).unwrap();
        let single = pauli_cost(&m.map_ansatz(&one).unwrap(), &g, &m, Connectivity::Full).unwrap();
        let c = compiled_cost(&two, &m, &g).unwrap();
        assert!(c.total_cnots < 2 * single.total_cnots);
        assert_eq!(c.per_generator.iter().sum::<usize>(), c.total_cnots);
    }

    #[test]
    fn mapping_must_fit_device() {
        let m = jw_tree(5).unwrap();
        let g = HardwareGraph::complete(4).unwrap();
        assert!(matches!(
            pauli_cost(&[], &g, &m, Connectivity::Full),
            Err(CostError::Mapping(MappingError::QubitOutOfRange { .. }))
        ));
    }
}
