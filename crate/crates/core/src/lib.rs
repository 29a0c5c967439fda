//! Fermion-to-qubit mapping trees, Steiner-tree compilation of Pauli
//! exponentials and simulated annealing over mapping trees.

pub mod anneal;
pub mod circuit;
pub mod cost;
pub mod enumerate;
pub mod fermion;
pub mod graph;
pub mod mapping;
pub mod pauli;
pub mod sim;
pub mod steiner;

pub use anneal::{treespile, AnnealConfig, AnnealCost, AnnealResult, SearchMode};
pub use circuit::{compile_ansatz, compile_pauli_exp, emit_qasm, peephole_cancel, Circuit, CompileMode, Gate};
pub use cost::{compiled_cost, pauli_cost, Connectivity, CostBreakdown};
pub use fermion::{FermionicAnsatz, FermionicGenerator, GeneratorKind, HamiltonianSpec, MajoranaMonomial};
pub use graph::HardwareGraph;
pub use mapping::{bonsai_tree, jw_tree, random_subtree, random_tree, MappingTree};
pub use pauli::{Letter, PauliString, PauliSum};
pub use sim::DenseState;
pub use steiner::{steiner_exact_small, steiner_heuristic, steiner_pptt, SteinerResult};
