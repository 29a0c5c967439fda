//! Cross-module checks against brute-force and dense-matrix oracles.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treespile::circuit::{compile_ansatz, compile_pauli_exp, hf_state_prep, parse_qasm, peephole_cancel, Circuit, CompileMode, Gate};
use treespile::cost::{pauli_cost, Connectivity};
use treespile::fermion::{creation, FermionicAnsatz, MajoranaMonomial};
use treespile::graph::HardwareGraph;
use treespile::mapping::{jw_tree, random_subtree, random_tree, Braid};
use treespile::sim::{circuit_unitary, map_poly, phase_insensitive_distance, DenseState, Matrix};
use treespile::steiner::{steiner_exact_small, steiner_heuristic, steiner_pptt};

const ANSATZ_4: &str = include_str!("../data/ansatz_4.json");

fn min_connected_superset(g: &HardwareGraph, terminals: &[usize]) -> usize {
    let others: Vec<usize> = (0..g.n_vertices()).filter(|v| !terminals.contains(v)).collect();
    let mut best = usize::MAX;
    for mask in 0u32..1 << others.len() {
        let mut set = terminals.to_vec();
        set.extend(others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &v)| v));
        if set.len() < best && g.is_connected_set(&set) {
            best = set.len();
        }
    }
    best
}

#[test]
fn exact_steiner_matches_subset_enumeration() {
    let g = HardwareGraph::heavy_hex(12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..60 {
        let mut v: Vec<usize> = (0..12).collect();
        v.shuffle(&mut rng);
        let k = rng.gen_range(1..=5);
        let terms = &v[..k];
        let exact = steiner_exact_small(&g, terms).unwrap();
        exact.verify(&g, terms).unwrap();
        assert_eq!(exact.size(), min_connected_superset(&g, terms));
        let heur = steiner_heuristic(&g, terms).unwrap();
        heur.verify(&g, terms).unwrap();
        assert!(heur.size() >= exact.size());
        assert!(heur.tree_edges.len() <= 2 * exact.tree_edges.len().max(1));
    }
}

#[test]
fn pptt_agrees_with_exact_whenever_it_applies() {
    let g = HardwareGraph::grid(3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut applied = 0;
    for _ in 0..300 {
        let mut v: Vec<usize> = (0..12).collect();
        v.shuffle(&mut rng);
        let terms = &v[..rng.gen_range(1..=6)];
        if let Ok(r) = steiner_pptt(&g, terms) {
            applied += 1;
            assert!(r.is_certified_optimal);
            assert_eq!(r.size(), steiner_exact_small(&g, terms).unwrap().size());
        }
    }
    assert!(applied > 100);
}

#[test]
fn occupation_matches_creation_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = HardwareGraph::grid(2, 3).unwrap();
    for _ in 0..30 {
        let t = random_subtree(&g, 6, &mut rng).unwrap();
        let occ: Vec<u8> = (0..6).map(|_| rng.gen_range(0..2)).collect();
        let w = t.qubit_width();
        let mut s = DenseState::zero(w).unwrap();
        for j in (0..6).filter(|&j| occ[j] == 1) {
            s = s.apply_sum(&map_poly(&t, &creation(j), w).unwrap()).unwrap();
        }
        let bits = t.occupation_to_bitstring(&occ).unwrap();
        let want = DenseState::from_bits(&bits).unwrap();
        assert!((s.inner(&want).norm() - 1.0).abs() < 1e-12, "occ {occ:?} bits {bits:?}");
        // reference-state circuit prepares the same basis state
        let prep = hf_state_prep(&t, &occ, w).unwrap();
        assert_eq!(prep.cnot_count(), 0);
        assert_eq!(DenseState::zero(w).unwrap().apply_circuit(&prep).unwrap(), want);
    }
}

#[test]
fn braid_flip_keeps_number_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let t = random_tree(7, &mut rng).unwrap();
        let v = rng.gen_range(0..7);
        let mut b = t.clone();
        b.nodes[v].braid = b.nodes[v].braid.flipped();
        for j in 0..7 {
            let mono = MajoranaMonomial::new(vec![2 * j, 2 * j + 1], Complex64::new(0.0, 1.0));
            assert_eq!(t.map_monomial(&mono).unwrap(), b.map_monomial(&mono).unwrap());
        }
    }
}

fn random_circuit(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let q = rng.gen_range(0..n);
        let g = match rng.gen_range(0..6) {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::Sdg(q),
            3 => Gate::X(q),
            4 if n > 1 => {
                let t = (q + rng.gen_range(1..n)) % n;
                Gate::Cnot { control: q, target: t }
            }
            _ => Gate::Rz {
                qubit: q,
                angle: rng.gen_range(-2.0..2.0),
            },
        };
        c.push(g);
        // echo some gates to give the optimizer work
        if rng.gen_bool(0.3) {
            c.push(g);
        }
    }
    c
}

#[test]
fn peephole_preserves_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let c = random_circuit(n, 40, &mut rng);
        let p = peephole_cancel(&c);
        assert!(p.len() <= c.len());
        let d = phase_insensitive_distance(&circuit_unitary(&c).unwrap(), &circuit_unitary(&p).unwrap());
        assert!(d < 1e-9, "distance {d}");
        assert_eq!(peephole_cancel(&p), p);
    }
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.dim;
    let mut data = vec![Complex64::default(); n * n];
    for r in 0..n {
        for k in 0..n {
            let x = a.get(r, k);
            for c in 0..n {
                data[r * n + c] += x * b.get(k, c);
            }
        }
    }
    Matrix { dim: n, data }
}

#[test]
fn compiled_ansatz_equals_product_of_exponentials() {
    let a = FermionicAnsatz::from_json(ANSATZ_4).unwrap();
    let g = HardwareGraph::line(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for t in [jw_tree(4).unwrap(), random_subtree(&g, 4, &mut rng).unwrap()] {
        let mapped = t.map_ansatz(&a).unwrap();
        let c = compile_ansatz(&mapped, &a.reference_occupations, &t, &g, CompileMode::Cp).unwrap();
        c.circuit.check_edges(&g).unwrap();
        let opt = peephole_cancel(&c.circuit);
        // reference state then generators, each built column by column
        let dim = 16;
        let mut expected = Matrix::identity(dim);
        let prep = hf_state_prep(&t, &a.reference_occupations, 4).unwrap();
        expected = matmul(&circuit_unitary(&prep).unwrap(), &expected);
        for gen in &mapped {
            let cols: Vec<Vec<Complex64>> = (0..dim)
                .map(|j| {
                    DenseState::basis(4, j)
                        .unwrap()
                        .apply_sum_exp(&gen.sum.padded(4).unwrap(), gen.theta)
                        .unwrap()
                        .amplitudes()
                        .to_vec()
                })
                .collect();
            let mut u = Matrix::identity(dim);
            for (j, col) in cols.iter().enumerate() {
                for (r, v) in col.iter().enumerate() {
                    u.data[r * dim + j] = *v;
                }
            }
            expected = matmul(&u, &expected);
        }
        for circuit in [&c.circuit, &opt] {
            let d = phase_insensitive_distance(&circuit_unitary(circuit).unwrap(), &expected);
            assert!(d < 1e-9, "distance {d}");
        }
        assert_eq!(parse_qasm(&opt.to_qasm()).unwrap(), opt);
    }
}

#[test]
fn limited_cost_counts_compiled_cnots_exactly() {
    let a = FermionicAnsatz::from_json(include_str!("../data/majoranic_12.json")).unwrap();
    let g = HardwareGraph::heavy_hex(127).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..5 {
        let t = random_subtree(&g, 12, &mut rng).unwrap();
        let mapped = t.map_ansatz(&a).unwrap();
        let est = pauli_cost(&mapped, &g, &t, Connectivity::Limited).unwrap();
        let c = compile_ansatz(&mapped, &a.reference_occupations, &t, &g, CompileMode::Cp).unwrap();
        c.circuit.check_edges(&g).unwrap();
        assert_eq!(c.cnots_per_generator(mapped.len()), est.per_generator);
    }
}

fn random_braids(t: &treespile::mapping::MappingTree, rng: &mut ChaCha8Rng) -> treespile::mapping::MappingTree {
    let mut b = t.clone();
    for node in b.nodes.iter_mut() {
        if rng.gen_bool(0.5) {
            node.braid = Braid::Minus;
        }
    }
    b
}

#[test]
fn costs_ignore_braids_for_fermionic_generators() {
    let a = FermionicAnsatz::from_json(ANSATZ_4).unwrap();
    let fermionic = FermionicAnsatz {
        generators: a.generators.iter().filter(|g| !g.kind.is_majoranic()).cloned().collect(),
        ..a.clone()
    };
    assert!(!fermionic.generators.is_empty());
    let g = HardwareGraph::grid(3, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let t = random_subtree(&g, 4, &mut rng).unwrap();
        let b = random_braids(&t, &mut rng);
        for conn in [Connectivity::Full, Connectivity::Limited] {
            let x = pauli_cost(&t.map_ansatz(&fermionic).unwrap(), &g, &t, conn).unwrap();
            let y = pauli_cost(&b.map_ansatz(&fermionic).unwrap(), &g, &b, conn).unwrap();
            assert_eq!(x, y);
        }
    }
}

#[test]
fn braids_can_change_majoranic_costs() {
    // a lone m_{2j} switches between the X- and Y-branch strings of its node
    let a = FermionicAnsatz::from_json(include_str!("../data/majoranic_12.json")).unwrap();
    let g = HardwareGraph::heavy_hex(40).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let t = random_subtree(&g, 12, &mut rng).unwrap();
    let changed = (0..10).any(|_| {
        let b = random_braids(&t, &mut rng);
        let x = pauli_cost(&t.map_ansatz(&a).unwrap(), &g, &t, Connectivity::Limited).unwrap();
        let y = pauli_cost(&b.map_ansatz(&a).unwrap(), &g, &b, Connectivity::Limited).unwrap();
        x != y
    });
    assert!(changed);
}

#[test]
fn compile_pauli_exp_rejects_off_device_trees() {
    let line = HardwareGraph::line(3).unwrap();
    let ring = HardwareGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    let st = steiner_pptt(&ring, &[0, 2]).unwrap();
    assert!(compile_pauli_exp(&"ZIZ".parse().unwrap(), 0.1, &line, &st).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_trees_round_trip_and_anticommute(seed in any::<u64>(), n in 1usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(n, &mut rng).unwrap();
        prop_assert_eq!(treespile::mapping::MappingTree::from_json(&t.to_json()).unwrap(), t.clone());
        let a = t.pair_strings();
        for x in 0..2 * n {
            for y in x + 1..2 * n {
                prop_assert!(!a.strings[x].commutes(&a.strings[y]).unwrap());
            }
        }
        // the dropped leg is the root's all-Z descent
        let zs: Vec<_> = t.strings().into_iter().filter(|p| p.is_z_type()).collect();
        prop_assert_eq!(zs.len(), 1);
        prop_assert!(!a.strings.contains(&zs[0]));
    }
}
