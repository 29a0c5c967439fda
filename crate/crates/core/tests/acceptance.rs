//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any hard criterion fails.

use std::collections::{BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treespile::anneal::{apply_move, legal_moves, propose_move, treespile, AnnealConfig, AnnealCost, MoveKind, SearchMode};
use treespile::circuit::compile_pauli_exp;
use treespile::enumerate::{bounded_degree_bound, count, mapping_bound, reachability};
use treespile::fermion::{annihilation, creation, FermionicAnsatz, FermionicGenerator, GeneratorKind, MajoranaMonomial, MajoranaPoly};
use treespile::graph::HardwareGraph;
use treespile::mapping::{bonsai_tree, jw_tree, random_subtree, random_tree, Braid, MappingTree, Node};
use treespile::pauli::{Letter, PauliString, PauliSum};
use treespile::sim::{circuit_unitary, map_poly, pauli_exp_matrix, phase_insensitive_distance, DenseState};
use treespile::steiner::{steiner_exact_small, steiner_pptt};

const BENCHMARK: &str = include_str!("../data/majoranic_12.json");

type Outcome = Result<String, String>;

struct Report {
    hard_failures: usize,
}

impl Report {
    fn run(&mut self, id: u32, name: &str, limit: Option<Duration>, soft: bool, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {:.1}s, limit {:.0}s", elapsed.as_secs_f64(), l.as_secs_f64())),
            (o, _) => o,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) if soft => ("FAIL (soft target, flagged regression)", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        println!("criterion {id:>2} [{status}] {name}: {detail} ({:.2}s)", elapsed.as_secs_f64());
        if outcome.is_err() && !soft {
            self.hard_failures += 1;
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// 1. Jordan-Wigner strings

fn jw_expected(n: usize, j: usize, letter: Letter) -> PauliString {
    let mut letters: Vec<(usize, Letter)> = (0..j).map(|k| (k, Letter::Z)).collect();
    letters.push((j, letter));
    PauliString::from_letters(n, &letters)
}

fn criterion_1() -> Outcome {
    for n in 2..=16 {
        let t = jw_tree(n).map_err(|e| e.to_string())?;
        let a = t.pair_strings();
        for j in 0..n {
            ensure(a.operator(2 * j) == jw_expected(n, j, Letter::X), || format!("N={n} m_{}", 2 * j))?;
            ensure(a.operator(2 * j + 1) == jw_expected(n, j, Letter::Y), || format!("N={n} m_{}", 2 * j + 1))?;
        }
        let got: BTreeSet<String> = t.strings().iter().map(|p| p.to_string()).collect();
        let mut want: BTreeSet<String> = (0..n)
            .flat_map(|j| [jw_expected(n, j, Letter::X), jw_expected(n, j, Letter::Y)])
            .map(|p| p.to_string())
            .collect();
        want.insert(PauliString::z_type(n, 0..n).to_string());
        ensure(got == want, || format!("N={n} string set differs"))?;
    }
    Ok("N = 2..16 bit-exact".into())
}

// ---------------------------------------------------------------------------
// 2. Anticommutation and pairing soundness

fn gf2_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        if let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) {
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r][c] == 1 {
                    let src = rows[rank].clone();
                    rows[r].iter_mut().zip(&src).for_each(|(a, b)| *a ^= b);
                }
            }
            rank += 1;
        }
    }
    rank
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    for trial in 0..200 {
        let n = rng.gen_range(1..=12);
        let t = random_tree(n, &mut rng).map_err(|e| e.to_string())?;
        let strings = t.strings();
        ensure(strings.len() == 2 * n + 1, || format!("trial {trial}: {} strings", strings.len()))?;
        for a in 0..strings.len() {
            for b in a + 1..strings.len() {
                ensure(!strings[a].commutes(&strings[b]).unwrap(), || format!("trial {trial}: strings {a},{b} commute"))?;
            }
        }
        let asg = t.pair_strings();
        let qubits = t.qubits();
        let mut rows = Vec::new();
        for j in 0..n {
            let node = &t.nodes[t.node_of_mode(j).unwrap()];
            let (sx, sy) = (&asg.strings[2 * j], &asg.strings[2 * j + 1]);
            // differences where both letters are non-identity
            let diff: Vec<usize> = (0..sx.width())
                .filter(|&q| sx.letter(q) != sy.letter(q) && sx.letter(q) != Letter::I && sy.letter(q) != Letter::I)
                .collect();
            ensure(diff == vec![node.qubit], || format!("trial {trial}: pair of mode {j} differs at {diff:?}"))?;
            // i·m_{2j}·m_{2j+1} must be -Z_D
            let prod = asg.operator(2 * j).multiply(&asg.operator(2 * j + 1)).unwrap();
            let scaled = prod.phase_factor() * i();
            ensure(prod.is_z_type() && (scaled + 1.0).norm() < 1e-15, || {
                format!("trial {trial}: mode {j} number operator sign {scaled}")
            })?;
            let support = prod.support();
            rows.push(qubits.iter().map(|q| support.contains(q) as u8).collect());
        }
        ensure(gf2_rank(rows) == n, || format!("trial {trial}: D is singular"))?;
    }
    Ok("200 random trees, N <= 12".into())
}

// ---------------------------------------------------------------------------
// 3. Vacuum annihilation

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        let t = random_tree(n, &mut rng).map_err(|e| e.to_string())?;
        let asg = t.pair_strings();
        let vac = DenseState::zero(n).unwrap();
        for j in 0..n {
            // a_j = (m_2j + i m_2j+1) / 2 with signed strings
            let a = PauliSum::from_terms(
                n,
                [
                    (Complex64::new(0.5, 0.0), asg.operator(2 * j)),
                    (i() * 0.5, asg.operator(2 * j + 1)),
                ],
            )
            .unwrap();
            worst = worst.max(vac.apply_sum(&a).unwrap().norm());
            let via_poly = map_poly(&t, &annihilation(j), n).map_err(|e| e.to_string())?;
            worst = worst.max(vac.apply_sum(&via_poly).unwrap().norm());
        }
    }
    ensure(worst <= 1e-12, || format!("residual {worst:e}"))?;
    Ok(format!("50 mappings, max residual {worst:.1e}"))
}

// ---------------------------------------------------------------------------
// 4. Energy invariance

fn random_hamiltonian(n: usize, rng: &mut ChaCha8Rng) -> MajoranaPoly {
    let mut monos = Vec::new();
    for _ in 0..12 {
        let d = if rng.gen_bool(0.5) { 2 } else { 4 };
        let mut idx: Vec<usize> = (0..2 * n).collect();
        idx.shuffle(rng);
        idx.truncate(d);
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let m = MajoranaMonomial::new(idx, c).normalized();
        monos.push(m.adjoint().normalized());
        monos.push(m);
    }
    MajoranaPoly::from_monomials(monos)
}

fn random_ansatz(n: usize, rng: &mut ChaCha8Rng) -> FermionicAnsatz {
    let mut gens = Vec::new();
    for _ in 0..8 {
        let mut m: Vec<usize> = (0..n).collect();
        m.shuffle(rng);
        let mut k: Vec<usize> = (0..2 * n).collect();
        k.shuffle(rng);
        let kind = match rng.gen_range(0..4) {
            0 => GeneratorKind::Single { i: m[0], j: m[1] },
            1 => GeneratorKind::Double { i: m[0], j: m[1], k: m[2], l: m[3] },
            2 => GeneratorKind::Maj2 { u: k[0], v: k[1] },
            _ => GeneratorKind::Maj4 { u: k[0], v: k[1], r: k[2], s: k[3] },
        };
        gens.push(FermionicGenerator::new(kind, rng.gen_range(-1.0..1.0)));
    }
    let occ = (0..n).map(|_| rng.gen_range(0..2)).collect();
    FermionicAnsatz::new(n, occ, gens).unwrap()
}

fn energy(t: &MappingTree, h: &MajoranaPoly, a: &FermionicAnsatz) -> Result<f64, String> {
    let n = t.qubit_width();
    let bits = t.occupation_to_bitstring(&a.reference_occupations).map_err(|e| e.to_string())?;
    let mut s = DenseState::from_bits(&bits).unwrap();
    for g in t.map_ansatz(a).map_err(|e| e.to_string())? {
        s = s.apply_sum_exp(&g.sum, g.theta).unwrap();
    }
    let hq = map_poly(t, h, n).map_err(|e| e.to_string())?;
    let e = s.expectation(&hq).unwrap();
    if e.im.abs() > 1e-10 {
        return Err(format!("complex energy {e}"));
    }
    Ok(e.re)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let n = 5 + trial % 2;
        let h = random_hamiltonian(n, &mut rng);
        let a = random_ansatz(n, &mut rng);
        let t1 = random_tree(n, &mut rng).map_err(|e| e.to_string())?;
        let t2 = random_tree(n, &mut rng).map_err(|e| e.to_string())?;
        let (e1, e2) = (energy(&t1, &h, &a)?, energy(&t2, &h, &a)?);
        let e_jw = energy(&jw_tree(n).unwrap(), &h, &a)?;
        worst = worst.max((e1 - e2).abs()).max((e1 - e_jw).abs());
    }
    ensure(worst <= 1e-9, || format!("energy spread {worst:e}"))?;
    Ok(format!("20 triples, max spread {worst:.1e}"))
}

// ---------------------------------------------------------------------------
// 5. Braiding identity on two modes

fn criterion_5() -> Outcome {
    let t = jw_tree(2).unwrap();
    let asg = t.pair_strings();
    // S1 = m_1 = Y0, S2 = m_2 = Z0 X1
    let (s1, s2) = (asg.operator(1), asg.operator(2));
    ensure(s1.to_string() == "YI" && s2.to_string() == "ZX", || format!("S1={s1} S2={s2}"))?;
    let prod = s1.multiply(&s2).unwrap();
    let u12 = PauliSum::from_terms(2, [(Complex64::new(1.0, 0.0), prod)]).unwrap();
    let vac = DenseState::zero(2).unwrap();
    let out = vac.apply_sum_exp(&u12, std::f64::consts::FRAC_PI_4).unwrap();
    // doubly occupied Fock state, mode 0 created first
    let f11 = vac
        .apply_sum(&map_poly(&t, &creation(0), 2).unwrap())
        .unwrap()
        .apply_sum(&map_poly(&t, &creation(1), 2).unwrap())
        .unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let want: Vec<Complex64> = vac
        .amplitudes()
        .iter()
        .zip(f11.amplitudes())
        .map(|(v, f)| v * r - i() * r * f)
        .collect();
    let err = out
        .amplitudes()
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    ensure(err <= 1e-12, || format!("amplitude error {err:e}"))?;
    Ok(format!("(|00> - i|11>)/sqrt2 in the Fock basis, error {err:.1e}"))
}

// ---------------------------------------------------------------------------
// 6. Circuit correctness

fn random_graph(q: usize, rng: &mut ChaCha8Rng) -> HardwareGraph {
    let mut edges = Vec::new();
    for v in 1..q {
        edges.push((rng.gen_range(0..v), v));
    }
    for _ in 0..rng.gen_range(0..q) {
        let (a, b) = (rng.gen_range(0..q), rng.gen_range(0..q));
        if a != b && !edges.contains(&(a.min(b), a.max(b))) {
            edges.push((a.min(b), a.max(b)));
        }
    }
    HardwareGraph::new(q, edges).unwrap()
}

fn random_pauli(q: usize, rng: &mut ChaCha8Rng) -> PauliString {
    loop {
        let letters: Vec<(usize, Letter)> = (0..q)
            .map(|k| (k, [Letter::I, Letter::X, Letter::Y, Letter::Z][rng.gen_range(0..4)]))
            .collect();
        let p = PauliString::from_letters(q, &letters);
        if !p.is_identity() {
            return if rng.gen_bool(0.5) { p.negated() } else { p };
        }
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6006);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let q = rng.gen_range(1..=8);
        let g = if q == 1 {
            HardwareGraph::new(1, []).unwrap()
        } else {
            random_graph(q, &mut rng)
        };
        let p = random_pauli(q, &mut rng);
        let theta = rng.gen_range(-3.0..3.0);
        let support = p.support();
        let st = steiner_exact_small(&g, &support).map_err(|e| e.to_string())?;
        let c = compile_pauli_exp(&p, theta, &g, &st).map_err(|e| e.to_string())?;
        let (n, k) = (st.tree_vertices.len(), support.len());
        ensure(c.cnot_count() == 2 * (2 * n - k - 1), || {
            format!("trial {trial}: {} cnots, n={n} k={k}", c.cnot_count())
        })?;
        c.check_edges(&g).map_err(|e| format!("trial {trial}: {e}"))?;
        let d = phase_insensitive_distance(&circuit_unitary(&c).unwrap(), &pauli_exp_matrix(&p, theta).unwrap());
        worst = worst.max(d);
        ensure(d <= 1e-9, || format!("trial {trial}: distance {d:e} for {p}"))?;
    }
    Ok(format!("100 exponentials, max distance {worst:.1e}, cnot counts exact"))
}

// ---------------------------------------------------------------------------
// 7. Steiner optimality

/// Minimum number of vertices of a connected superset of `terminals`, by
/// enumerating vertex subsets in order of size.
fn brute_force_steiner(g: &HardwareGraph, terminals: &[usize]) -> usize {
    let others: Vec<usize> = (0..g.n_vertices()).filter(|v| !terminals.contains(v)).collect();
    let mut best = usize::MAX;
    for mask in 0u32..1 << others.len() {
        let extra = mask.count_ones() as usize;
        if terminals.len() + extra >= best {
            continue;
        }
        let mut set: Vec<usize> = terminals.to_vec();
        set.extend(others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &v)| v));
        if connected_in(&set, |a, b| g.has_edge(a, b)) {
            best = set.len();
        }
    }
    best
}

fn components_in(set: &[usize], adj: impl Fn(usize, usize) -> bool) -> usize {
    let mut seen = vec![false; set.len()];
    let mut comps = 0;
    for s in 0..set.len() {
        if seen[s] {
            continue;
        }
        comps += 1;
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(a) = queue.pop_front() {
            for b in 0..set.len() {
                if !seen[b] && adj(set[a], set[b]) {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
    }
    comps
}

fn connected_in(set: &[usize], adj: impl Fn(usize, usize) -> bool) -> bool {
    components_in(set, adj) == 1
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let graphs = [HardwareGraph::heavy_hex(12).unwrap(), HardwareGraph::grid(3, 4).unwrap()];
    let mut samples: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut counts = [0usize; 2];
    for s in 0..500 {
        let gi = s % 2;
        let g = &graphs[gi];
        let n = rng.gen_range(4..=10);
        let t = random_subtree(g, n, &mut rng).map_err(|e| e.to_string())?;
        let tree_edges: BTreeSet<(usize, usize)> = t.qubit_edges().into_iter().collect();
        let tree_adj = |a: usize, b: usize| tree_edges.contains(&(a.min(b), a.max(b)));
        let asg = t.pair_strings();
        let arity = if rng.gen_bool(0.5) { 2 } else { 4 };
        let mut idx: Vec<usize> = (0..2 * n).collect();
        idx.shuffle(&mut rng);
        let mut prod = PauliString::identity(t.qubit_width());
        for &k in &idx[..arity] {
            prod = prod.multiply(&asg.operator(k)).unwrap();
        }
        let support = prod.support();
        let comps = components_in(&support, tree_adj);
        if arity == 2 {
            counts[0] += 1;
            ensure(comps == 1, || format!("sample {s}: 2-product support splits into {comps} parts on the tree"))?;
        } else {
            counts[1] += 1;
            let fixable = comps <= 2
                || t.qubits().iter().filter(|q| !support.contains(q)).any(|&v| {
                    let mut with = support.clone();
                    with.push(v);
                    connected_in(&with, tree_adj)
                });
            ensure(fixable, || format!("sample {s}: 4-product support has {comps} parts, no single fix"))?;
        }
        let pptt = steiner_pptt(g, &support).map_err(|e| format!("sample {s}: {e}"))?;
        let exact = steiner_exact_small(g, &support).map_err(|e| e.to_string())?;
        let brute = brute_force_steiner(g, &support);
        ensure(pptt.size() == exact.size() && exact.size() == brute, || {
            format!("sample {s}: pptt {} exact {} brute {brute}", pptt.size(), exact.size())
        })?;
        samples.push((gi, support));
    }
    // monotonicity under edge additions
    for trial in 0..100 {
        let (gi, support) = &samples[rng.gen_range(0..samples.len())];
        let g = &graphs[*gi];
        let before = steiner_pptt(g, support).unwrap().size();
        let q = g.n_vertices();
        let richer = loop {
            let (a, b) = (rng.gen_range(0..q), rng.gen_range(0..q));
            if let Some(h) = g.with_edge(a, b) {
                break h;
            }
        };
        let after = steiner_pptt(&richer, support).map_err(|e| format!("edge addition {trial}: {e}"))?;
        let exact = steiner_exact_small(&richer, support).unwrap();
        ensure(after.size() <= before && after.size() == exact.size(), || {
            format!("edge addition {trial}: size {before} -> {}", after.size())
        })?;
    }
    Ok(format!(
        "{} two-majorana and {} four-majorana strings optimal, 100 edge additions monotone",
        counts[0], counts[1]
    ))
}

// ---------------------------------------------------------------------------
// 8. Annealing guarantees

fn criterion_8() -> Outcome {
    let a = FermionicAnsatz::from_json(BENCHMARK).map_err(|e| e.to_string())?;
    let g = HardwareGraph::heavy_hex(27).unwrap();
    for (mode, cost) in [
        (SearchMode::Cp, AnnealCost::Pauli),
        (SearchMode::Ncp, AnnealCost::Pauli),
        (SearchMode::Free, AnnealCost::Pauli),
        (SearchMode::Ms, AnnealCost::Pauli),
        (SearchMode::Cp, AnnealCost::Compiled),
    ] {
        let cfg = AnnealConfig {
            iterations: 400,
            restarts: 2,
            seed: 88,
            search_mode: mode,
            cost_kind: cost,
            ..AnnealConfig::default()
        };
        let r1 = treespile(&a, &g, &cfg).map_err(|e| e.to_string())?;
        let r2 = treespile(&a, &g, &cfg).map_err(|e| e.to_string())?;
        ensure(r1.best_cost <= r1.initial_cost, || format!("{mode:?}: best above initial"))?;
        let j1 = format!("{}{}", serde_json::to_string(&r1).unwrap(), r1.best_mapping.to_json());
        let j2 = format!("{}{}", serde_json::to_string(&r2).unwrap(), r2.best_mapping.to_json());
        ensure(j1 == j2, || format!("{mode:?}/{cost:?}: seeded runs differ"))?;
        let mut best = usize::MAX;
        for &(_, c) in &r1.cost_trace {
            best = best.min(c);
        }
        ensure(best == r1.best_cost, || format!("{mode:?}: trace minimum {best} vs best {}", r1.best_cost))?;
    }
    // move fuzzing
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let mut moves = 0;
    for (mode, start) in [
        (SearchMode::Cp, bonsai_tree(&g, 12).unwrap()),
        (SearchMode::Ncp, bonsai_tree(&g, 12).unwrap()),
        (SearchMode::Free, random_tree(12, &mut rng).unwrap()),
        (SearchMode::Ms, jw_tree(12).unwrap()),
    ] {
        let mut m = start;
        for _ in 0..25_000 {
            if let Some((_, next)) = propose_move(&m, &g, mode, true, &mut rng).map_err(|e| e.to_string())? {
                next.validate().map_err(|e| format!("{mode:?}: {e}"))?;
                ensure(next.n_legs() == 25, || format!("{mode:?}: {} legs", next.n_legs()))?;
                if mode == SearchMode::Cp {
                    ensure(next.is_subgraph_of(&g), || "cp move left the device".into())?;
                }
                m = next;
            }
            moves += 1;
        }
    }
    Ok(format!("5 seeded configs deterministic and monotone, {moves} fuzzed moves valid"))
}

// ---------------------------------------------------------------------------
// 9. Scaled reduction benchmark

fn criterion_9() -> Outcome {
    let a = FermionicAnsatz::from_json(BENCHMARK).map_err(|e| e.to_string())?;
    let g = HardwareGraph::heavy_hex(127).unwrap();
    let cfg = AnnealConfig {
        iterations: 20_000,
        restarts: 5,
        seed: 7,
        search_mode: SearchMode::Cp,
        cost_kind: AnnealCost::Pauli,
        ..AnnealConfig::default()
    };
    let r = treespile(&a, &g, &cfg).map_err(|e| e.to_string())?;
    let ratio = r.best_cost as f64 / r.initial_cost as f64;
    let detail = format!("bonsai {} -> {} CNOTs (ratio {ratio:.3}, target <= 0.8)", r.initial_cost, r.best_cost);
    ensure(r.best_cost <= r.initial_cost, || format!("monotonicity broken: {detail}"))?;
    ensure(ratio <= 0.8, || detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// 10. Enumeration bounds

/// Ordered ternary trees with `n` nodes: C(3n, n) / (2n + 1).
fn ternary_trees(n: usize) -> u128 {
    let mut c: u128 = 1;
    for k in 0..n as u128 {
        c = c * (3 * n as u128 - k) / (k + 1);
    }
    c / (2 * n as u128 + 1)
}

fn criterion_10() -> Outcome {
    let mut lines = Vec::new();
    for (n, q) in [(2, 2), (2, 3), (3, 3)] {
        let r = count(&HardwareGraph::complete(q).unwrap(), n).map_err(|e| e.to_string())?;
        let falling: u128 = (0..n as u128).map(|k| q as u128 - k).product();
        let fact: u128 = (1..=n as u128).product();
        let expected = ternary_trees(n) * falling * fact * (1 << n);
        ensure(r.mappings == expected, || format!("n={n} Q={q}: counted {} expected {expected}", r.mappings))?;
        ensure(r.mappings <= mapping_bound(n, q), || format!("n={n} Q={q}: {} above bound", r.mappings))?;
        lines.push(format!("n={n},Q={q}: {}<={}", r.mappings, r.bound));
    }
    for (n, q) in [(2, 3), (3, 4), (3, 5), (4, 6)] {
        let r = count(&HardwareGraph::line(q).unwrap(), n).map_err(|e| e.to_string())?;
        ensure(r.connected_mappings <= bounded_degree_bound(n, q, 2), || {
            format!("line({q}) n={n}: {} above degree bound", r.connected_mappings)
        })?;
        lines.push(format!("line({q}),n={n}: {}<={}", r.connected_mappings, r.bounded_degree_bound));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------------------
// 11. Reachability and the degree obstruction

fn criterion_11() -> Outcome {
    let g = HardwareGraph::grid(2, 3).unwrap();
    let r = reachability(&g, 3).map_err(|e| e.to_string())?;
    ensure(r.total == 240 * 48, || format!("enumerated {} mappings, expected 11520", r.total))?;
    ensure(r.reached == r.total, || format!("reached {}/{}", r.reached, r.total))?;

    // node 1 already has a parent and three children; one more would give it degree 5
    let mut nodes: Vec<Node> = (0..6).map(|k| Node::leaf(k, k)).collect();
    nodes[0].children = [Some(5), None, Some(1)];
    nodes[1].children = [Some(2), Some(3), Some(4)];
    nodes[5].braid = Braid::Minus;
    let m = MappingTree::new(nodes, 0).map_err(|e| e.to_string())?;
    let k6 = HardwareGraph::complete(6).unwrap();
    let attempt = treespile::anneal::Move::Leaf {
        v: 5,
        target: 1,
        slot: treespile::mapping::Slot::Y,
        qubit: 5,
    };
    ensure(apply_move(&m, attempt).is_err(), || "degree-5 leaf move was applied".into())?;
    for mode in [SearchMode::Cp, SearchMode::Ncp, SearchMode::Free] {
        for mv in legal_moves(&m, &k6, mode, MoveKind::Leaf) {
            if let treespile::anneal::Move::Leaf { target, .. } = mv {
                ensure(target != 1, || format!("{mode:?} offered a move into the full node"))?;
            }
        }
    }
    Ok(format!("{}/{} mappings reached, degree-5 move rejected", r.reached, r.total))
}

fn main() {
    let mut report = Report { hard_failures: 0 };
    let s = Duration::from_secs;
    report.run(1, "JW equivalence", Some(s(1)), false, criterion_1);
    report.run(2, "anticommutation and pairing", Some(s(30)), false, criterion_2);
    report.run(3, "vacuum annihilation", Some(s(60)), false, criterion_3);
    report.run(4, "energy invariance", Some(s(120)), false, criterion_4);
    report.run(5, "braiding identity", None, false, criterion_5);
    report.run(6, "circuit correctness", Some(s(120)), false, criterion_6);
    report.run(7, "steiner optimality", Some(s(300)), false, criterion_7);
    report.run(8, "annealing guarantees", None, false, criterion_8);
    report.run(9, "scaled reduction benchmark", Some(s(300)), true, criterion_9);
    report.run(10, "enumeration bounds", Some(s(120)), false, criterion_10);
    report.run(11, "reachability", Some(s(120)), false, criterion_11);
    if report.hard_failures > 0 {
        println!("{} acceptance criteria failed", report.hard_failures);
        std::process::exit(1);
    }
    println!("all hard acceptance criteria passed");
}
