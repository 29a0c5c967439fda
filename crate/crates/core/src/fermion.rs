//! Fermionic side of the toolkit: Majorana monomials, excitation generators,
//! operator pools, ansatz and Hamiltonian descriptions with their JSON forms.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Letter, PauliString, PauliSum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FermionError {
    #[error("repeated index {0} in generator")]
    RepeatedIndex(usize),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("generator kind {kind:?} needs {expected} indices, got {got}")]
    Arity {
        kind: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown generator kind {0:?}")]
    UnknownKind(String),
    #[error("pool has no fermionic representation (kind {0:?})")]
    NonFermionicPool(String),
    #[error("reference occupation must be 0 or 1, got {0}")]
    BadOccupation(u8),
    #[error("expected {expected} reference occupations, got {got}")]
    OccupationLength { expected: usize, got: usize },
    #[error("hamiltonian is not hermitian: term {0:?} has no matching conjugate")]
    NotHermitian(Vec<usize>),
    #[error("pool enumeration needs at least 2 modes")]
    TooFewModes,
    #[error("invalid json: {0}")]
    Json(String),
}

/// `coeff · m_{i_0} m_{i_1} …` over Majorana operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajoranaMonomial {
    pub indices: Vec<usize>,
    pub coeff: Complex64,
}

impl MajoranaMonomial {
    pub fn new(indices: Vec<usize>, coeff: Complex64) -> Self {
        MajoranaMonomial { indices, coeff }
    }

    /// Sorts the indices, flipping the sign once per transposition of distinct
    /// operators and cancelling equal neighbours (`m_k m_k = 1`).
    pub fn normalized(&self) -> MajoranaMonomial {
        let mut idx = self.indices.clone();
        let mut coeff = self.coeff;
        // insertion sort keeps track of the permutation parity
        for i in 1..idx.len() {
            let mut j = i;
            while j > 0 && idx[j - 1] > idx[j] {
                idx.swap(j - 1, j);
                coeff = -coeff;
                j -= 1;
            }
        }
        let mut out: Vec<usize> = Vec::with_capacity(idx.len());
        for k in idx {
            if out.last() == Some(&k) {
                out.pop();
            } else {
                out.push(k);
            }
        }
        MajoranaMonomial {
            indices: out,
            coeff,
        }
    }

    /// Hermitian conjugate in normalized form.
    pub fn adjoint(&self) -> MajoranaMonomial {
        let mut idx = self.indices.clone();
        idx.reverse();
        MajoranaMonomial::new(idx, self.coeff.conj()).normalized()
    }

    pub fn times(&self, other: &MajoranaMonomial) -> MajoranaMonomial {
        let mut idx = self.indices.clone();
        idx.extend_from_slice(&other.indices);
        MajoranaMonomial::new(idx, self.coeff * other.coeff).normalized()
    }
}

/// Sum of Majorana monomials, kept normalized and merged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MajoranaPoly {
    terms: BTreeMap<Vec<usize>, Complex64>,
}

impl MajoranaPoly {
    pub fn from_monomials(monos: impl IntoIterator<Item = MajoranaMonomial>) -> Self {
        let mut p = MajoranaPoly::default();
        for m in monos {
            p.add(m);
        }
        p
    }

    pub fn add(&mut self, m: MajoranaMonomial) {
        let m = m.normalized();
        *self.terms.entry(m.indices).or_insert(Complex64::new(0.0, 0.0)) += m.coeff;
    }

    pub fn mul(&self, other: &MajoranaPoly) -> MajoranaPoly {
        let mut out = MajoranaPoly::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add(MajoranaMonomial::new(a.clone(), *ca).times(&MajoranaMonomial::new(b.clone(), *cb)));
            }
        }
        out
    }

    pub fn sub(&self, other: &MajoranaPoly) -> MajoranaPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add(MajoranaMonomial::new(k.clone(), -c));
        }
        out
    }

    /// Monomials with non-vanishing coefficients, in index order.
    pub fn monomials(&self) -> Vec<MajoranaMonomial> {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm() > 1e-12)
            .map(|(k, c)| MajoranaMonomial::new(k.clone(), *c))
            .collect()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `a_j^† = (m_{2j} - i m_{2j+1}) / 2`
pub fn creation(j: usize) -> MajoranaPoly {
    MajoranaPoly::from_monomials([
        MajoranaMonomial::new(vec![2 * j], c(0.5, 0.0)),
        MajoranaMonomial::new(vec![2 * j + 1], c(0.0, -0.5)),
    ])
}

/// `a_j = (m_{2j} + i m_{2j+1}) / 2`
pub fn annihilation(j: usize) -> MajoranaPoly {
    MajoranaPoly::from_monomials([
        MajoranaMonomial::new(vec![2 * j], c(0.5, 0.0)),
        MajoranaMonomial::new(vec![2 * j + 1], c(0.0, 0.5)),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// `a_i^† a_j - a_j^† a_i`
    Single { i: usize, j: usize },
    /// `a_i^† a_j^† a_k a_l - a_k^† a_l^† a_i a_j`
    Double { i: usize, j: usize, k: usize, l: usize },
    /// `m_u m_v`
    Maj2 { u: usize, v: usize },
    /// `i m_u m_v m_r m_s`
    Maj4 { u: usize, v: usize, r: usize, s: usize },
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Single { .. } => "single",
            GeneratorKind::Double { .. } => "double",
            GeneratorKind::Maj2 { .. } => "maj2",
            GeneratorKind::Maj4 { .. } => "maj4",
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        match *self {
            GeneratorKind::Single { i, j } => vec![i, j],
            GeneratorKind::Double { i, j, k, l } => vec![i, j, k, l],
            GeneratorKind::Maj2 { u, v } => vec![u, v],
            GeneratorKind::Maj4 { u, v, r, s } => vec![u, v, r, s],
        }
    }

    pub fn is_majoranic(&self) -> bool {
        matches!(self, GeneratorKind::Maj2 { .. } | GeneratorKind::Maj4 { .. })
    }

    pub fn from_parts(kind: &str, indices: &[usize]) -> Result<Self, FermionError> {
        let arity = |n: usize| {
            if indices.len() != n {
                Err(FermionError::Arity {
                    kind: kind.to_string(),
                    expected: n,
                    got: indices.len(),
                })
            } else {
                Ok(())
            }
        };
        match kind {
            "single" => {
                arity(2)?;
                Ok(GeneratorKind::Single { i: indices[0], j: indices[1] })
            }
            "double" => {
                arity(4)?;
                Ok(GeneratorKind::Double {
                    i: indices[0],
                    j: indices[1],
                    k: indices[2],
                    l: indices[3],
                })
            }
            "maj2" => {
                arity(2)?;
                Ok(GeneratorKind::Maj2 { u: indices[0], v: indices[1] })
            }
            "maj4" => {
                arity(4)?;
                Ok(GeneratorKind::Maj4 {
                    u: indices[0],
                    v: indices[1],
                    r: indices[2],
                    s: indices[3],
                })
            }
            "qeb" | "qeb_single" | "qeb_double" | "qubit" => {
                Err(FermionError::NonFermionicPool(kind.to_string()))
            }
            other => Err(FermionError::UnknownKind(other.to_string())),
        }
    }

    /// Checks distinctness and ranges: mode indices `< n_modes`, Majorana
    /// indices `< 2 n_modes`.
    pub fn validate(&self, n_modes: usize) -> Result<(), FermionError> {
        let limit = if self.is_majoranic() { 2 * n_modes } else { n_modes };
        let idx = self.indices();
        for (a, &x) in idx.iter().enumerate() {
            if x >= limit {
                return Err(FermionError::IndexOutOfRange { index: x, limit });
            }
            if idx[..a].contains(&x) {
                return Err(FermionError::RepeatedIndex(x));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionicGenerator {
    pub kind: GeneratorKind,
    pub theta: f64,
}

impl FermionicGenerator {
    pub fn new(kind: GeneratorKind, theta: f64) -> Self {
        FermionicGenerator { kind, theta }
    }
}

/// Expands a generator into normalized Majorana monomials. The sum is
/// anti-Hermitian for every kind.
pub fn expand_generator(
    g: &GeneratorKind,
    n_modes: usize,
) -> Result<Vec<MajoranaMonomial>, FermionError> {
    g.validate(n_modes)?;
    let monos = match *g {
        GeneratorKind::Maj2 { u, v } => vec![MajoranaMonomial::new(vec![u, v], c(1.0, 0.0)).normalized()],
        GeneratorKind::Maj4 { u, v, r, s } => {
            vec![MajoranaMonomial::new(vec![u, v, r, s], c(0.0, 1.0)).normalized()]
        }
        GeneratorKind::Single { i, j } => {
            let fwd = creation(i).mul(&annihilation(j));
            let back = creation(j).mul(&annihilation(i));
            fwd.sub(&back).monomials()
        }
        GeneratorKind::Double { i, j, k, l } => {
            let fwd = creation(i)
                .mul(&creation(j))
                .mul(&annihilation(k))
                .mul(&annihilation(l));
            let back = creation(k)
                .mul(&creation(l))
                .mul(&annihilation(i))
                .mul(&annihilation(j));
            fwd.sub(&back).monomials()
        }
    };
    Ok(monos)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionicAnsatz {
    pub n_modes: usize,
    pub reference_occupations: Vec<u8>,
    pub generators: Vec<FermionicGenerator>,
}

impl FermionicAnsatz {
    pub fn new(
        n_modes: usize,
        reference_occupations: Vec<u8>,
        generators: Vec<FermionicGenerator>,
    ) -> Result<Self, FermionError> {
        let a = FermionicAnsatz {
            n_modes,
            reference_occupations,
            generators,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<(), FermionError> {
        if self.reference_occupations.len() != self.n_modes {
            return Err(FermionError::OccupationLength {
                expected: self.n_modes,
                got: self.reference_occupations.len(),
            });
        }
        if let Some(&b) = self.reference_occupations.iter().find(|&&b| b > 1) {
            return Err(FermionError::BadOccupation(b));
        }
        for g in &self.generators {
            g.kind.validate(self.n_modes)?;
        }
        Ok(())
    }

    /// True when every generator is a single Majorana monomial.
    pub fn is_majoranic(&self) -> bool {
        self.generators.iter().all(|g| g.kind.is_majoranic())
    }

    pub fn from_json(text: &str) -> Result<Self, FermionError> {
        let file: AnsatzFile = serde_json::from_str(text).map_err(|e| FermionError::Json(e.to_string()))?;
        let generators = file
            .generators
            .iter()
            .map(|g| Ok(FermionicGenerator::new(GeneratorKind::from_parts(&g.kind, &g.indices)?, g.theta)))
            .collect::<Result<Vec<_>, FermionError>>()?;
        FermionicAnsatz::new(file.n_modes, file.reference_occupations, generators)
    }

    pub fn to_json(&self) -> String {
        let file = AnsatzFile {
            n_modes: self.n_modes,
            reference_occupations: self.reference_occupations.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorEntry {
                    kind: g.kind.name().to_string(),
                    indices: g.kind.indices(),
                    theta: g.theta,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("ansatz serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GeneratorEntry {
    kind: String,
    indices: Vec<usize>,
    theta: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct AnsatzFile {
    n_modes: usize,
    reference_occupations: Vec<u8>,
    generators: Vec<GeneratorEntry>,
}

/// Second-quantized Hamiltonian in Majorana form.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub n_modes: usize,
    pub terms: Vec<MajoranaMonomial>,
}

impl HamiltonianSpec {
    /// Validates index ranges and hermiticity.
    pub fn new(n_modes: usize, terms: Vec<MajoranaMonomial>) -> Result<Self, FermionError> {
        for t in &terms {
            if let Some(&k) = t.indices.iter().find(|&&k| k >= 2 * n_modes) {
                return Err(FermionError::IndexOutOfRange {
                    index: k,
                    limit: 2 * n_modes,
                });
            }
        }
        let h = HamiltonianSpec { n_modes, terms };
        h.check_hermitian(1e-10)?;
        Ok(h)
    }

    /// Every merged monomial must equal the coefficient of its conjugate.
    pub fn check_hermitian(&self, tol: f64) -> Result<(), FermionError> {
        let poly = MajoranaPoly::from_monomials(self.terms.iter().cloned());
        let merged: BTreeMap<Vec<usize>, Complex64> =
            poly.monomials().into_iter().map(|m| (m.indices, m.coeff)).collect();
        for (idx, coeff) in &merged {
            let adj = MajoranaMonomial::new(idx.clone(), *coeff).adjoint();
            let partner = merged.get(&adj.indices).copied().unwrap_or_default();
            if (partner - adj.coeff).norm() > tol {
                return Err(FermionError::NotHermitian(idx.clone()));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, FermionError> {
        let file: HamiltonianFile = serde_json::from_str(text).map_err(|e| FermionError::Json(e.to_string()))?;
        let terms = file
            .terms
            .into_iter()
            .map(|t| MajoranaMonomial::new(t.majoranas, c(t.coeff[0], t.coeff[1])))
            .collect();
        HamiltonianSpec::new(file.n_modes, terms)
    }

    pub fn to_json(&self) -> String {
        let file = HamiltonianFile {
            n_modes: self.n_modes,
            terms: self
                .terms
                .iter()
                .map(|t| HamiltonianTerm {
                    majoranas: t.indices.clone(),
                    coeff: [t.coeff.re, t.coeff.im],
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("hamiltonian serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct HamiltonianTerm {
    majoranas: Vec<usize>,
    coeff: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
struct HamiltonianFile {
    n_modes: usize,
    terms: Vec<HamiltonianTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolKind {
    Fermionic,
    Majoranic,
    Qeb,
    Qubit,
}

/// Pool elements: generators with a fermionic form, or Jordan-Wigner-frame
/// qubit operators that cannot be re-mapped.
#[derive(Debug, Clone, PartialEq)]
pub enum Pool {
    Fermionic(Vec<GeneratorKind>),
    JordanWignerOnly(Vec<PauliSum>),
}

impl Pool {
    pub fn len(&self) -> usize {
        match self {
            Pool::Fermionic(v) => v.len(),
            Pool::JordanWignerOnly(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_fermionic(&self) -> bool {
        matches!(self, Pool::Fermionic(_))
    }
}

/// Unordered index pairs and disjoint pair-of-pairs, one representative per
/// operator up to sign.
fn excitation_indices(n: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize, usize, usize)>) {
    let mut singles = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            singles.push((i, j));
        }
    }
    let mut doubles = Vec::new();
    for &(i, j) in &singles {
        for &(k, l) in &singles {
            if (i, j) < (k, l) && k != i && k != j && l != i && l != j {
                doubles.push((i, j, k, l));
            }
        }
    }
    (singles, doubles)
}

/// QEB single excitation `(i/2)(X_i Y_j - Y_i X_j)`.
pub fn qeb_single(n: usize, i: usize, j: usize) -> PauliSum {
    let t = |a: Letter, b: Letter| PauliString::from_letters(n, &[(i, a), (j, b)]);
    PauliSum::from_terms(
        n,
        [
            (c(0.0, 0.5), t(Letter::X, Letter::Y)),
            (c(0.0, -0.5), t(Letter::Y, Letter::X)),
        ],
    )
    .expect("widths agree")
}

/// QEB double excitation: eight weight-4 strings with coefficients `±i/8`.
pub fn qeb_double(n: usize, i: usize, j: usize, k: usize, l: usize) -> PauliSum {
    use Letter::{X, Y};
    let pattern: [(f64, [Letter; 4]); 8] = [
        (1.0, [X, Y, X, X]),
        (1.0, [Y, X, X, X]),
        (1.0, [Y, Y, Y, X]),
        (1.0, [Y, Y, X, Y]),
        (-1.0, [X, X, Y, X]),
        (-1.0, [X, X, X, Y]),
        (-1.0, [Y, X, Y, Y]),
        (-1.0, [X, Y, Y, Y]),
    ];
    let terms = pattern.iter().map(|(s, ls)| {
        (
            c(0.0, s / 8.0),
            PauliString::from_letters(n, &[(i, ls[0]), (j, ls[1]), (k, ls[2]), (l, ls[3])]),
        )
    });
    PauliSum::from_terms(n, terms).expect("widths agree")
}

/// Enumerates a pool over the full index ranges (no spin or particle-number
/// filtering).
pub fn enumerate_pool(kind: PoolKind, n_modes: usize) -> Result<Pool, FermionError> {
    if n_modes < 2 {
        return Err(FermionError::TooFewModes);
    }
    let (singles, doubles) = excitation_indices(n_modes);
    Ok(match kind {
        PoolKind::Fermionic => Pool::Fermionic(
            singles
                .iter()
                .map(|&(i, j)| GeneratorKind::Single { i, j })
                .chain(doubles.iter().map(|&(i, j, k, l)| GeneratorKind::Double { i, j, k, l }))
                .collect(),
        ),
        PoolKind::Majoranic => {
            let m = 2 * n_modes;
            let mut out = Vec::new();
            for u in 0..m {
                for v in u + 1..m {
                    out.push(GeneratorKind::Maj2 { u, v });
                }
            }
            for u in 0..m {
                for v in u + 1..m {
                    for r in v + 1..m {
                        for s in r + 1..m {
                            out.push(GeneratorKind::Maj4 { u, v, r, s });
                        }
                    }
                }
            }
            Pool::Fermionic(out)
        }
        PoolKind::Qeb => Pool::JordanWignerOnly(
            singles
                .iter()
                .map(|&(i, j)| qeb_single(n_modes, i, j))
                .chain(doubles.iter().map(|&(i, j, k, l)| qeb_double(n_modes, i, j, k, l)))
                .collect(),
        ),
        PoolKind::Qubit => {
            let mut seen = std::collections::BTreeSet::new();
            let mut out = Vec::new();
            let qeb = singles
                .iter()
                .map(|&(i, j)| qeb_single(n_modes, i, j))
                .chain(doubles.iter().map(|&(i, j, k, l)| qeb_double(n_modes, i, j, k, l)));
            for sum in qeb {
                for (_, p) in sum.terms() {
                    if seen.insert(p.letters()) {
                        out.push(
                            PauliSum::from_terms(n_modes, [(c(0.0, 1.0), p.clone())]).expect("width"),
                        );
                    }
                }
            }
            Pool::JordanWignerOnly(out)
        }
    })
}
