//! Phase-tracked Pauli strings in symplectic (x, z) bit form, and sums of them.
//!
//! A [`PauliString`] stores a global factor `i^phase` together with one `(x, z)`
//! bit pair per qubit: `(0,0) = I`, `(1,0) = X`, `(1,1) = Y`, `(0,1) = Z`. The
//! letters are the Hermitian Paulis, so `Y` is stored with no hidden phase.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

const WORD: usize = 64;

fn words_for(width: usize) -> usize {
    width.div_ceil(WORD)
}

/// `i^phase · P_0 ⊗ P_1 ⊗ … ⊗ P_{width-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    width: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(width: usize) -> Self {
        let n = words_for(width);
        PauliString {
            width,
            x: vec![0; n],
            z: vec![0; n],
            phase: 0,
        }
    }

    /// A single non-identity letter on `qubit`.
    pub fn single(width: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(width);
        p.set(qubit, letter);
        p
    }

    /// Builds a string from `(qubit, letter)` pairs. Later pairs on the same
    /// qubit overwrite earlier ones.
    pub fn from_letters(width: usize, letters: &[(usize, Letter)]) -> Self {
        let mut p = Self::identity(width);
        for &(q, l) in letters {
            p.set(q, l);
        }
        p
    }

    /// Z on every qubit of `qubits`.
    pub fn z_type(width: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        let mut p = Self::identity(width);
        for q in qubits {
            p.set(q, Letter::Z);
        }
        p
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Exponent `k` of the global factor `i^k`, always in `0..4`.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    /// Global factor `i^phase` as a complex number.
    pub fn phase_factor(&self) -> Complex64 {
        phase_to_complex(self.phase)
    }

    /// Same letters with the global factor reset to `+1`.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.phase = 0;
        p
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.phase = (p.phase + 2) & 3;
        p
    }

    /// Panics when `qubit >= width`.
    pub fn letter(&self, qubit: usize) -> Letter {
        assert!(qubit < self.width, "qubit {qubit} out of range");
        let (w, b) = (qubit / WORD, qubit % WORD);
        Letter::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    /// Panics when `qubit >= width`.
    pub fn set(&mut self, qubit: usize, letter: Letter) {
        assert!(qubit < self.width, "qubit {qubit} out of range");
        let (w, b) = (qubit / WORD, qubit % WORD);
        let (xb, zb) = letter.bits();
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | if xb { mask } else { 0 };
        self.z[w] = (self.z[w] & !mask) | if zb { mask } else { 0 };
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, qubit: usize) -> bool {
        (self.x[qubit / WORD] >> (qubit % WORD)) & 1 == 1
    }

    pub fn z_bit(&self, qubit: usize) -> bool {
        (self.z[qubit / WORD] >> (qubit % WORD)) & 1 == 1
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            let mut bits = x | z;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(w * WORD + b);
                bits &= bits - 1;
            }
        }
        out
    }

    pub fn weight_and_support(&self) -> (usize, Vec<usize>) {
        let s = self.support();
        (s.len(), s)
    }

    /// True when every letter is the identity (the phase is ignored).
    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True when every letter is I or Z.
    pub fn is_z_type(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// `P` is Hermitian iff its global factor is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Copy of this string on a wider register; extra qubits carry identity.
    pub fn padded(&self, width: usize) -> Result<Self, PauliError> {
        if width < self.width {
            return Err(PauliError::WidthMismatch(self.width, width));
        }
        let mut p = self.clone();
        p.width = width;
        p.x.resize(words_for(width), 0);
        p.z.resize(words_for(width), 0);
        Ok(p)
    }

    fn check_width(&self, other: &Self) -> Result<(), PauliError> {
        if self.width != other.width {
            Err(PauliError::WidthMismatch(self.width, other.width))
        } else {
            Ok(())
        }
    }

    /// Exact product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        self.check_width(other)?;
        let mut plus = 0u32;
        let mut minus = 0u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (a_x, a_y, a_z) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (b_x, b_y, b_z) = (x2 & !z2, x2 & z2, !x2 & z2);
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i.
            plus += ((a_x & b_y) | (a_y & b_z) | (a_z & b_x)).count_ones();
            minus += ((a_x & b_z) | (a_y & b_x) | (a_z & b_y)).count_ones();
            x.push(x1 ^ x2);
            z.push(z1 ^ z2);
        }
        let phase = (self.phase as u32 + other.phase as u32 + plus + 3 * minus) % 4;
        Ok(PauliString {
            width: self.width,
            x,
            z,
            phase: phase as u8,
        })
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &Self) -> Result<bool, PauliError> {
        self.check_width(other)?;
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        Ok(parity == 0)
    }

    /// Ordering used for canonical sums: lexicographic on the z bits and
    /// then the x bits, qubit 0 most significant.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        fn cmp_bits(a: &[u64], b: &[u64]) -> Ordering {
            for (wa, wb) in a.iter().zip(b) {
                let o = wa.reverse_bits().cmp(&wb.reverse_bits());
                if o != Ordering::Equal {
                    return o;
                }
            }
            a.len().cmp(&b.len())
        }
        cmp_bits(&self.z, &other.z).then_with(|| cmp_bits(&self.x, &other.x))
    }

    /// Letters only, qubit 0 first.
    pub fn letters(&self) -> String {
        (0..self.width).map(|q| self.letter(q).as_char()).collect()
    }
}

pub(crate) fn phase_to_complex(phase: u8) -> Complex64 {
    match phase & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}{}", self.letters())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Parses `[""|"i"|"-"|"-i"]` followed by letters from `IXYZ`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        let mut p = PauliString::identity(rest.len());
        for (q, c) in rest.chars().enumerate() {
            let l = match c {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                _ => return Err(PauliError::Parse(s.to_string())),
            };
            p.set(q, l);
        }
        p.phase = phase;
        Ok(p)
    }
}

/// Coefficients below this magnitude are dropped by [`PauliSum::simplify`].
pub const COEFF_EPS: f64 = 1e-12;

/// Linear combination of Pauli strings of one width. After [`simplify`](Self::simplify)
/// every stored string has phase 0 (the phase lives in the coefficient), no
/// two terms share letters, and terms follow [`PauliString::canonical_cmp`].
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    width: usize,
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn zero(width: usize) -> Self {
        PauliSum {
            width,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(
        width: usize,
        terms: impl IntoIterator<Item = (Complex64, PauliString)>,
    ) -> Result<Self, PauliError> {
        let mut s = Self::zero(width);
        for (c, p) in terms {
            s.add_term(c, p)?;
        }
        s.simplify();
        Ok(s)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Appends a term without simplifying.
    pub fn add_term(&mut self, coeff: Complex64, p: PauliString) -> Result<(), PauliError> {
        if p.width() != self.width {
            return Err(PauliError::WidthMismatch(self.width, p.width()));
        }
        self.terms.push((coeff, p));
        Ok(())
    }

    /// Folds phases into coefficients, merges equal strings, drops
    /// vanishing terms and sorts canonically.
    pub fn simplify(&mut self) {
        let mut merged: BTreeMap<(Vec<u64>, Vec<u64>), (Complex64, PauliString)> = BTreeMap::new();
        for (c, p) in self.terms.drain(..) {
            let c = c * p.phase_factor();
            let p = p.unsigned();
            let key = (p.z.clone(), p.x.clone());
            merged
                .entry(key)
                .and_modify(|e| e.0 += c)
                .or_insert((c, p));
        }
        let mut terms: Vec<_> = merged
            .into_values()
            .filter(|(c, _)| c.norm() > COEFF_EPS)
            .collect();
        terms.sort_by(|a, b| a.1.canonical_cmp(&b.1));
        self.terms = terms;
    }

    pub fn simplified(mut self) -> Self {
        self.simplify();
        self
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        PauliSum {
            width: self.width,
            terms: self.terms.iter().map(|(c, p)| (c * factor, p.clone())).collect(),
        }
    }

    pub fn padded(&self, width: usize) -> Result<Self, PauliError> {
        let terms = self
            .terms
            .iter()
            .map(|(c, p)| Ok((*c, p.padded(width)?)))
            .collect::<Result<Vec<_>, PauliError>>()?;
        Ok(PauliSum { width, terms })
    }

    /// True when every coefficient is real within `tol` (simplified sums of
    /// Hermitian strings).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.clone()
            .simplified()
            .terms
            .iter()
            .all(|(c, _)| c.im.abs() <= tol)
    }

    /// True when every coefficient is imaginary within `tol`.
    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.clone()
            .simplified()
            .terms
            .iter()
            .all(|(c, _)| c.re.abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_products() {
        let xy = ps("X").multiply(&ps("Y")).unwrap();
        assert_eq!(xy, ps("iZ"));
        assert_eq!(xy.phase_exp(), 1);
        assert_eq!(ps("Y").multiply(&ps("X")).unwrap(), ps("-iZ"));
        assert_eq!(ps("X").multiply(&ps("Z")).unwrap(), ps("-iY"));
        assert_eq!(ps("Z").multiply(&ps("X")).unwrap(), ps("iY"));
        assert_eq!(ps("Y").multiply(&ps("Z")).unwrap(), ps("iX"));
        assert_eq!(ps("Z").multiply(&ps("Y")).unwrap(), ps("-iX"));
    }

    #[test]
    fn tree_leg_pair_product() {
        let w = 10;
        let s18 = PauliString::from_letters(w, &[(0, Letter::Z), (3, Letter::Z), (9, Letter::X)]);
        let s19 = PauliString::from_letters(w, &[(0, Letter::Z), (3, Letter::Z), (9, Letter::Y)]);
        let prod = s18.multiply(&s19).unwrap();
        assert_eq!(prod, PauliString::single(w, 9, Letter::Z).with_phase(1));
        assert_eq!(s18.weight_and_support(), (3, vec![0, 3, 9]));
    }

    #[test]
    fn commutation_examples() {
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("XZ").commutes(&ps("ZX")).unwrap());
        assert!(matches!(
            ps("XZ").commutes(&ps("X")),
            Err(PauliError::WidthMismatch(2, 1))
        ));
        assert!(ps("X").multiply(&ps("XX")).is_err());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(PauliString::identity(5).weight_and_support(), (0, vec![]));
        // X_j Z_{j-1} ... Z_0
        let j = 6;
        let mut p = PauliString::z_type(8, 0..j);
        p.set(j, Letter::X);
        assert_eq!(p.weight_and_support(), (j + 1, (0..=j).collect()));
    }

    #[test]
    fn text_form_round_trips() {
        for s in ["XIZY", "iXX", "-Z", "-iXIZY", ""] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn wide_strings_span_words() {
        let a = PauliString::from_letters(130, &[(3, Letter::X), (70, Letter::Y), (129, Letter::Z)]);
        let b = PauliString::from_letters(130, &[(70, Letter::X), (129, Letter::X)]);
        let p = a.multiply(&b).unwrap();
        // Y X = -iZ, Z X = iY -> total phase 0
        assert_eq!(p.phase_exp(), 0);
        assert_eq!(p.letter(70), Letter::Z);
        assert_eq!(p.letter(129), Letter::Y);
        assert_eq!(p.support(), vec![3, 70, 129]);
        assert!(a.commutes(&b).unwrap());
    }

    #[test]
    fn sum_simplification_merges_and_sorts() {
        let c = |r| Complex64::new(r, 0.0);
        let s = PauliSum::from_terms(
            2,
            vec![
                (c(1.0), ps("ZI")),
                (c(0.5), ps("XX")),
                (c(2.0), ps("-ZI")),
                (c(1.0), ps("iIZ")),
                (c(1.0), ps("IX")),
                (c(-1.0), ps("IX")),
            ],
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.terms()[0].1, ps("XX"));
        assert_eq!(s.terms()[1].1, ps("IZ"));
        assert_eq!(s.terms()[1].0, Complex64::new(0.0, 1.0));
        assert_eq!(s.terms()[2], (c(-1.0), ps("ZI")));
    }

    fn arb_pauli(width: usize) -> impl Strategy<Value = PauliString> {
        (prop::collection::vec(0u8..4, width), 0u8..4).prop_map(move |(letters, ph)| {
            let mut p = PauliString::identity(width);
            for (q, l) in letters.into_iter().enumerate() {
                p.set(q, [Letter::I, Letter::X, Letter::Y, Letter::Z][l as usize]);
            }
            p.with_phase(ph)
        })
    }

    proptest! {
        #[test]
        fn square_is_identity(p in arb_pauli(70)) {
            let sq = p.unsigned().multiply(&p.unsigned()).unwrap();
            prop_assert!(sq.is_identity());
            prop_assert_eq!(sq.phase_exp(), 0);
        }

        #[test]
        fn identity_is_neutral(p in arb_pauli(9)) {
            prop_assert_eq!(PauliString::identity(9).multiply(&p).unwrap(), p.clone());
            prop_assert_eq!(p.multiply(&PauliString::identity(9)).unwrap(), p);
        }

        #[test]
        fn multiplication_is_associative(a in arb_pauli(67), b in arb_pauli(67), c in arb_pauli(67)) {
            let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn commutation_is_symmetric_and_matches_products(a in arb_pauli(12), b in arb_pauli(12)) {
            let ab = a.commutes(&b).unwrap();
            prop_assert_eq!(ab, b.commutes(&a).unwrap());
            let p = a.multiply(&b).unwrap();
            let q = b.multiply(&a).unwrap();
            if ab { prop_assert_eq!(p, q); } else { prop_assert_eq!(p, q.negated()); }
        }

        #[test]
        fn simplify_is_idempotent_and_order_insensitive(
            ps in prop::collection::vec((arb_pauli(4), -2i32..3), 0..12)
        ) {
            let terms: Vec<_> = ps.iter().map(|(p, c)| (Complex64::new(*c as f64, 0.0), p.clone())).collect();
            let a = PauliSum::from_terms(4, terms.clone()).unwrap();
            let mut rev = terms;
            rev.reverse();
            let b = PauliSum::from_terms(4, rev).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.clone().simplified(), a);
        }
    }
}
