//! Dense statevector and unitary simulation for small systems. Used to check
//! mappings and compiled circuits against exact linear algebra.
//!
//! Qubit `q` is bit `q` of a basis-state index.

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::fermion::{FermionicAnsatz, MajoranaPoly};
use crate::mapping::{MappingError, MappingTree};
use crate::pauli::{PauliString, PauliSum};

pub const MAX_STATE_QUBITS: usize = 14;
pub const MAX_UNITARY_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{n} qubits exceeds the limit of {limit}")]
    TooManyQubits { n: usize, limit: usize },
    #[error("operator width {got} does not match {expected} qubits")]
    WidthMismatch { expected: usize, got: usize },
    #[error("string {0} is not hermitian")]
    NonHermitian(String),
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self, SimError> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, SimError> {
        if n > MAX_STATE_QUBITS {
            return Err(SimError::TooManyQubits {
                n,
                limit: MAX_STATE_QUBITS,
            });
        }
        let mut amps = vec![Complex64::default(); 1 << n];
        amps[index] = c(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    /// Basis state with qubit `q` set to `bits[q]`.
    pub fn from_bits(bits: &[u8]) -> Result<Self, SimError> {
        let index = bits.iter().enumerate().fold(0, |acc, (q, &b)| acc | ((b as usize & 1) << q));
        Self::basis(bits.len(), index)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n > MAX_STATE_QUBITS {
            return Err(SimError::TooManyQubits {
                n,
                limit: MAX_STATE_QUBITS,
            });
        }
        Ok(DenseState { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn check_width(&self, w: usize) -> Result<(), SimError> {
        if w == self.n {
            Ok(())
        } else {
            Err(SimError::WidthMismatch {
                expected: self.n,
                got: w,
            })
        }
    }

    /// `P |self⟩` including the string's phase.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<DenseState, SimError> {
        self.check_width(p.width())?;
        let (xm, zm) = masks(p);
        let n_y = (xm & zm).count_ones();
        let base = p.phase_factor() * Complex64::i().powu(n_y);
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let sign = if (i as u64 & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[i ^ xm as usize] += base * sign * a;
        }
        Ok(DenseState { n: self.n, amps: out })
    }

    /// `exp(i · theta · P)` for a Hermitian string.
    pub fn apply_pauli_exp(&self, p: &PauliString, theta: f64) -> Result<DenseState, SimError> {
        if !p.is_hermitian() {
            return Err(SimError::NonHermitian(p.to_string()));
        }
        let pp = self.apply_pauli(p)?;
        let (cs, sn) = (theta.cos(), theta.sin());
        let amps = self
            .amps
            .iter()
            .zip(&pp.amps)
            .map(|(&a, &b)| a * cs + c(0.0, sn) * b)
            .collect();
        Ok(DenseState { n: self.n, amps })
    }

    /// `H |self⟩`; the result is not normalized.
    pub fn apply_sum(&self, h: &PauliSum) -> Result<DenseState, SimError> {
        self.check_width(h.width())?;
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (coeff, p) in h.terms() {
            let v = self.apply_pauli(p)?;
            out.iter_mut().zip(&v.amps).for_each(|(o, a)| *o += coeff * a);
        }
        Ok(DenseState { n: self.n, amps: out })
    }

    /// `exp(theta · T) |self⟩` by a scaled Taylor series; exact to machine
    /// precision for any sum `T`.
    pub fn apply_sum_exp(&self, t: &PauliSum, theta: f64) -> Result<DenseState, SimError> {
        self.check_width(t.width())?;
        let bound: f64 = t.terms().iter().map(|(c, _)| c.norm()).sum::<f64>() * theta.abs();
        let steps = bound.ceil().max(1.0) as usize;
        let scaled = t.scaled(c(theta / steps as f64, 0.0));
        let mut state = self.clone();
        for _ in 0..steps {
            let mut term = state.clone();
            let mut acc = state.amps.clone();
            for k in 1..60 {
                term = term.apply_sum(&scaled)?;
                let f = 1.0 / k as f64;
                term.amps.iter_mut().for_each(|a| *a *= f);
                acc.iter_mut().zip(&term.amps).for_each(|(x, y)| *x += y);
                if term.norm() < 1e-18 {
                    break;
                }
            }
            state = DenseState { n: self.n, amps: acc };
        }
        Ok(state)
    }

    pub fn expectation(&self, h: &PauliSum) -> Result<Complex64, SimError> {
        Ok(self.inner(&self.apply_sum(h)?))
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        let amps = &mut self.amps;
        let bit = |q: usize| 1usize << q;
        match *g {
            Gate::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in (0..amps.len()).filter(|i| i & bit(q) == 0) {
                    let (a, b) = (amps[i], amps[i | bit(q)]);
                    amps[i] = (a + b) * s;
                    amps[i | bit(q)] = (a - b) * s;
                }
            }
            Gate::S(q) => phase_on_one(amps, q, c(0.0, 1.0)),
            Gate::Sdg(q) => phase_on_one(amps, q, c(0.0, -1.0)),
            Gate::X(q) => {
                for i in (0..amps.len()).filter(|i| i & bit(q) == 0) {
                    amps.swap(i, i | bit(q));
                }
            }
            Gate::Cnot { control, target } => {
                for i in (0..amps.len()).filter(|i| i & bit(control) != 0 && i & bit(target) == 0) {
                    amps.swap(i, i | bit(target));
                }
            }
            Gate::Rz { qubit, angle } => {
                let lo = Complex64::from_polar(1.0, -angle / 2.0);
                let hi = Complex64::from_polar(1.0, angle / 2.0);
                for (i, a) in amps.iter_mut().enumerate() {
                    *a *= if i & bit(qubit) == 0 { lo } else { hi };
                }
            }
        }
    }

    pub fn apply_circuit(&self, c: &Circuit) -> Result<DenseState, SimError> {
        self.check_width(c.n_qubits)?;
        let mut s = self.clone();
        for g in &c.gates {
            s.apply_gate(g);
        }
        Ok(s)
    }
}

fn phase_on_one(amps: &mut [Complex64], q: usize, ph: Complex64) {
    for (i, a) in amps.iter_mut().enumerate() {
        if i & (1 << q) != 0 {
            *a *= ph;
        }
    }
}

fn masks(p: &PauliString) -> (u64, u64) {
    (
        p.x_words().first().copied().unwrap_or(0),
        p.z_words().first().copied().unwrap_or(0),
    )
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::default(); dim * dim];
        (0..dim).for_each(|i| data[i * dim + i] = c(1.0, 0.0));
        Matrix { dim, data }
    }

    pub fn get(&self, r: usize, col: usize) -> Complex64 {
        self.data[r * self.dim + col]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut data = vec![Complex64::default(); n * n];
        for r in 0..n {
            for k in 0..n {
                let x = self.data[r * n + k];
                if x == Complex64::default() {
                    continue;
                }
                for col in 0..n {
                    data[r * n + col] += x * other.data[k * n + col];
                }
            }
        }
        Matrix { dim: n, data }
    }

    fn from_columns(dim: usize, cols: impl Iterator<Item = Vec<Complex64>>) -> Self {
        let mut data = vec![Complex64::default(); dim * dim];
        for (j, col) in cols.enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                data[i * dim + j] = v;
            }
        }
        Matrix { dim, data }
    }
}

fn check_unitary_width(n: usize) -> Result<(), SimError> {
    if n > MAX_UNITARY_QUBITS {
        Err(SimError::TooManyQubits {
            n,
            limit: MAX_UNITARY_QUBITS,
        })
    } else {
        Ok(())
    }
}

/// Product of the circuit's gate matrices.
pub fn circuit_unitary(c: &Circuit) -> Result<Matrix, SimError> {
    check_unitary_width(c.n_qubits)?;
    let dim = 1 << c.n_qubits;
    let cols = (0..dim).map(|j| {
        let mut s = DenseState::basis(c.n_qubits, j).expect("width checked");
        for g in &c.gates {
            s.apply_gate(g);
        }
        s.amps
    });
    Ok(Matrix::from_columns(dim, cols))
}

/// Matrix of a Pauli string (with phase), built from Kronecker products.
pub fn pauli_matrix(p: &PauliString) -> Result<Matrix, SimError> {
    use crate::pauli::Letter;
    check_unitary_width(p.width())?;
    let one = c(1.0, 0.0);
    let zero = Complex64::default();
    let i = c(0.0, 1.0);
    let mut m = Matrix {
        dim: 1,
        data: vec![p.phase_factor()],
    };
    // highest qubit is the most significant factor
    for q in (0..p.width()).rev() {
        let f = match p.letter(q) {
            Letter::I => [one, zero, zero, one],
            Letter::X => [zero, one, one, zero],
            Letter::Y => [zero, -i, i, zero],
            Letter::Z => [one, zero, zero, -one],
        };
        let d = m.dim * 2;
        let mut data = vec![zero; d * d];
        for r in 0..m.dim {
            for col in 0..m.dim {
                let v = m.get(r, col);
                for a in 0..2 {
                    for b in 0..2 {
                        data[(2 * r + a) * d + 2 * col + b] = v * f[2 * a + b];
                    }
                }
            }
        }
        m = Matrix { dim: d, data };
    }
    Ok(m)
}

/// `exp(i · t · P) = cos(t) I + i sin(t) P` for a Hermitian string.
pub fn pauli_exp_matrix(p: &PauliString, t: f64) -> Result<Matrix, SimError> {
    if !p.is_hermitian() {
        return Err(SimError::NonHermitian(p.to_string()));
    }
    let pm = pauli_matrix(p)?;
    let mut m = Matrix::identity(pm.dim);
    for (a, b) in m.data.iter_mut().zip(&pm.data) {
        *a = *a * t.cos() + c(0.0, t.sin()) * b;
    }
    Ok(m)
}

/// `min_φ ‖U − e^{iφ} V‖_F`.
pub fn phase_insensitive_distance(u: &Matrix, v: &Matrix) -> f64 {
    assert_eq!(u.dim, v.dim, "matrix dimensions differ");
    let tr: Complex64 = v.data.iter().zip(&u.data).map(|(a, b)| a.conj() * b).sum();
    let ph = if tr.norm() > 0.0 { tr / tr.norm() } else { c(1.0, 0.0) };
    u.data
        .iter()
        .zip(&v.data)
        .map(|(a, b)| (a - ph * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Matrix of `exp(theta · T)` on `n` qubits, one column per basis state.
pub fn sum_exp_matrix(t: &PauliSum, theta: f64, n: usize) -> Result<Matrix, SimError> {
    check_unitary_width(n)?;
    let dim = 1 << n;
    let cols = (0..dim)
        .map(|j| DenseState::basis(n, j)?.apply_sum_exp(t, theta).map(|s| s.amps))
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(Matrix::from_columns(dim, cols.into_iter()))
}

/// Reference state followed by every mapped generator, on `qubit_width` qubits.
pub fn ansatz_state(m: &MappingTree, a: &FermionicAnsatz) -> Result<DenseState, SimError> {
    let bits = m.occupation_to_bitstring(&a.reference_occupations)?;
    let mut s = DenseState::from_bits(&bits)?;
    for g in m.map_ansatz(a)? {
        s = s.apply_sum_exp(&g.sum, g.theta)?;
    }
    Ok(s)
}

/// Maps a Majorana polynomial to a Pauli sum of width `width`.
pub fn map_poly(m: &MappingTree, poly: &MajoranaPoly, width: usize) -> Result<PauliSum, SimError> {
    let assignment = m.pair_strings();
    let mut sum = PauliSum::zero(width);
    for mono in poly.monomials() {
        let (coeff, p) = m.map_monomial_with(&assignment, &mono)?;
        let p = p.padded(width).map_err(|_| SimError::WidthMismatch {
            expected: width,
            got: p.width(),
        })?;
        sum.add_term(coeff, p).expect("padded to width");
    }
    sum.simplify();
    Ok(sum)
}
