use std::fmt;

use num_complex::Complex;

use super::{check_qubits, FullState};
use crate::error::{Error, Result};
use crate::scalar::{count, czero, lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Z,
}

/// Tensor product of per-qubit `I`, `X`, `Z` letters, qubit 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliWord {
    letters: Vec<Pauli>,
    x_mask: usize,
    z_mask: usize,
}

impl PauliWord {
    pub fn new(letters: Vec<Pauli>) -> Self {
        let mut x_mask = 0;
        let mut z_mask = 0;
        for (q, p) in letters.iter().enumerate() {
            match p {
                Pauli::X => x_mask |= 1 << q,
                Pauli::Z => z_mask |= 1 << q,
                Pauli::I => {}
            }
        }
        Self {
            letters,
            x_mask,
            z_mask,
        }
    }

    /// Word of identities with the listed letters placed.
    pub fn from_sparse(n_qubits: usize, placed: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n_qubits];
        for &(q, p) in placed {
            if q >= n_qubits {
                return Err(Error::Domain(format!(
                    "qubit {q} outside {n_qubits}-qubit word"
                )));
            }
            if letters[q] != Pauli::I {
                return Err(Error::Domain(format!("qubit {q} carries two letters")));
            }
            letters[q] = p;
        }
        Ok(Self::new(letters))
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn x_mask(&self) -> usize {
        self.x_mask
    }

    pub fn z_mask(&self) -> usize {
        self.z_mask
    }

    /// Number of `Z` letters.
    pub fn z_weight(&self) -> usize {
        self.z_mask.count_ones() as usize
    }

    pub fn x_weight(&self) -> usize {
        self.x_mask.count_ones() as usize
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            f.write_str(match p {
                Pauli::I => "I",
                Pauli::X => "X",
                Pauli::Z => "Z",
            })?;
        }
        Ok(())
    }
}

/// Real-weighted sum of `{I, X, Z}` Pauli words. Real symmetric by
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHamiltonian<T> {
    n_qubits: usize,
    terms: Vec<(PauliWord, T)>,
}

impl<T: Real> SparseHamiltonian<T> {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self {
            n_qubits,
            terms: Vec::new(),
        })
    }

    pub fn add_term(&mut self, word: PauliWord, coefficient: T) -> Result<()> {
        if word.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: word.len(),
            });
        }
        if !coefficient.is_finite() {
            return Err(Error::NonFinite("hamiltonian coefficient"));
        }
        self.terms.push((word, coefficient));
        Ok(())
    }

    fn push(&mut self, placed: &[(usize, Pauli)], coefficient: T) -> Result<()> {
        let word = PauliWord::from_sparse(self.n_qubits, placed)?;
        self.add_term(word, coefficient)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(PauliWord, T)] {
        &self.terms
    }

    /// `H·ψ`
    pub fn apply(&self, psi: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![czero(); psi.len()];
        for (word, c) in &self.terms {
            let (xm, zm) = (word.x_mask, word.z_mask);
            for (i, a) in psi.iter().enumerate() {
                let sign = if (i & zm).count_ones() % 2 == 0 {
                    *c
                } else {
                    -*c
                };
                out[i ^ xm] += *a * sign;
            }
        }
        out
    }

    /// Dense matrix in column-major order.
    pub fn to_dense(&self) -> Vec<T> {
        let dim = 1usize << self.n_qubits;
        let mut m = vec![T::zero(); dim * dim];
        for (word, c) in &self.terms {
            for col in 0..dim {
                let row = col ^ word.x_mask;
                let sign = if (col & word.z_mask).count_ones() % 2 == 0 {
                    *c
                } else {
                    -*c
                };
                m[col * dim + row] += sign;
            }
        }
        m
    }

    /// `⟨ψ|H|ψ⟩`
    pub fn expectation(&self, state: &FullState<T>) -> Result<T> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: state.n_qubits(),
            });
        }
        Ok(super::inner(state.amplitudes(), &self.apply(state.amplitudes())).re)
    }
}

/// Which block carries the strong `x` drive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Drive {
    Outputs,
    Inputs,
}

/// `J·Σ_{i,j} Z_i Z_j + Ω·Σ_{driven} X`, inputs on qubits `0..n_in`, outputs
/// on `n_in..n_in+n_out`. Drive terms are omitted when `Ω = 0`.
pub fn build_network<T: Real>(
    n_in: usize,
    n_out: usize,
    j: T,
    omega: T,
    drive: Drive,
) -> Result<SparseHamiltonian<T>> {
    if n_in == 0 || n_out == 0 {
        return Err(Error::Domain("both blocks need at least one qubit".into()));
    }
    let mut h = SparseHamiltonian::new(n_in + n_out)?;
    for i in 0..n_in {
        for o in 0..n_out {
            h.push(&[(i, Pauli::Z), (n_in + o, Pauli::Z)], j)?;
        }
    }
    if omega != T::zero() {
        let driven = match drive {
            Drive::Outputs => n_in..n_in + n_out,
            Drive::Inputs => 0..n_in,
        };
        for q in driven {
            h.push(&[(q, Pauli::X)], omega)?;
        }
    }
    Ok(h)
}

/// Star graph: `n_in` inputs coupled to one driven output.
pub fn build_star<T: Real>(n_in: usize, j: T, omega: T) -> Result<SparseHamiltonian<T>> {
    build_network(n_in, 1, j, omega, Drive::Outputs)
}

/// Complete bipartite coupling between `n_in` inputs and `n_out` driven
/// outputs.
pub fn build_bipartite<T: Real>(
    n_in: usize,
    n_out: usize,
    j: T,
    omega: T,
) -> Result<SparseHamiltonian<T>> {
    build_network(n_in, n_out, j, omega, Drive::Outputs)
}

/// `χ·(S_z^{twisted})² ⊗ Σ_{driven} X`, where the driven block is the one
/// selected by `drive` and the other block is twisted.
///
/// With `S_z = ½ΣZ`, `(S_z)² = n/4 + ½Σ_{i<k} Z_i Z_k`.
pub fn build_effective<T: Real>(
    n_in: usize,
    n_out: usize,
    chi: T,
    drive: Drive,
) -> Result<SparseHamiltonian<T>> {
    if n_in == 0 || n_out == 0 {
        return Err(Error::Domain("both blocks need at least one qubit".into()));
    }
    let mut h = SparseHamiltonian::new(n_in + n_out)?;
    let (twisted, driven) = match drive {
        Drive::Outputs => (0..n_in, n_in..n_in + n_out),
        Drive::Inputs => (n_in..n_in + n_out, 0..n_in),
    };
    let n_tw = twisted.len();
    let diag = chi * count::<T>(n_tw) / lit(4.0);
    let pair = chi / lit(2.0);
    let tw: Vec<usize> = twisted.collect();
    for d in driven {
        h.push(&[(d, Pauli::X)], diag)?;
        for a in 0..tw.len() {
            for b in a + 1..tw.len() {
                h.push(&[(tw[a], Pauli::Z), (tw[b], Pauli::Z), (d, Pauli::X)], pair)?;
            }
        }
    }
    Ok(h)
}
