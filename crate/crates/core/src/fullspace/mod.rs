//! Full `2^n` state-vector simulation.
//!
//! Qubit `q` is bit `q` of the basis index, and `|0⟩` is the `Z = +1`
//! eigenstate, so the collective `S_z = ½ΣZ` of a block is half the number of
//! zero bits minus half the number of one bits. Inputs occupy the low qubit
//! indices and outputs the high ones.

mod effective;
mod hamiltonian;
mod oracle;
mod propagate;

pub use effective::{
    dressed_chi, effective_evolve, effective_vs_full, fit_chi, sequential_stage_fidelity,
    ChiCandidate, ChiFit, EffectiveComparison, Frame, SequentialStageReport,
};
pub use hamiltonian::{
    build_bipartite, build_effective, build_network, build_star, Drive, Pauli, PauliWord,
    SparseHamiltonian,
};
pub use oracle::{oracle_linear_response, oracle_protocol_run, OracleMoments};
pub use propagate::{propagate, Method, PropagatorConfig, DENSE_QUBIT_BOUND};

use num_complex::Complex;

use crate::collective::Axis;
use crate::error::{Error, Result};
use crate::scalar::{count, czero, lit, Real};

/// Practical upper bound on full state-vector size.
pub const MAX_QUBITS: usize = 20;

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(Error::Resource {
            qubits: n,
            bound: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FullState<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> FullState<T> {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                found: amplitudes.len(),
            });
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm_sqr = state.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::NotNormalized {
                norm_sqr: norm_sqr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(state)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(Error::Domain(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![czero(); 1 << n_qubits];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// `|+⟩^{⊗n}`, the `x`-polarized coherent state of all qubits.
    pub fn plus(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = T::one() / count::<T>(dim).sqrt();
        Ok(Self {
            n_qubits,
            amplitudes: vec![Complex::new(a, T::zero()); dim],
        })
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn overlap(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Applies a 2×2 unitary `[[a, b], [c, d]]` to `qubit`.
    pub fn apply_single(&mut self, qubit: usize, gate: [[Complex<T>; 2]; 2]) {
        let bit = 1usize << qubit;
        for i in 0..self.dim() {
            if i & bit == 0 {
                let j = i | bit;
                let (x0, x1) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = gate[0][0] * x0 + gate[0][1] * x1;
                self.amplitudes[j] = gate[1][0] * x0 + gate[1][1] * x1;
            }
        }
    }

    /// `exp(-i·angle·σ_axis/2)` on each listed qubit.
    pub fn rotate_qubits(&mut self, qubits: impl IntoIterator<Item = usize>, axis: Axis, angle: T) {
        let gate = spin_half_rotation(axis, angle);
        for q in qubits {
            self.apply_single(q, gate);
        }
    }

    /// Multiplies each amplitude by `exp(-i·phase(index))`.
    pub fn apply_diagonal_phase(&mut self, phase: impl Fn(usize) -> T) {
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            *a = *a * Complex::new(T::zero(), -phase(i)).exp();
        }
    }

    /// `Σ_{q ∈ qubits} σ_axis^{(q)} / 2` applied to the state.
    pub fn apply_collective(&self, qubits: &[usize], axis: Axis) -> Vec<Complex<T>> {
        let half: T = lit(0.5);
        let mut out = vec![czero(); self.dim()];
        for &q in qubits {
            let bit = 1usize << q;
            for (i, a) in self.amplitudes.iter().enumerate() {
                let one = i & bit != 0;
                match axis {
                    Axis::Z => {
                        let s = if one { -half } else { half };
                        out[i] += *a * s;
                    }
                    Axis::X => out[i ^ bit] += *a * half,
                    Axis::Y => {
                        // Y|0> = i|1>, Y|1> = -i|0>
                        let s = if one { -half } else { half };
                        out[i ^ bit] += *a * Complex::new(T::zero(), s);
                    }
                }
            }
        }
        out
    }

    /// Mean and variance of the collective spin of `qubits` along `axis`.
    pub fn collective_moments(&self, qubits: &[usize], axis: Axis) -> (T, T) {
        let s_psi = self.apply_collective(qubits, axis);
        let mean = inner(&self.amplitudes, &s_psi).re;
        let second = s_psi.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        let var = second - mean * mean;
        (mean, if var < T::zero() { T::zero() } else { var })
    }
}

pub(crate) fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(czero(), |acc, (x, y)| acc + x.conj() * *y)
}

/// `exp(-i·angle·σ/2)` for a single qubit.
pub fn spin_half_rotation<T: Real>(axis: Axis, angle: T) -> [[Complex<T>; 2]; 2] {
    let half = angle / lit(2.0);
    let (c, s) = (half.cos(), half.sin());
    let z = T::zero();
    match axis {
        Axis::X => [
            [Complex::new(c, z), Complex::new(z, -s)],
            [Complex::new(z, -s), Complex::new(c, z)],
        ],
        Axis::Y => [
            [Complex::new(c, z), Complex::new(-s, z)],
            [Complex::new(s, z), Complex::new(c, z)],
        ],
        Axis::Z => [
            [Complex::new(c, -s), Complex::new(z, z)],
            [Complex::new(z, z), Complex::new(c, s)],
        ],
    }
}

/// Collective `S_z` eigenvalue of the qubits `offset..offset+len` in basis
/// state `index`.
pub fn block_m<T: Real>(index: usize, offset: usize, len: usize) -> T {
    let ones = ((index >> offset) & ((1usize << len) - 1)).count_ones() as usize;
    (count::<T>(len) - count::<T>(2 * ones)) / lit(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn plus_state_moments() {
        let s = FullState::<f64>::plus(3).unwrap();
        let q = [0, 1, 2];
        let (mx, vx) = s.collective_moments(&q, Axis::X);
        let (my, vy) = s.collective_moments(&q, Axis::Y);
        assert_abs_diff_eq!(mx, 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(vx, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(my, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vy, 0.75, epsilon = 1e-14);
    }

    #[test]
    fn y_rotation_tilts_toward_minus_z() {
        let mut s = FullState::<f64>::plus(2).unwrap();
        s.rotate_qubits(0..2, Axis::Y, 0.3);
        let (mz, _) = s.collective_moments(&[0, 1], Axis::Z);
        assert_abs_diff_eq!(mz, -(0.3f64).sin(), epsilon = 1e-14);
    }

    #[test]
    fn block_m_counts_zero_bits() {
        // qubits 1..3 of 0b0110 are both one
        assert_eq!(block_m::<f64>(0b0110, 1, 2), -1.0);
        assert_eq!(block_m::<f64>(0b0000, 0, 4), 2.0);
        assert_eq!(block_m::<f64>(0b1000, 0, 3), 1.5);
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            FullState::<f64>::plus(21),
            Err(Error::Resource { .. })
        ));
        assert!(FullState::<f64>::new(1, vec![czero(); 3]).is_err());
        assert!(FullState::<f64>::new(1, vec![czero(); 2]).is_err());
        assert!(FullState::<f64>::basis(2, 3).is_ok());
    }
}
