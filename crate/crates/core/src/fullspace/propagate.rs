//! `exp(-iHt)|ψ⟩` by dense eigendecomposition or by adaptive Lanczos.

use num_complex::Complex;

use super::{inner, FullState, SparseHamiltonian};
use crate::error::{Error, Result};
use crate::scalar::{count, czero, lit, Real};

/// Largest register the dense method accepts.
pub const DENSE_QUBIT_BOUND: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    DenseExponential,
    Krylov,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorConfig<T> {
    pub method: Method,
    pub krylov_dim: usize,
    /// Initial Krylov time step.
    pub step: T,
    /// Per-step residual bound for Krylov, norm-error bound for both.
    pub tolerance: T,
    /// Krylov step budget before reporting non-convergence.
    pub max_steps: usize,
}

impl<T: Real> Default for PropagatorConfig<T> {
    fn default() -> Self {
        Self {
            method: Method::Krylov,
            krylov_dim: 30,
            step: lit(0.1),
            tolerance: T::tol(1e-10),
            max_steps: 1_000_000,
        }
    }
}

impl<T: Real> PropagatorConfig<T> {
    pub fn dense() -> Self {
        Self {
            method: Method::DenseExponential,
            ..Self::default()
        }
    }

    pub fn krylov() -> Self {
        Self::default()
    }

    /// Dense up to ten qubits, Krylov above.
    pub fn auto(n_qubits: usize) -> Self {
        if n_qubits <= 10 {
            Self::dense()
        } else {
            Self::krylov()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > T::zero()) {
            return Err(Error::Domain(
                "propagator tolerance must be positive".into(),
            ));
        }
        if self.krylov_dim < 2 {
            return Err(Error::Domain("krylov dimension must be at least 2".into()));
        }
        if !(self.step > T::zero()) {
            return Err(Error::Domain("propagator step must be positive".into()));
        }
        Ok(())
    }
}

pub fn propagate<T: Real>(
    state: &FullState<T>,
    h: &SparseHamiltonian<T>,
    t: T,
    cfg: &PropagatorConfig<T>,
) -> Result<FullState<T>> {
    cfg.validate()?;
    if state.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits(),
            found: state.n_qubits(),
        });
    }
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!(
            "propagation time must be >= 0 (got {t})"
        )));
    }
    if t == T::zero() || h.terms().is_empty() {
        return Ok(state.clone());
    }
    let amplitudes = match cfg.method {
        Method::DenseExponential => {
            if h.n_qubits() > DENSE_QUBIT_BOUND {
                return Err(Error::Resource {
                    qubits: h.n_qubits(),
                    bound: DENSE_QUBIT_BOUND,
                });
            }
            let dim = state.dim();
            T::sym_eigen(dim, &h.to_dense()).propagate(state.amplitudes(), t)
        }
        Method::Krylov => krylov(state.amplitudes(), h, t, cfg)?,
    };
    let out = FullState::from_raw(state.n_qubits(), amplitudes);
    let drift = (out.norm_sqr() - state.norm_sqr()).abs();
    if drift > cfg.tolerance.max(T::tol(1e-12)) {
        return Err(Error::Convergence {
            residual: drift.to_f64().unwrap_or(f64::NAN),
            reached: t.to_f64().unwrap_or(f64::NAN),
            target: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(out)
}

/// Orthonormal Lanczos basis with its tridiagonal projection.
struct Lanczos<T> {
    basis: Vec<Vec<Complex<T>>>,
    alpha: Vec<T>,
    beta: Vec<T>,
    /// `β_m`, the coupling out of the subspace; zero on happy breakdown.
    beta_out: T,
}

fn lanczos<T: Real>(h: &SparseHamiltonian<T>, v0: &[Complex<T>], m: usize) -> Lanczos<T> {
    let norm = inner(v0, v0).re.sqrt();
    let mut basis = vec![v0.iter().map(|a| *a / norm).collect::<Vec<_>>()];
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let breakdown = T::epsilon() * lit(1e3);
    let mut beta_out = T::zero();
    for k in 0..m {
        let mut w = h.apply(&basis[k]);
        let a = inner(&basis[k], &w).re;
        alpha.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * *bi;
                }
            }
        }
        let bnorm = inner(&w, &w).re.sqrt();
        if bnorm <= breakdown * (a.abs() + T::one()) {
            beta_out = T::zero();
            break;
        }
        if k + 1 == m {
            beta_out = bnorm;
            break;
        }
        beta.push(bnorm);
        basis.push(w.into_iter().map(|x| x / bnorm).collect());
    }
    Lanczos {
        basis,
        alpha,
        beta,
        beta_out,
    }
}

fn krylov<T: Real>(
    psi: &[Complex<T>],
    h: &SparseHamiltonian<T>,
    t: T,
    cfg: &PropagatorConfig<T>,
) -> Result<Vec<Complex<T>>> {
    let mut current = psi.to_vec();
    let mut elapsed = T::zero();
    let mut tau = cfg.step.min(t);
    let min_tau = t * lit(1e-12);
    let mut steps = 0usize;
    let m_max = cfg.krylov_dim.min(current.len());
    while elapsed < t {
        let norm = inner(&current, &current).re.sqrt();
        let lz = lanczos(h, &current, m_max);
        let m = lz.alpha.len();
        let mut tri = vec![T::zero(); m * m];
        for k in 0..m {
            tri[k * m + k] = lz.alpha[k];
            if k + 1 < m {
                tri[k * m + k + 1] = lz.beta[k];
                tri[(k + 1) * m + k] = lz.beta[k];
            }
        }
        let eig = T::sym_eigen(m, &tri);
        let mut e1 = vec![czero(); m];
        e1[0] = Complex::new(T::one(), T::zero());
        tau = tau.min(t - elapsed);
        let (coeffs, residual) = loop {
            let c = eig.propagate(&e1, tau);
            let residual = lz.beta_out * c[m - 1].norm() * norm;
            if residual <= cfg.tolerance {
                break (c, residual);
            }
            tau = tau / lit(2.0);
            if tau < min_tau {
                return Err(Error::Convergence {
                    residual: residual.to_f64().unwrap_or(f64::NAN),
                    reached: elapsed.to_f64().unwrap_or(f64::NAN),
                    target: t.to_f64().unwrap_or(f64::NAN),
                });
            }
        };
        let mut next = vec![czero(); current.len()];
        for (ck, bk) in coeffs.iter().zip(&lz.basis) {
            let ck = *ck * norm;
            for (n, b) in next.iter_mut().zip(bk) {
                *n += ck * *b;
            }
        }
        current = next;
        elapsed = elapsed + tau;
        steps += 1;
        if steps >= cfg.max_steps && elapsed < t {
            return Err(Error::Convergence {
                residual: residual.to_f64().unwrap_or(f64::NAN),
                reached: elapsed.to_f64().unwrap_or(f64::NAN),
                target: t.to_f64().unwrap_or(f64::NAN),
            });
        }
        // a generous residual lets the next step grow
        if residual < cfg.tolerance / count::<T>(1000) {
            tau = tau * lit(2.0);
        }
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullspace::{build_bipartite, Pauli, PauliWord};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_hamiltonian(n: usize, terms: usize, seed: u64) -> SparseHamiltonian<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut h = SparseHamiltonian::new(n).unwrap();
        for _ in 0..terms {
            let letters = (0..n)
                .map(|_| match rng.gen_range(0..3) {
                    0 => Pauli::I,
                    1 => Pauli::X,
                    _ => Pauli::Z,
                })
                .collect();
            h.add_term(PauliWord::new(letters), rng.gen_range(-1.0..1.0))
                .unwrap();
        }
        h
    }

    fn random_state(n: usize, seed: u64) -> FullState<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut v: Vec<Complex<f64>> = (0..1 << n)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = inner(&v, &v).re.sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        FullState::new(n, v).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = build_bipartite(2, 1, 1.0f64, 2.0).unwrap();
        let s = random_state(3, 1);
        for cfg in [PropagatorConfig::dense(), PropagatorConfig::krylov()] {
            assert_eq!(propagate(&s, &h, 0.0, &cfg).unwrap(), s);
        }
    }

    #[test]
    fn diagonal_hamiltonian_gives_exact_phases() {
        let h = build_bipartite(2, 2, 0.7f64, 0.0).unwrap();
        let s = random_state(4, 2);
        let t = 1.3;
        let out = propagate(&s, &h, t, &PropagatorConfig::krylov()).unwrap();
        for (i, (a, b)) in out.amplitudes().iter().zip(s.amplitudes()).enumerate() {
            let z = |q: usize| if i >> q & 1 == 0 { 1.0 } else { -1.0 };
            let e = 0.7 * (z(0) + z(1)) * (z(2) + z(3));
            assert!((*a - *b * Complex::new(0.0, -e * t).exp()).norm() < 1e-10);
        }
    }

    #[test]
    fn undriven_coupling_free_network_rotates_outputs() {
        let h = build_bipartite(1, 2, 0.0f64, 0.9).unwrap();
        let s = random_state(3, 3);
        let t = 0.8;
        let out = propagate(&s, &h, t, &PropagatorConfig::dense()).unwrap();
        let mut want = s.clone();
        // exp(-iΩt X) = exp(-i(2Ωt)X/2)
        want.rotate_qubits([1, 2], crate::collective::Axis::X, 2.0 * 0.9 * t);
        assert!(out.fidelity(&want).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn krylov_agrees_with_dense_on_random_eight_qubits() {
        let h = random_hamiltonian(8, 40, 7);
        let s = random_state(8, 8);
        let dense = propagate(&s, &h, 1.0, &PropagatorConfig::dense()).unwrap();
        let kry = propagate(&s, &h, 1.0, &PropagatorConfig::krylov()).unwrap();
        let err = dense
            .amplitudes()
            .iter()
            .zip(kry.amplitudes())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
        assert!(err < 1e-8, "max amplitude error {err}");
    }

    #[test]
    fn norm_and_energy_conserved() {
        let h = random_hamiltonian(6, 20, 11);
        let mut s = random_state(6, 12);
        let e0 = h.expectation(&s).unwrap();
        for _ in 0..5 {
            s = propagate(&s, &h, 0.7, &PropagatorConfig::krylov()).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            assert!((h.expectation(&s).unwrap() - e0).abs() < 1e-8);
        }
    }

    #[test]
    fn exhausted_budget_reports_convergence_error() {
        let h = random_hamiltonian(6, 20, 5);
        let s = random_state(6, 6);
        let cfg = PropagatorConfig {
            krylov_dim: 2,
            step: 1e-3,
            max_steps: 3,
            ..PropagatorConfig::krylov()
        };
        assert!(matches!(
            propagate(&s, &h, 10.0, &cfg),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let h = build_star(1, 1.0f64, 1.0).unwrap();
        let s = FullState::plus(2).unwrap();
        let bad = PropagatorConfig {
            krylov_dim: 1,
            ..PropagatorConfig::krylov()
        };
        assert!(propagate(&s, &h, 1.0, &bad).is_err());
        let bad = PropagatorConfig {
            tolerance: 0.0,
            ..PropagatorConfig::krylov()
        };
        assert!(propagate(&s, &h, 1.0, &bad).is_err());
        assert!(propagate(&s, &h, -1.0, &PropagatorConfig::krylov()).is_err());
    }

    use crate::fullspace::build_star;
}
