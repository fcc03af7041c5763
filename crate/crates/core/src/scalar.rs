//! Scalar abstraction shared by every numerical module.
//!
//! All state vectors and closed forms are written against [`Real`], which is
//! implemented for `f32` and `f64`. Dense symmetric eigendecompositions are
//! routed through the trait so the generic code never has to juggle the
//! overlapping method sets of `num_traits::Float` and `nalgebra::RealField`.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Eigenpairs of a real symmetric matrix.
///
/// `vectors` is column-major: column `k` (entries `k*dim..(k+1)*dim`) is the
/// eigenvector belonging to `values[k]`.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub dim: usize,
    pub values: Vec<T>,
    pub vectors: Vec<T>,
}

impl<T: Real> SymEigen<T> {
    pub fn vector(&self, k: usize) -> &[T] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// `V · diag(exp(-i·t·λ)) · Vᵀ · ψ`
    pub fn propagate(&self, psi: &[Complex<T>], t: T) -> Vec<Complex<T>> {
        let dim = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); dim];
        for k in 0..dim {
            let v = self.vector(k);
            let mut proj = Complex::new(T::zero(), T::zero());
            for (vi, pi) in v.iter().zip(psi) {
                proj += *pi * *vi;
            }
            let phase = Complex::new(T::zero(), -t * self.values[k]).exp();
            let c = proj * phase;
            for (o, vi) in out.iter_mut().zip(v) {
                *o += c * *vi;
            }
        }
        out
    }
}

/// Floating point type the simulators are generic over.
pub trait Real:
    'static
    + Send
    + Sync
    + Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
{
    /// Eigendecomposition of a dense real symmetric `dim × dim` matrix given
    /// in column-major order.
    fn sym_eigen(dim: usize, matrix: &[Self]) -> SymEigen<Self>;

    /// Tolerance floor for this precision: `max(requested, 64·ε)`.
    fn tol(requested: f64) -> Self {
        let eps = Self::epsilon() * lit(64.0);
        let req: Self = lit(requested);
        if req > eps {
            req
        } else {
            eps
        }
    }
}

macro_rules! impl_real {
    ($ty:ty) => {
        impl Real for $ty {
            fn sym_eigen(dim: usize, matrix: &[Self]) -> SymEigen<Self> {
                assert_eq!(matrix.len(), dim * dim, "matrix is not {dim}x{dim}");
                let m = DMatrix::<$ty>::from_column_slice(dim, dim, matrix);
                let eig = SymmetricEigen::new(m);
                SymEigen {
                    dim,
                    values: eig.eigenvalues.iter().copied().collect(),
                    vectors: eig.eigenvectors.as_slice().to_vec(),
                }
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: FromPrimitive>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in target float type")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: FromPrimitive>(n: usize) -> T {
    T::from_usize(n).expect("count representable in target float type")
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Principal-branch arccot on `(0, π/2]` for non-negative arguments.
pub fn arccot<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::FRAC_PI_2()
    } else {
        (T::one() / x).atan()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_pauli_x() {
        let e = f64::sym_eigen(2, &[0.0, 1.0, 1.0, 0.0]);
        let mut vals = e.values.clone();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn propagate_matches_closed_form_rotation() {
        // exp(-i t X)|0> = cos t |0> - i sin t |1>
        let e = f64::sym_eigen(2, &[0.0, 1.0, 1.0, 0.0]);
        let t = 0.37;
        let out = e.propagate(&[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)], t);
        assert!((out[0] - Complex::new(t.cos(), 0.0)).norm() < 1e-14);
        assert!((out[1] - Complex::new(0.0, -t.sin())).norm() < 1e-14);
    }

    #[test]
    fn arccot_branch() {
        assert!((arccot(1.0f64) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(arccot(0.0f64), std::f64::consts::FRAC_PI_2);
        assert!(arccot(98f64.sqrt()) > 0.0);
    }

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(f64::tol(1e-12), 1e-12);
        assert!(f32::tol(1e-12) > 1e-6);
    }
}
