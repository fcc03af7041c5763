//! Collective spin algebra for one permutation-symmetric block of qubits.
//!
//! A block of `n` qubits in its maximal-spin sector is represented in the
//! Dicke basis `|j = n/2, m⟩`, ordered by `m` ascending from `-j` to `+j`.
//! Index `k` therefore carries `m = k - n/2`, and the raising-operator matrix
//! element `⟨k+1|S₊|k⟩ = √(j(j+1) − m(m+1))` simplifies to `√((n−k)(k+1))`.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{count, czero, lit, Real, SymEigen};

/// Cartesian spin axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// `m` quantum number of Dicke index `k` in a block of `n` qubits.
#[inline]
pub fn dicke_m<T: Real>(n: usize, k: usize) -> T {
    (count::<T>(2 * k) - count::<T>(n)) / lit(2.0)
}

/// `⟨k+1|S₊|k⟩` for a block of `n` qubits.
#[inline]
pub fn raising_element<T: Real>(n: usize, k: usize) -> T {
    debug_assert!(k < n);
    (count::<T>((n - k) * (k + 1))).sqrt()
}

/// Dense Hermitian operator on the Dicke space of one block (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct CollectiveOperator<T> {
    n_qubits: usize,
    matrix: Vec<Complex<T>>,
}

impl<T: Real> CollectiveOperator<T> {
    /// Wraps a row-major matrix, checking shape and Hermiticity.
    pub fn new(n_qubits: usize, matrix: Vec<Complex<T>>) -> Result<Self> {
        let dim = n_qubits + 1;
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: matrix.len(),
            });
        }
        let op = Self { n_qubits, matrix };
        if !op.is_hermitian(T::tol(1e-12)) {
            return Err(Error::Domain(
                "collective operator must be Hermitian".into(),
            ));
        }
        Ok(op)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.n_qubits + 1
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix[row * self.dim() + col]
    }

    pub fn matrix(&self) -> &[Complex<T>] {
        &self.matrix
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim()).fold(czero(), |acc, k| acc + self.get(k, k))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let d = self.dim();
        (0..d).all(|r| (r..d).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    pub fn apply(&self, psi: &[Complex<T>]) -> Vec<Complex<T>> {
        let d = self.dim();
        (0..d)
            .map(|r| {
                self.matrix[r * d..(r + 1) * d]
                    .iter()
                    .zip(psi)
                    .fold(czero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// Row-major product `self · other`.
    pub fn product(&self, other: &Self) -> Vec<Complex<T>> {
        let d = self.dim();
        let mut out = vec![czero(); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a == czero() {
                    continue;
                }
                for c in 0..d {
                    out[r * d + c] += a * other.get(k, c);
                }
            }
        }
        out
    }

    /// Row-major `[self, other]`. The result is anti-Hermitian in general,
    /// so it is returned as a raw matrix.
    pub fn commutator(&self, other: &Self) -> Vec<Complex<T>> {
        let ab = self.product(other);
        let ba = other.product(self);
        ab.into_iter().zip(ba).map(|(x, y)| x - y).collect()
    }
}

/// `S_x, S_y, S_z, S_z²` for a block of `n` qubits.
#[derive(Clone, Debug)]
pub struct CollectiveOps<T> {
    pub sx: CollectiveOperator<T>,
    pub sy: CollectiveOperator<T>,
    pub sz: CollectiveOperator<T>,
    pub sz2: CollectiveOperator<T>,
}

impl<T: Real> CollectiveOps<T> {
    pub fn get(&self, axis: Axis) -> &CollectiveOperator<T> {
        match axis {
            Axis::X => &self.sx,
            Axis::Y => &self.sy,
            Axis::Z => &self.sz,
        }
    }
}

pub fn make_collective_ops<T: Real>(n_qubits: usize) -> Result<CollectiveOps<T>> {
    if n_qubits == 0 {
        return Err(Error::Domain(
            "a collective block needs at least one qubit".into(),
        ));
    }
    let d = n_qubits + 1;
    let half: T = lit(0.5);
    let mut sx = vec![czero(); d * d];
    let mut sy = vec![czero(); d * d];
    let mut sz = vec![czero(); d * d];
    let mut sz2 = vec![czero(); d * d];
    for k in 0..d {
        let m = dicke_m::<T>(n_qubits, k);
        sz[k * d + k] = Complex::new(m, T::zero());
        sz2[k * d + k] = Complex::new(m * m, T::zero());
        if k < n_qubits {
            let lp = raising_element::<T>(n_qubits, k);
            // S+ at (k+1, k), S- at (k, k+1)
            sx[(k + 1) * d + k] = Complex::new(half * lp, T::zero());
            sx[k * d + k + 1] = Complex::new(half * lp, T::zero());
            sy[(k + 1) * d + k] = Complex::new(T::zero(), -half * lp);
            sy[k * d + k + 1] = Complex::new(T::zero(), half * lp);
        }
    }
    Ok(CollectiveOps {
        sx: CollectiveOperator {
            n_qubits,
            matrix: sx,
        },
        sy: CollectiveOperator {
            n_qubits,
            matrix: sy,
        },
        sz: CollectiveOperator {
            n_qubits,
            matrix: sz,
        },
        sz2: CollectiveOperator {
            n_qubits,
            matrix: sz2,
        },
    })
}

/// Applies `S_axis` to Dicke amplitudes using the tridiagonal ladder
/// structure, in `O(n)`.
pub fn apply_spin<T: Real>(n_qubits: usize, axis: Axis, psi: &[Complex<T>]) -> Vec<Complex<T>> {
    let d = n_qubits + 1;
    debug_assert_eq!(psi.len(), d);
    let half: T = lit(0.5);
    let mut out = vec![czero(); d];
    match axis {
        Axis::Z => {
            for k in 0..d {
                out[k] = psi[k] * dicke_m::<T>(n_qubits, k);
            }
        }
        Axis::X | Axis::Y => {
            for k in 0..n_qubits {
                let lp = raising_element::<T>(n_qubits, k) * half;
                // (S+ ψ)[k+1] += lp ψ[k] ; (S- ψ)[k] += lp ψ[k+1]
                let up = psi[k] * lp;
                let down = psi[k + 1] * lp;
                match axis {
                    Axis::X => {
                        out[k + 1] += up;
                        out[k] += down;
                    }
                    _ => {
                        // S_y = (S+ - S-)/(2i) = -i S+/2 + i S-/2
                        out[k + 1] += Complex::new(up.im, -up.re);
                        out[k] += Complex::new(-down.im, down.re);
                    }
                }
            }
        }
    }
    out
}

type CacheMap = HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>;

fn sx_eigen_cache() -> &'static RwLock<CacheMap> {
    static CACHE: OnceLock<RwLock<CacheMap>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Eigendecomposition of the real tridiagonal `S_x` for `n` qubits, built once
/// per `(scalar type, n)` and shared afterwards.
pub fn sx_eigen<T: Real>(n_qubits: usize) -> Arc<SymEigen<T>> {
    let key = (TypeId::of::<T>(), n_qubits);
    if let Some(hit) = sx_eigen_cache()
        .read()
        .expect("eigen cache poisoned")
        .get(&key)
    {
        return Arc::clone(hit)
            .downcast::<SymEigen<T>>()
            .expect("eigen cache entry has the keyed type");
    }
    let d = n_qubits + 1;
    let half: T = lit(0.5);
    let mut m = vec![T::zero(); d * d];
    for k in 0..n_qubits {
        let lp = raising_element::<T>(n_qubits, k) * half;
        m[k * d + k + 1] = lp;
        m[(k + 1) * d + k] = lp;
    }
    let eig = Arc::new(T::sym_eigen(d, &m));
    let mut guard = sx_eigen_cache().write().expect("eigen cache poisoned");
    let entry = guard
        .entry(key)
        .or_insert_with(|| eig as Arc<dyn Any + Send + Sync>);
    Arc::clone(entry)
        .downcast::<SymEigen<T>>()
        .expect("eigen cache entry has the keyed type")
}

/// Normalized state of one symmetric block in the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockState<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> BlockState<T> {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Domain("a block needs at least one qubit".into()));
        }
        if amplitudes.len() != n_qubits + 1 {
            return Err(Error::DimensionMismatch {
                expected: n_qubits + 1,
                found: amplitudes.len(),
            });
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm_sqr = state.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::NotNormalized {
                norm_sqr: norm_sqr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(state)
    }

    /// Coherent spin state polarized along `+x`, with real positive
    /// amplitudes `2^{-j}·√C(n, k)`.
    pub fn css_x(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Domain("a block needs at least one qubit".into()));
        }
        // log-space binomials keep large blocks away from underflow
        let ln2 = T::LN_2();
        let mut log_c = -count::<T>(n_qubits) * ln2 / lit(2.0);
        let mut amplitudes = Vec::with_capacity(n_qubits + 1);
        for k in 0..=n_qubits {
            amplitudes.push(Complex::new(log_c.exp(), T::zero()));
            if k < n_qubits {
                log_c += (count::<T>(n_qubits - k) / count::<T>(k + 1)).ln() / lit(2.0);
            }
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
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

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn overlap(&self, other: &Self) -> Result<Complex<T>> {
        self.check_dim(other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// Largest amplitude-wise distance to `other`.
    pub fn max_amplitude_distance(&self, other: &Self) -> Result<T> {
        self.check_dim(other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm())))
    }

    /// One-axis twist `exp(-i·accel·θ·S_z²)`.
    pub fn apply_oat(&self, theta: T, accel: usize) -> Self {
        let angle = theta * count::<T>(accel);
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let m = dicke_m::<T>(self.n_qubits, k);
                *a * Complex::new(T::zero(), -angle * m * m).exp()
            })
            .collect();
        Self {
            n_qubits: self.n_qubits,
            amplitudes,
        }
    }

    /// Collective rotation `exp(-i·angle·S_axis)`.
    ///
    /// `S_x` is diagonalized once per block size; `S_y` reuses it through
    /// `S_y = D S_x D†` with `D = exp(-iπ/2·S_z)`.
    pub fn apply_rotation(&self, axis: Axis, angle: T) -> Self {
        let n = self.n_qubits;
        let amplitudes = match axis {
            Axis::Z => self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(k, a)| *a * Complex::new(T::zero(), -angle * dicke_m::<T>(n, k)).exp())
                .collect(),
            Axis::X => sx_eigen::<T>(n).propagate(&self.amplitudes, angle),
            Axis::Y => {
                let quarter = T::FRAC_PI_2();
                let phase = |k: usize, sign: T| {
                    Complex::new(T::zero(), sign * quarter * dicke_m::<T>(n, k)).exp()
                };
                let undressed: Vec<_> = self
                    .amplitudes
                    .iter()
                    .enumerate()
                    .map(|(k, a)| *a * phase(k, T::one()))
                    .collect();
                sx_eigen::<T>(n)
                    .propagate(&undressed, angle)
                    .into_iter()
                    .enumerate()
                    .map(|(k, a)| a * phase(k, -T::one()))
                    .collect()
            }
        };
        Self {
            n_qubits: n,
            amplitudes,
        }
    }

    pub fn expectation(&self, op: &CollectiveOperator<T>) -> Result<T> {
        self.check_dim(op.dim())?;
        let o_psi = op.apply(&self.amplitudes);
        let value = self.inner(&o_psi);
        finite(value.re, "expectation")
    }

    pub fn variance(&self, op: &CollectiveOperator<T>) -> Result<T> {
        self.check_dim(op.dim())?;
        let o_psi = op.apply(&self.amplitudes);
        let mean = self.inner(&o_psi).re;
        let second = o_psi.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        finite(clamp_variance(second - mean * mean), "variance")
    }

    /// `⟨S_axis⟩` through the ladder structure.
    pub fn spin_mean(&self, axis: Axis) -> T {
        let s_psi = apply_spin(self.n_qubits, axis, &self.amplitudes);
        self.inner(&s_psi).re
    }

    /// `Var(S_axis)` through the ladder structure.
    pub fn spin_variance(&self, axis: Axis) -> T {
        let s_psi = apply_spin(self.n_qubits, axis, &self.amplitudes);
        let mean = self.inner(&s_psi).re;
        let second = s_psi.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        clamp_variance(second - mean * mean)
    }

    fn inner(&self, other: &[Complex<T>]) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(other)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }
}

fn clamp_variance<T: Real>(v: T) -> T {
    if v < T::zero() {
        T::zero()
    } else {
        v
    }
}

fn finite<T: Real>(v: T, what: &'static str) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Ordered product of independent blocks. The joint tensor is never formed.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiBlockState<T> {
    blocks: Vec<BlockState<T>>,
}

impl<T: Real> MultiBlockState<T> {
    pub fn new(blocks: Vec<BlockState<T>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Domain(
                "a multi-block state needs at least one block".into(),
            ));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[BlockState<T>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<BlockState<T>> {
        self.blocks
    }

    pub fn total_qubits(&self) -> usize {
        self.blocks.iter().map(BlockState::n_qubits).sum()
    }

    /// `Σ_blocks ⟨S_axis⟩`.
    pub fn expectation_sum(&self, axis: Axis) -> Result<T> {
        multiblock_expectation_sum(&self.blocks, axis)
    }

    /// Variance of the summed collective spin. Blocks are uncorrelated, so
    /// this is the sum of block variances.
    pub fn variance_sum(&self, axis: Axis) -> Result<T> {
        if self.blocks.is_empty() {
            return Err(Error::Domain("empty block list".into()));
        }
        Ok(self
            .blocks
            .iter()
            .fold(T::zero(), |acc, b| acc + b.spin_variance(axis)))
    }
}

/// `Σ_blocks ⟨S_axis⟩` over an arbitrary block list.
pub fn multiblock_expectation_sum<T: Real>(blocks: &[BlockState<T>], axis: Axis) -> Result<T> {
    if blocks.is_empty() {
        return Err(Error::Domain("empty block list".into()));
    }
    finite(
        blocks
            .iter()
            .fold(T::zero(), |acc, b| acc + b.spin_mean(axis)),
        "block expectation sum",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn zero_qubits_is_a_domain_error() {
        assert!(matches!(
            make_collective_ops::<f64>(0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(BlockState::<f64>::css_x(0), Err(Error::Domain(_))));
    }

    #[test]
    fn raising_element_two_qubits() {
        // ⟨m=1|S+|m=0⟩ at j=1
        let ops = make_collective_ops::<f64>(2).unwrap();
        let s_plus = ops.sx.get(2, 1) + c(0.0, 1.0) * ops.sy.get(2, 1);
        assert_abs_diff_eq!(s_plus.re, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s_plus.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn single_spin_sz() {
        let ops = make_collective_ops::<f64>(1).unwrap();
        assert_eq!(ops.sz.get(0, 0), c(-0.5, 0.0));
        assert_eq!(ops.sz.get(1, 1), c(0.5, 0.0));
    }

    #[test]
    fn trace_of_sz_squared_four_qubits() {
        let ops = make_collective_ops::<f64>(4).unwrap();
        // m in -2..=2
        let direct: f64 = (-2i32..=2).map(|m| (m * m) as f64).sum();
        assert_eq!(direct, 10.0);
        assert_abs_diff_eq!(ops.sz2.trace().re, direct, epsilon = 1e-14);
    }

    #[test]
    fn ladder_and_commutator_invariants() {
        for n in 1..=9 {
            let ops = make_collective_ops::<f64>(n).unwrap();
            for op in [&ops.sx, &ops.sy, &ops.sz, &ops.sz2] {
                assert!(op.is_hermitian(1e-12));
            }
            let comm = ops.sx.commutator(&ops.sy);
            for (k, v) in comm.iter().enumerate() {
                let want = c(0.0, 1.0) * ops.sz.matrix()[k];
                assert!((v - want).norm() < 1e-10, "n={n} entry {k}");
            }
        }
    }

    #[test]
    fn css_two_qubits_amplitudes() {
        let s = BlockState::<f64>::css_x(2).unwrap();
        let a = s.amplitudes();
        assert_abs_diff_eq!(a[0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(a[2].re, 0.5, epsilon = 1e-15);
        let one = BlockState::<f64>::css_x(1).unwrap();
        assert_abs_diff_eq!(one.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn css_is_top_sx_eigenstate() {
        for n in [1, 2, 5, 16, 64, 256] {
            let s = BlockState::<f64>::css_x(n).unwrap();
            let half_n = n as f64 / 2.0;
            let sx_psi = apply_spin(n, Axis::X, s.amplitudes());
            for (a, b) in sx_psi.iter().zip(s.amplitudes()) {
                assert!((*a - *b * half_n).norm() < 1e-10, "n={n}");
            }
            assert!(s.spin_mean(Axis::Y).abs() < 1e-12);
            assert!(s.spin_mean(Axis::Z).abs() < 1e-10);
            assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn oat_phases_two_qubits() {
        let s = BlockState::<f64>::css_x(2).unwrap();
        let t = s.apply_oat(PI, 1);
        let ratio: Vec<_> = t
            .amplitudes()
            .iter()
            .zip(s.amplitudes())
            .map(|(a, b)| a / b)
            .collect();
        assert!((ratio[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((ratio[1] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((ratio[2] - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn oat_identity_and_acceleration() {
        let s = BlockState::<f64>::css_x(7)
            .unwrap()
            .apply_rotation(Axis::Y, 0.3);
        assert_eq!(s.apply_oat(0.0, 5), s);
        let a = s.apply_oat(0.17, 3);
        let b = s.apply_oat(0.17 * 3.0, 1);
        assert!(a.max_amplitude_distance(&b).unwrap() < 1e-15);
    }

    #[test]
    fn rotation_z_by_pi_flips_sx() {
        let s = BlockState::<f64>::css_x(2).unwrap();
        assert_abs_diff_eq!(s.spin_mean(Axis::X), 1.0, epsilon = 1e-12);
        let r = s.apply_rotation(Axis::Z, PI);
        assert_abs_diff_eq!(r.spin_mean(Axis::X), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn half_integer_spin_two_pi_rotation_is_minus_identity() {
        let s = BlockState::<f64>::css_x(1).unwrap();
        let r = s.apply_rotation(Axis::Y, 2.0 * PI);
        for (a, b) in r.amplitudes().iter().zip(s.amplitudes()) {
            assert!((*a + *b).norm() < 1e-12);
        }
    }

    #[test]
    fn y_rotation_moves_css_on_the_sphere() {
        for n in [1, 4, 9, 30] {
            let half_n = n as f64 / 2.0;
            let phi = 0.41;
            let r = BlockState::<f64>::css_x(n)
                .unwrap()
                .apply_rotation(Axis::Y, phi);
            assert_abs_diff_eq!(r.spin_mean(Axis::X), half_n * phi.cos(), epsilon = 1e-9);
            assert_abs_diff_eq!(r.spin_mean(Axis::Z), -half_n * phi.sin(), epsilon = 1e-9);
            // still coherent: variance along y and along the in-plane normal is n/4
            assert_abs_diff_eq!(r.spin_variance(Axis::Y), n as f64 / 4.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn dense_and_ladder_moments_agree() {
        let n = 6;
        let ops = make_collective_ops::<f64>(n).unwrap();
        let s = BlockState::<f64>::css_x(n)
            .unwrap()
            .apply_oat(0.23, 2)
            .apply_rotation(Axis::X, 0.7)
            .apply_rotation(Axis::Y, -0.2);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let op = ops.get(axis);
            assert_abs_diff_eq!(
                s.expectation(op).unwrap(),
                s.spin_mean(axis),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                s.variance(op).unwrap(),
                s.spin_variance(axis),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn css_variance_two_qubits() {
        let ops = make_collective_ops::<f64>(2).unwrap();
        let s = BlockState::<f64>::css_x(2).unwrap();
        assert_abs_diff_eq!(s.variance(&ops.sy).unwrap(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.expectation(&ops.sx).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_structural_error() {
        let ops = make_collective_ops::<f64>(3).unwrap();
        let s = BlockState::<f64>::css_x(2).unwrap();
        assert!(matches!(
            s.expectation(&ops.sy),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 4
            })
        ));
    }

    #[test]
    fn unnormalized_amplitudes_rejected() {
        let err = BlockState::new(1, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn multiblock_sums() {
        let a = BlockState::<f64>::css_x(2).unwrap();
        let b = BlockState::<f64>::css_x(4).unwrap();
        let m = MultiBlockState::new(vec![a.clone(), b]).unwrap();
        assert_abs_diff_eq!(m.expectation_sum(Axis::X).unwrap(), 3.0, epsilon = 1e-12);
        assert!(m.expectation_sum(Axis::Y).unwrap().abs() < 1e-12);

        let twisted = a.apply_oat(0.4, 1).apply_rotation(Axis::Y, 0.05);
        let single = multiblock_expectation_sum(std::slice::from_ref(&twisted), Axis::Y).unwrap();
        let double = multiblock_expectation_sum(&[twisted.clone(), twisted], Axis::Y).unwrap();
        assert_eq!(double, 2.0 * single);

        assert!(matches!(
            multiblock_expectation_sum::<f64>(&[], Axis::Y),
            Err(Error::Domain(_))
        ));
        assert!(MultiBlockState::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn single_precision_block_runs() {
        let css = BlockState::<f32>::css_x(8).unwrap();
        let echo = css.apply_oat(0.1, 2).apply_oat(-0.1, 2);
        assert!(echo.max_amplitude_distance(&css).unwrap() < 1e-5);
        let r = css.apply_rotation(Axis::Y, 0.2);
        assert!((r.spin_mean(Axis::X) - 4.0 * 0.2f32.cos()).abs() < 1e-4);
    }
}
