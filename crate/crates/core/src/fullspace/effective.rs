//! Strong-drive effective dynamics checked against full propagation.
//!
//! With the driven block in a strong `x` field `Ω`, each driven qubit sees a
//! longitudinal field `2J·S_z` from the other block. Its dressed energy shift
//! is `2J²S_z²/Ω`, which generates `χ·S_z² ⊗ ΣX` with `χ = 2J²/Ω` in the
//! frame rotating with the drive.

use num_complex::Complex;

use super::{block_m, build_network, propagate, Drive, FullState, PropagatorConfig};
use crate::collective::Axis;
use crate::error::{Error, Result};
use crate::optimize::golden_max;
use crate::scalar::{count, lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    /// Effective state carried back into the lab frame by the bare drive.
    Lab,
    /// Full state with the bare drive rotation removed.
    Toggling,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveComparison<T> {
    pub chi: T,
    pub fidelity: T,
    pub infidelity: T,
    pub frame: Frame,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiCandidate<T> {
    pub label: &'static str,
    pub chi: T,
    pub fidelity: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiFit<T> {
    pub chi: T,
    pub fidelity: T,
    pub candidates: Vec<ChiCandidate<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequentialStageReport<T> {
    /// Stage one against a pure twist of the inputs.
    pub stage_in_fidelity: T,
    /// Both stages against the two-stage effective evolution.
    pub total_fidelity: T,
}

/// `2J²/Ω`
pub fn dressed_chi<T: Real>(j: T, omega: T) -> T {
    lit::<T>(2.0) * j * j / omega
}

fn blocks(
    n_in: usize,
    n_out: usize,
    drive: Drive,
) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
    match drive {
        Drive::Outputs => (0..n_in, n_in..n_in + n_out),
        Drive::Inputs => (n_in..n_in + n_out, 0..n_in),
    }
}

fn hadamard<T: Real>(state: &mut FullState<T>, qubits: std::ops::Range<usize>) {
    let h = Complex::new(T::one() / lit::<T>(2.0).sqrt(), T::zero());
    let gate = [[h, h], [h, -h]];
    for q in qubits {
        state.apply_single(q, gate);
    }
}

/// Exact `exp(-i·χt·S_z² ⊗ ΣX)` with the twisted and driven blocks chosen by
/// `drive`.
pub fn effective_evolve<T: Real>(
    state: &FullState<T>,
    n_in: usize,
    n_out: usize,
    chi_t: T,
    drive: Drive,
) -> FullState<T> {
    let (twisted, driven) = blocks(n_in, n_out, drive);
    let mut out = state.clone();
    hadamard(&mut out, driven.clone());
    out.apply_diagonal_phase(|i| {
        let m: T = block_m(i, twisted.start, twisted.len());
        // ΣX becomes ΣZ = 2·S_z on the driven block
        let x: T = block_m::<T>(i, driven.start, driven.len()) * lit(2.0);
        chi_t * m * m * x
    });
    hadamard(&mut out, driven);
    out
}

fn check_times<T: Real>(j: T, omega: T, t: T) -> Result<()> {
    if !(omega > T::zero()) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "drive strength must be positive (got {omega})"
        )));
    }
    if !j.is_finite() || !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::Domain(
            "coupling and time must be finite, time >= 0".into(),
        ));
    }
    Ok(())
}

/// Full driven evolution from `|+⟩^n` with the drive rotation removed.
fn full_toggling<T: Real>(
    start: &FullState<T>,
    n_in: usize,
    n_out: usize,
    j: T,
    omega: T,
    t: T,
    drive: Drive,
) -> Result<FullState<T>> {
    let h = build_network(n_in, n_out, j, omega, drive)?;
    let mut cfg = PropagatorConfig::auto(n_in + n_out);
    cfg.step = T::one() / (omega * count::<T>(n_in + n_out));
    let mut s = propagate(start, &h, t, &cfg)?;
    let (_, driven) = blocks(n_in, n_out, drive);
    s.rotate_qubits(driven, Axis::X, -lit::<T>(2.0) * omega * t);
    Ok(s)
}

fn fidelity_for_chi<T: Real>(
    full: &FullState<T>,
    start: &FullState<T>,
    n_in: usize,
    n_out: usize,
    chi_t: T,
) -> Result<T> {
    full.fidelity(&effective_evolve(start, n_in, n_out, chi_t, Drive::Outputs))
}

/// Fidelity between full bipartite propagation for time `t` and the
/// effective twist at rate `chi`, both from `|+⟩^n`.
pub fn effective_vs_full<T: Real>(
    n_in: usize,
    n_out: usize,
    j: T,
    omega: T,
    t: T,
    chi: T,
    frame: Frame,
) -> Result<EffectiveComparison<T>> {
    check_times(j, omega, t)?;
    let start = FullState::plus(n_in + n_out)?;
    let eff = effective_evolve(&start, n_in, n_out, chi * t, Drive::Outputs);
    let fidelity = match frame {
        Frame::Toggling => {
            full_toggling(&start, n_in, n_out, j, omega, t, Drive::Outputs)?.fidelity(&eff)?
        }
        Frame::Lab => {
            let h = build_network(n_in, n_out, j, omega, Drive::Outputs)?;
            let mut cfg = PropagatorConfig::auto(n_in + n_out);
            cfg.step = T::one() / (omega * count::<T>(n_in + n_out));
            let full = propagate(&start, &h, t, &cfg)?;
            let mut lab = eff;
            lab.rotate_qubits(n_in..n_in + n_out, Axis::X, lit::<T>(2.0) * omega * t);
            full.fidelity(&lab)?
        }
    };
    Ok(EffectiveComparison {
        chi,
        fidelity,
        infidelity: (T::one() - fidelity).max(T::zero()),
        frame,
    })
}

/// Best-fitting effective rate on `[0, 8J²/Ω]`, plus the fidelities of the
/// two textbook candidates `J²/(2Ω)` and `2J²/Ω`.
pub fn fit_chi<T: Real>(n_in: usize, n_out: usize, j: T, omega: T, t: T) -> Result<ChiFit<T>> {
    check_times(j, omega, t)?;
    if t == T::zero() {
        return Err(Error::Domain("cannot fit a rate at zero time".into()));
    }
    let start = FullState::plus(n_in + n_out)?;
    let full = full_toggling(&start, n_in, n_out, j, omega, t, Drive::Outputs)?;
    let f = |chi: T| fidelity_for_chi(&full, &start, n_in, n_out, chi * t);
    let hi = lit::<T>(4.0) * dressed_chi(j, omega);
    let points = 81;
    let step = hi / count::<T>(points - 1);
    let mut best = (T::zero(), f(T::zero())?);
    for k in 1..points {
        let chi = step * count::<T>(k);
        let v = f(chi)?;
        if v > best.1 {
            best = (chi, v);
        }
    }
    let lo_b = (best.0 - step).max(T::zero());
    let hi_b = (best.0 + step).min(hi);
    if let Ok(m) = golden_max(f, lo_b, hi_b, step * T::tol(1e-9)) {
        if m.value > best.1 {
            best = (m.at, m.value);
        }
    }
    let candidates = vec![
        ChiCandidate {
            label: "J^2/(2*Omega)",
            chi: j * j / (lit::<T>(2.0) * omega),
            fidelity: f(j * j / (lit::<T>(2.0) * omega))?,
        },
        ChiCandidate {
            label: "2*J^2/Omega",
            chi: dressed_chi(j, omega),
            fidelity: f(dressed_chi(j, omega))?,
        },
    ];
    Ok(ChiFit {
        chi: best.0,
        fidelity: best.1,
        candidates,
    })
}

/// Two-stage sequential protocol: outputs driven for `t`, then inputs driven
/// for `t`.
pub fn sequential_stage_fidelity<T: Real>(
    n_in: usize,
    n_out: usize,
    j: T,
    omega: T,
    t: T,
) -> Result<SequentialStageReport<T>> {
    check_times(j, omega, t)?;
    let chi = dressed_chi(j, omega);
    let start = FullState::plus(n_in + n_out)?;
    let stage1 = full_toggling(&start, n_in, n_out, j, omega, t, Drive::Outputs)?;
    let mut ideal = start.clone();
    let twist = chi * t * count::<T>(n_out);
    ideal.apply_diagonal_phase(|i| {
        let m: T = block_m(i, 0, n_in);
        twist * m * m
    });
    let stage_in_fidelity = stage1.fidelity(&ideal)?;
    let full = full_toggling(&stage1, n_in, n_out, j, omega, t, Drive::Inputs)?;
    let eff1 = effective_evolve(&start, n_in, n_out, chi * t, Drive::Outputs);
    let eff = effective_evolve(&eff1, n_in, n_out, chi * t, Drive::Inputs);
    Ok(SequentialStageReport {
        stage_in_fidelity,
        total_fidelity: full.fidelity(&eff)?,
    })
}
