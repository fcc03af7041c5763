//! Qubit-by-qubit replay of an echo in the full `2^n` space.

use super::{block_m, check_qubits, FullState};
use crate::error::{Error, Result};
use crate::protocols::{central_slope, scoring_plan, EchoPlan, LinearResponse, Mode, ProtocolSpec};
use crate::scalar::{count, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleMoments<T> {
    pub exp_sy: T,
    pub var_sy: T,
}

fn twist<T: Real>(state: &mut FullState<T>, offset: usize, n: usize, angle: T) {
    state.apply_diagonal_phase(|i| {
        let m: T = block_m(i, offset, n);
        angle * m * m
    });
}

fn replay<T: Real>(plan: &EchoPlan, spec: &ProtocolSpec<T>, phi: T) -> Result<OracleMoments<T>> {
    let n_total = plan.total_qubits();
    check_qubits(n_total)?;
    let offsets: Vec<usize> = plan
        .blocks
        .iter()
        .scan(0, |acc, b| {
            let o = *acc;
            *acc += b.n;
            Some(o)
        })
        .collect();
    let mut state = FullState::<T>::plus(n_total)?;
    let theta = spec.theta;
    let forward: Vec<(usize, usize)> = match spec.mode {
        Mode::Simultaneous => plan.total_twists().into_iter().enumerate().collect(),
        Mode::Sequential | Mode::Steered => plan.stages.clone(),
    };
    for &(b, a) in &forward {
        twist(
            &mut state,
            offsets[b],
            plan.blocks[b].n,
            theta * count::<T>(a),
        );
    }
    if phi != T::zero() {
        for (b, blk) in plan.blocks.iter().enumerate() {
            if blk.encoded {
                state.rotate_qubits(offsets[b]..offsets[b] + blk.n, spec.encoding_axis, phi);
            }
        }
    }
    for &(b, a) in forward.iter().rev() {
        twist(
            &mut state,
            offsets[b],
            plan.blocks[b].n,
            -theta * count::<T>(a),
        );
    }
    let readout: Vec<usize> = plan
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.encoded)
        .flat_map(|(b, blk)| offsets[b]..offsets[b] + blk.n)
        .collect();
    // blocks are unentangled, so the summed variance is the joint one
    let (exp_sy, var_sy) = state.collective_moments(&readout, crate::collective::Axis::Y);
    if !exp_sy.is_finite() || !var_sy.is_finite() {
        return Err(Error::NonFinite("oracle moments"));
    }
    Ok(OracleMoments { exp_sy, var_sy })
}

/// Readout moments of the scoring echo, computed without the symmetric
/// subspace.
pub fn oracle_protocol_run<T: Real>(spec: &ProtocolSpec<T>) -> Result<OracleMoments<T>> {
    let plan = scoring_plan(spec)?;
    replay(&plan, spec, spec.phi)
}

/// `d⟨S_y⟩/dφ` at `φ = 0` from full-space replays.
pub fn oracle_linear_response<T: Real>(spec: &ProtocolSpec<T>) -> Result<LinearResponse<T>> {
    let plan = scoring_plan(spec)?;
    check_qubits(plan.total_qubits())?;
    central_slope(|phi| Ok(replay(&plan, spec, phi)?.exp_sy), spec.fd_step)
}
