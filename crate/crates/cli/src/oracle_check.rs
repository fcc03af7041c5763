//! Symmetric-subspace echoes against full state-vector replays.

use num_complex::Complex;
use squeeze_core::collective::{BlockState, MultiBlockState};
use squeeze_core::fullspace::{oracle_protocol_run, MAX_QUBITS};
use squeeze_core::protocols::{run_scoring, EchoOutcome};
use squeeze_core::{ArchitectureParams, LayerModel, Mode, ProtocolSpec};

use crate::config::arch_label;
use crate::error::{CliError, CliResult};

pub const MOMENT_TOL: f64 = 1e-9;
pub const ECHO_TOL: f64 = 1e-12;

const ANGLES: [(f64, f64); 3] = [(0.13, 0.021), (0.47, -0.033), (1.1, 0.07)];

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub invariant: &'static str,
    pub case: String,
    pub gap: f64,
    pub passed: bool,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<8} {} gap={:e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.invariant,
            self.case,
            self.gap
        )
    }
}

/// Every protocol whose register fits in `max_qubits`.
pub fn cases(max_qubits: usize) -> Vec<ProtocolSpec> {
    let mut out = Vec::new();
    let base = |arch| ProtocolSpec::new(arch, 0.0);
    for n in 1..=max_qubits {
        out.push(base(ArchitectureParams::Qrc { n }));
    }
    for n_in in 1..max_qubits {
        out.push(base(ArchitectureParams::Perceptron { n_in }));
    }
    for n_in in 1..max_qubits {
        for n_out in 1..=max_qubits - n_in {
            for mode in [Mode::Sequential, Mode::Simultaneous, Mode::Steered] {
                out.push(base(ArchitectureParams::Qnn { n_in, n_out }).with_mode(mode));
            }
        }
    }
    for layers in 3..=max_qubits {
        for n_l in 1..=max_qubits / layers {
            for model in [LayerModel::EventAdditive, LayerModel::StateEvolution] {
                out.push(base(ArchitectureParams::Layered { layers, n_l }).with_model(model));
            }
        }
    }
    out
}

fn corrupt(outcome: EchoOutcome<f64>) -> CliResult<EchoOutcome<f64>> {
    let mut blocks = outcome.state.into_blocks();
    let target = outcome.readout[0];
    let b = &blocks[target];
    let mut amps = b.amplitudes().to_vec();
    amps[0] *= Complex::new(0.0, 1.0);
    blocks[target] = BlockState::new(b.n_qubits(), amps)?;
    Ok(EchoOutcome {
        state: MultiBlockState::new(blocks)?,
        readout: outcome.readout,
    })
}

fn case_name(spec: &ProtocolSpec) -> String {
    let extra = match spec.arch {
        ArchitectureParams::Qnn { .. } => format!(" {}", spec.mode),
        ArchitectureParams::Layered { .. } => format!(" {}", spec.model),
        _ => String::new(),
    };
    format!(
        "{}{} theta={} phi={}",
        arch_label(&spec.arch),
        extra,
        spec.theta,
        spec.phi
    )
}

fn check(invariant: &'static str, case: &str, gap: f64, tol: f64) -> CheckResult {
    CheckResult {
        invariant,
        case: case.to_string(),
        gap,
        passed: gap <= tol,
    }
}

/// Runs every check up to `max_qubits`. With `inject_fault` the collective
/// result is corrupted before comparison, so the moment checks must fail.
pub fn cmd_oracle_check(max_qubits: usize, inject_fault: bool) -> CliResult<Vec<CheckResult>> {
    if max_qubits > MAX_QUBITS {
        return Err(CliError::Resource(format!(
            "{max_qubits} qubits exceed the full-space bound of {MAX_QUBITS}"
        )));
    }
    let mut results = Vec::new();
    for spec in cases(max_qubits) {
        for (theta, phi) in ANGLES {
            let s = spec.clone().with_theta(theta).with_phi(phi);
            let name = case_name(&s);
            let mut core = run_scoring(&s)?;
            if inject_fault {
                core = corrupt(core)?;
            }
            let oracle = oracle_protocol_run(&s)?;
            results.push(check(
                "exp_sy",
                &name,
                (core.readout_mean() - oracle.exp_sy).abs(),
                MOMENT_TOL,
            ));
            results.push(check(
                "var_sy",
                &name,
                (core.readout_variance() - oracle.var_sy).abs(),
                MOMENT_TOL,
            ));
        }
        let s = spec.clone().with_theta(ANGLES[1].0);
        let echo = oracle_protocol_run(&s)?;
        let core = run_scoring(&s)?;
        let gap = echo.exp_sy.abs().max(core.readout_mean().abs());
        results.push(check("echo", &case_name(&s), gap, ECHO_TOL));
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_registers_pass() {
        let r = cmd_oracle_check(4, false).unwrap();
        assert!(!r.is_empty());
        assert!(
            r.iter().all(|c| c.passed),
            "{:?}",
            r.iter().find(|c| !c.passed)
        );
    }

    #[test]
    fn single_qubit_is_trivial() {
        let r = cmd_oracle_check(1, false).unwrap();
        assert!(r.iter().all(|c| c.passed));
    }

    #[test]
    fn injected_fault_names_the_invariant() {
        let r = cmd_oracle_check(3, true).unwrap();
        let failed: Vec<_> = r.iter().filter(|c| !c.passed).collect();
        assert!(!failed.is_empty());
        assert!(failed.iter().any(|c| c.invariant == "exp_sy"));
    }
}
