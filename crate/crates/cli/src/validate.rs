//! Strong-drive effective Hamiltonian against full propagation.

use serde::Serialize;
use squeeze_core::fullspace::{dressed_chi, effective_vs_full, fit_chi, Frame, MAX_QUBITS};

use crate::error::{CliError, CliResult};

/// Fidelities closer than this are treated as equal.
pub const ROUNDOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ValidateConfig {
    pub n_in: usize,
    pub n_out: usize,
    pub j: f64,
    /// Drive strengths in units of `J`.
    pub omega_over_j: Vec<f64>,
    pub t: f64,
}

impl ValidateConfig {
    /// `Ω/J ∈ {20, 40, 80, 160}` at `J·t = 0.2`.
    pub fn ladder(n_in: usize, n_out: usize, j: f64) -> Self {
        let t = if j == 0.0 { 0.2 } else { 0.2 / j.abs() };
        Self {
            n_in,
            n_out,
            j,
            omega_over_j: vec![20.0, 40.0, 80.0, 160.0],
            t,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub label: String,
    pub chi: f64,
    pub infidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaRow {
    pub omega: f64,
    pub omega_over_j: f64,
    pub chi: f64,
    pub infidelity: f64,
    pub chi_fit: f64,
    pub infidelity_fit: f64,
    pub candidates: Vec<Candidate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidateReport {
    pub n_in: usize,
    pub n_out: usize,
    pub j: f64,
    pub t: f64,
    pub frame: &'static str,
    pub rows: Vec<OmegaRow>,
    /// Infidelity never rises along the ladder beyond [`ROUNDOFF`].
    pub monotone: bool,
}

pub fn cmd_validate_effective(cfg: &ValidateConfig) -> CliResult<ValidateReport> {
    let total = cfg.n_in + cfg.n_out;
    if total > MAX_QUBITS {
        return Err(CliError::Resource(format!(
            "{total} qubits exceed the full-space bound of {MAX_QUBITS}"
        )));
    }
    if cfg.omega_over_j.is_empty() {
        return Err(CliError::Usage("empty drive list".into()));
    }
    let scale = if cfg.j == 0.0 { 1.0 } else { cfg.j.abs() };
    let rows = cfg
        .omega_over_j
        .iter()
        .map(|&r| {
            let omega = r * scale;
            let chi = dressed_chi(cfg.j, omega);
            let cmp = effective_vs_full(
                cfg.n_in,
                cfg.n_out,
                cfg.j,
                omega,
                cfg.t,
                chi,
                Frame::Toggling,
            )?;
            let fit = fit_chi(cfg.n_in, cfg.n_out, cfg.j, omega, cfg.t)?;
            Ok(OmegaRow {
                omega,
                omega_over_j: r,
                chi,
                infidelity: cmp.infidelity,
                chi_fit: fit.chi,
                infidelity_fit: (1.0 - fit.fidelity).max(0.0),
                candidates: fit
                    .candidates
                    .iter()
                    .map(|c| Candidate {
                        label: c.label.to_string(),
                        chi: c.chi,
                        infidelity: (1.0 - c.fidelity).max(0.0),
                    })
                    .collect(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let monotone = rows
        .windows(2)
        .all(|w| w[1].infidelity <= w[0].infidelity + ROUNDOFF);
    Ok(ValidateReport {
        n_in: cfg.n_in,
        n_out: cfg.n_out,
        j: cfg.j,
        t: cfg.t,
        frame: "toggling",
        rows,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_is_exact() {
        let r = cmd_validate_effective(&ValidateConfig::ladder(2, 1, 0.0)).unwrap();
        for row in &r.rows {
            assert!(row.infidelity.abs() < 1e-12);
        }
        assert!(r.monotone);
    }

    #[test]
    fn ladder_is_monotone() {
        let r = cmd_validate_effective(&ValidateConfig::ladder(2, 1, 1.0)).unwrap();
        assert!(r.monotone);
        assert!(r.rows[3].infidelity < 1e-3);
        assert_eq!(r.rows[0].candidates.len(), 2);
    }

    #[test]
    fn oversized_is_a_resource_error() {
        let cfg = ValidateConfig::ladder(15, 6, 1.0);
        assert!(matches!(
            cmd_validate_effective(&cfg),
            Err(CliError::Resource(_))
        ));
    }
}
