//! A layered network against a reservoir of the same total size.

use serde::Serialize;
use squeeze_core::analytic::{
    delta_sy0, layered_optimum, qrc_optimum, ratio_display_expression, sensitivity, AnalyticOptimum,
};
use squeeze_core::protocols::{find_theta_opt, linear_response, point_report};
use squeeze_core::ProtocolSpec;
use squeeze_core::{ArchitectureParams, Convention, LayerModel};

use crate::error::{CliError, CliResult};

/// Finite-difference step used by the comparison.
pub const COMPARE_PHI_STEP: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct CompareConfig {
    pub n_total: usize,
    pub layers: usize,
    pub phi_step: f64,
}

impl CompareConfig {
    pub fn new(n_total: usize, layers: usize) -> Self {
        Self {
            n_total,
            layers,
            phi_step: COMPARE_PHI_STEP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Optimum {
    pub theta_analytic: f64,
    pub theta_numeric: f64,
    pub deriv_analytic: f64,
    /// Numeric slope at the numeric optimum.
    pub deriv_numeric: f64,
    /// Numeric slope at the analytic optimum.
    pub deriv_numeric_at_analytic: f64,
    /// Readout variance at `φ = 0` from the simulation.
    pub var_sy0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaPhi {
    pub qrc: f64,
    pub qnn: f64,
    /// `qnn / qrc`
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pipelines {
    pub analytic: DeltaPhi,
    pub numeric: DeltaPhi,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelComparison {
    pub model: Option<String>,
    pub qnn: Optimum,
    pub delta_phi_paper: Pipelines,
    pub delta_phi_css: Pipelines,
    pub derivative_ratio_analytic: f64,
    pub derivative_ratio_numeric: f64,
    /// `θ_opt` of a lone reservoir of one layer over `θ_opt` of the network.
    pub time_reduction: Option<f64>,
    /// `θ_opt` of the full-size reservoir over `θ_opt` of the network.
    pub theta_ratio_total: f64,
    /// Largest relative analytic-versus-numeric gap over slopes and `Δφ`.
    pub max_relative_gap: f64,
    /// Largest absolute gap between analytic and numeric optimal angles.
    pub max_theta_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub n_total: usize,
    pub layers: usize,
    pub n_l: usize,
    pub phi_step: f64,
    pub qrc: Optimum,
    pub display_expression: Option<f64>,
    pub models: Vec<ModelComparison>,
}

fn simulate(spec: &ProtocolSpec, analytic: AnalyticOptimum<f64>) -> CliResult<Optimum> {
    let numeric = find_theta_opt(spec, None)?;
    let at_analytic = linear_response(&spec.clone().with_theta(analytic.theta))?.value;
    let var_sy0 = point_report(&spec.clone().with_theta(analytic.theta))?.var_sy0;
    Ok(Optimum {
        theta_analytic: analytic.theta,
        theta_numeric: numeric.theta,
        deriv_analytic: analytic.deriv,
        deriv_numeric: numeric.deriv,
        deriv_numeric_at_analytic: at_analytic,
        var_sy0,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn pipelines(
    n_total: usize,
    qrc: &Optimum,
    qnn: &Optimum,
    conv: Convention,
) -> CliResult<Pipelines> {
    let analytic_noise = delta_sy0::<f64>(n_total, conv);
    let numeric_noise = |o: &Optimum| match conv {
        Convention::Css => o.var_sy0.sqrt(),
        Convention::Paper => analytic_noise,
    };
    let analytic = DeltaPhi {
        qrc: sensitivity(qrc.deriv_analytic, analytic_noise)?,
        qnn: sensitivity(qnn.deriv_analytic, analytic_noise)?,
        ratio: 0.0,
    };
    let numeric = DeltaPhi {
        qrc: sensitivity(qrc.deriv_numeric, numeric_noise(qrc))?,
        qnn: sensitivity(qnn.deriv_numeric, numeric_noise(qnn))?,
        ratio: 0.0,
    };
    let fill = |d: DeltaPhi| DeltaPhi {
        ratio: d.qnn / d.qrc,
        ..d
    };
    Ok(Pipelines {
        analytic: fill(analytic),
        numeric: fill(numeric),
    })
}

fn compare_model(
    cfg: &CompareConfig,
    n_l: usize,
    qrc: &Optimum,
    model: Option<LayerModel>,
) -> CliResult<ModelComparison> {
    let (qnn, lone_theta) = match model {
        None => (*qrc, Some(qrc.theta_analytic)),
        Some(model) => {
            let analytic = layered_optimum::<f64>(cfg.layers, n_l, model)?;
            let spec = ProtocolSpec::new(
                ArchitectureParams::Layered {
                    layers: cfg.layers,
                    n_l,
                },
                analytic.theta,
            )
            .with_model(model)
            .with_fd_step(cfg.phi_step);
            let lone = qrc_optimum::<f64>(n_l).ok().map(|o| o.theta);
            (simulate(&spec, analytic)?, lone)
        }
    };
    let paper = pipelines(cfg.n_total, qrc, &qnn, Convention::Paper)?;
    let css = pipelines(cfg.n_total, qrc, &qnn, Convention::Css)?;
    let derivative_ratio_analytic = qnn.deriv_analytic.abs() / qrc.deriv_analytic.abs();
    let derivative_ratio_numeric = qnn.deriv_numeric.abs() / qrc.deriv_numeric.abs();
    let gaps = [
        rel(qrc.deriv_analytic, qrc.deriv_numeric),
        rel(qrc.deriv_analytic, qrc.deriv_numeric_at_analytic),
        rel(qnn.deriv_analytic, qnn.deriv_numeric),
        rel(qnn.deriv_analytic, qnn.deriv_numeric_at_analytic),
        rel(derivative_ratio_analytic, derivative_ratio_numeric),
        rel(paper.analytic.ratio, paper.numeric.ratio),
        rel(css.analytic.ratio, css.numeric.ratio),
        rel(css.analytic.qrc, css.numeric.qrc),
        rel(css.analytic.qnn, css.numeric.qnn),
    ];
    Ok(ModelComparison {
        model: model.map(|m| m.to_string()),
        qnn,
        delta_phi_paper: paper,
        delta_phi_css: css,
        derivative_ratio_analytic,
        derivative_ratio_numeric,
        time_reduction: lone_theta.map(|t| t / qnn.theta_analytic),
        theta_ratio_total: qrc.theta_analytic / qnn.theta_analytic,
        max_relative_gap: gaps.into_iter().fold(0.0, f64::max),
        max_theta_gap: (qrc.theta_analytic - qrc.theta_numeric)
            .abs()
            .max((qnn.theta_analytic - qnn.theta_numeric).abs()),
    })
}

/// Runs a reservoir of `n_total` qubits and an `L`-layer network of
/// `n_total / L` qubits per layer at their optimal twists, through both the
/// closed forms and simulation.
pub fn cmd_compare(cfg: &CompareConfig) -> CliResult<CompareReport> {
    if cfg.layers == 0 || cfg.n_total % cfg.layers != 0 {
        return Err(CliError::Usage(format!(
            "n-total {} is not divisible by {} layers",
            cfg.n_total, cfg.layers
        )));
    }
    if !(cfg.phi_step > 0.0) {
        return Err(CliError::Usage("phi-step must be positive".into()));
    }
    let n_l = cfg.n_total / cfg.layers;
    let qrc_spec = ProtocolSpec::new(ArchitectureParams::Qrc { n: cfg.n_total }, 0.0)
        .with_fd_step(cfg.phi_step);
    let qrc = simulate(&qrc_spec, qrc_optimum(cfg.n_total)?)?;
    let models: Vec<Option<LayerModel>> = match cfg.layers {
        1 => vec![None],
        2 => vec![Some(LayerModel::StateEvolution)],
        _ => vec![
            Some(LayerModel::EventAdditive),
            Some(LayerModel::StateEvolution),
        ],
    };
    let models = models
        .into_iter()
        .map(|m| compare_model(cfg, n_l, &qrc, m))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CompareReport {
        n_total: cfg.n_total,
        layers: cfg.layers,
        n_l,
        phi_step: cfg.phi_step,
        qrc,
        display_expression: (cfg.layers > 1).then(|| ratio_display_expression(cfg.layers, n_l)),
        models,
    })
}
