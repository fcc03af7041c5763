use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use squeeze_core::protocols::{analytic_theta_opt, find_theta_opt, point_report};
use squeeze_core::{ArchitectureParams, Convention};

use crate::config::{arch_label, SweepConfig};
use crate::error::{CliError, CliResult};
use crate::format::{write_csv, ResultRow};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeakRow {
    pub theta: f64,
    pub deriv_numeric: f64,
    pub deriv_analytic: Option<f64>,
    pub delta_phi_css: Option<f64>,
    pub delta_phi_paper: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArchSummary {
    pub arch: String,
    pub label: String,
    pub mode: String,
    pub model: Option<String>,
    pub theta_opt_numeric: Option<f64>,
    pub theta_opt_analytic: Option<f64>,
    /// Why no numeric optimum was found, when none was.
    pub theta_opt_error: Option<String>,
    /// Grid row with the largest `|deriv_numeric|`.
    pub peak: PeakRow,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub csv: PathBuf,
    pub rows: usize,
    pub architectures: Vec<ArchSummary>,
}

fn row_for(cfg: &SweepConfig, arch: &ArchitectureParams, theta: f64) -> CliResult<ResultRow> {
    let spec = cfg.spec(arch, theta);
    let report = point_report(&spec)?;
    let layered = matches!(arch, ArchitectureParams::Layered { .. });
    Ok(ResultRow {
        arch: arch.kind(),
        layers: arch.layers(),
        n_in: arch.n_in(),
        n_out: arch.n_out(),
        n_l: arch.n_per_layer(),
        theta,
        mode: spec.mode,
        model: layered.then_some(spec.model),
        exp_sy: report.exp_sy,
        var_sy0: report.var_sy0,
        deriv_numeric: report.deriv_numeric,
        deriv_analytic: report.deriv_analytic,
        delta_phi_css: cfg
            .convention
            .includes(Convention::Css)
            .then_some(report.delta_phi_css),
        delta_phi_paper: cfg
            .convention
            .includes(Convention::Paper)
            .then_some(report.delta_phi_paper),
    })
}

/// Evaluates the grid on a pool of `cfg.workers` threads. Rows come back
/// ordered by architecture name, then `theta`.
pub fn compute_rows(cfg: &SweepConfig) -> CliResult<Vec<ResultRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Resource(e.to_string()))?;
    let thetas = cfg.thetas();
    let points: Vec<(usize, f64)> = (0..cfg.archs.len())
        .flat_map(|a| thetas.iter().map(move |&t| (a, t)))
        .collect();
    let mut rows = pool.install(|| {
        points
            .par_iter()
            .map(|&(a, t)| row_for(cfg, &cfg.archs[a], t))
            .collect::<CliResult<Vec<_>>>()
    })?;
    rows.sort_by(|a, b| {
        a.arch
            .to_string()
            .cmp(&b.arch.to_string())
            .then(a.theta.total_cmp(&b.theta))
    });
    Ok(rows)
}

pub fn summarize(cfg: &SweepConfig, rows: &[ResultRow]) -> CliResult<Vec<ArchSummary>> {
    cfg.archs
        .iter()
        .map(|arch| {
            let spec = cfg.spec(arch, 0.0);
            let peak = rows
                .iter()
                .filter(|r| r.arch == arch.kind())
                .max_by(|a, b| a.deriv_numeric.abs().total_cmp(&b.deriv_numeric.abs()))
                .ok_or_else(|| CliError::Numeric("no rows for architecture".into()))?;
            let (theta_opt_numeric, theta_opt_error) = match find_theta_opt(&spec, None) {
                Ok(o) => (Some(o.theta), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Ok(ArchSummary {
                arch: arch.kind().to_string(),
                label: arch_label(arch),
                mode: spec.mode.to_string(),
                model: peak.model.map(|m| m.to_string()),
                theta_opt_numeric,
                theta_opt_analytic: analytic_theta_opt(&spec),
                theta_opt_error,
                peak: PeakRow {
                    theta: peak.theta,
                    deriv_numeric: peak.deriv_numeric,
                    deriv_analytic: peak.deriv_analytic,
                    delta_phi_css: peak.delta_phi_css,
                    delta_phi_paper: peak.delta_phi_paper,
                },
            })
        })
        .collect()
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn gnuplot_script(csv: &Path, cfg: &SweepConfig) -> String {
    let mut kinds: Vec<String> = cfg.archs.iter().map(|a| a.kind().to_string()).collect();
    kinds.sort();
    let file = csv
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let archs = kinds.join(" ");
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 1200,480\n\
         set output '{stem}.png'\n\
         set multiplot layout 1,2\n\
         set xlabel 'theta'\n\
         set ylabel 'd<S_y>/dphi'\n\
         plot for [a in \"{archs}\"] '{file}' using 6:(strcol(1) eq a ? $11 : NaN) skip 1 with linespoints title a\n\
         set logscale y\n\
         set ylabel 'delta phi'\n\
         plot for [a in \"{archs}\"] '{file}' using 6:(strcol(1) eq a ? $13 : NaN) skip 1 with linespoints title a\n\
         unset multiplot\n",
        stem = csv.file_stem().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
    )
}

/// Writes the CSV at `cfg.out`, the JSON summary beside it, and optionally a
/// gnuplot script.
pub fn cmd_sweep(cfg: &SweepConfig) -> CliResult<SweepSummary> {
    let rows = compute_rows(cfg)?;
    let architectures = summarize(cfg, &rows)?;
    write_csv(create(&cfg.out)?, &rows)?;
    let summary = SweepSummary {
        csv: cfg.out.clone(),
        rows: rows.len(),
        architectures,
    };
    write_json(&cfg.out.with_extension("json"), &summary)?;
    if cfg.emit_gnuplot {
        let gp = cfg.out.with_extension("gp");
        fs::write(&gp, gnuplot_script(&cfg.out, cfg)).map_err(|e| CliError::io(gp, e))?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ArchArg, SweepArgs};

    fn config(workers: usize) -> SweepConfig {
        SweepConfig::resolve(SweepArgs {
            arch: Some(vec![ArchArg::Qrc, ArchArg::Perceptron, ArchArg::Qnn]),
            n_in: Some(3),
            theta_min: Some(0.05),
            theta_max: Some(0.4),
            theta_steps: Some(5),
            workers: Some(workers),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn rows_sorted_and_independent_of_workers() {
        let a = compute_rows(&config(1)).unwrap();
        let b = compute_rows(&config(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 15);
        let keys: Vec<_> = a.iter().map(|r| (r.arch.to_string(), r.theta)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
        assert_eq!(keys, sorted);
    }

    #[test]
    fn qrc_three_summary_uses_quarter_pi() {
        let cfg = SweepConfig::resolve(SweepArgs {
            n_in: Some(3),
            theta_min: Some(0.1),
            theta_max: Some(0.2),
            theta_steps: Some(2),
            ..Default::default()
        })
        .unwrap();
        let rows = compute_rows(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        let s = summarize(&cfg, &rows).unwrap();
        let t = s[0].theta_opt_analytic.unwrap();
        assert!((t - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert_eq!(s[0].peak.deriv_numeric, rows[1].deriv_numeric);
    }
}
