//! Sweep configuration from flags and an optional flat JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use squeeze_core::ProtocolSpec;
use squeeze_core::{ArchitectureParams, Convention, LayerModel, Mode};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArchArg {
    Qrc,
    Perceptron,
    Qnn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Sequential,
    Simultaneous,
    Steered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    EventAdditive,
    StateEvolution,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionArg {
    Paper,
    Css,
    #[default]
    Both,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sequential => Mode::Sequential,
            ModeArg::Simultaneous => Mode::Simultaneous,
            ModeArg::Steered => Mode::Steered,
        }
    }
}

impl From<ModelArg> for LayerModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::EventAdditive => LayerModel::EventAdditive,
            ModelArg::StateEvolution => LayerModel::StateEvolution,
        }
    }
}

impl ConventionArg {
    pub fn includes(self, c: Convention) -> bool {
        match self {
            Self::Both => true,
            Self::Paper => c == Convention::Paper,
            Self::Css => c == Convention::Css,
        }
    }
}

/// Sweep settings as given on the command line or in a config file. Every
/// field is optional so the two sources can be layered.
#[derive(Clone, Debug, Default, PartialEq, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SweepArgs {
    /// Architectures to sweep, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    #[serde(default, deserialize_with = "arch_list")]
    pub arch: Option<Vec<ArchArg>>,
    #[arg(long)]
    pub n_in: Option<usize>,
    #[arg(long)]
    pub n_out: Option<usize>,
    /// Layer count for `qnn`; three or more selects the layered stack.
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub n_per_layer: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub theta_steps: Option<usize>,
    /// Sequencing of the two-layer `qnn`.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub emit_gnuplot: Option<bool>,
    /// Encoding angle at which `exp_sy` is reported.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Finite-difference step of the linear response.
    #[arg(long)]
    pub phi_step: Option<f64>,
}

/// Accepts `"qrc,qnn"` as well as `["qrc", "qnn"]`.
fn arch_list<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Vec<ArchArg>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        One(String),
        Many(Vec<ArchArg>),
    }
    match Raw::deserialize(d)? {
        Raw::Many(v) => Ok(Some(v)),
        Raw::One(s) => s
            .split(',')
            .map(|k| ArchArg::from_str(k.trim(), true).map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

impl SweepArgs {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Self) -> Self {
        Self {
            arch: self.arch.or(base.arch),
            n_in: self.n_in.or(base.n_in),
            n_out: self.n_out.or(base.n_out),
            layers: self.layers.or(base.layers),
            n_per_layer: self.n_per_layer.or(base.n_per_layer),
            theta_min: self.theta_min.or(base.theta_min),
            theta_max: self.theta_max.or(base.theta_max),
            theta_steps: self.theta_steps.or(base.theta_steps),
            mode: self.mode.or(base.mode),
            model: self.model.or(base.model),
            convention: self.convention.or(base.convention),
            out: self.out.or(base.out),
            workers: self.workers.or(base.workers),
            emit_gnuplot: self.emit_gnuplot.or(base.emit_gnuplot),
            phi: self.phi.or(base.phi),
            phi_step: self.phi_step.or(base.phi_step),
        }
    }
}

pub const DEFAULT_PHI: f64 = 0.01;
pub const DEFAULT_PHI_STEP: f64 = 1e-3;

/// Validated sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub archs: Vec<ArchitectureParams>,
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_steps: usize,
    pub mode: Option<Mode>,
    pub model: LayerModel,
    pub convention: ConventionArg,
    pub out: PathBuf,
    pub workers: usize,
    pub emit_gnuplot: bool,
    pub phi: f64,
    pub phi_step: f64,
}

impl SweepConfig {
    pub fn resolve(args: SweepArgs) -> CliResult<Self> {
        let n_in = args.n_in.unwrap_or(4);
        let n_out = args.n_out.unwrap_or(2);
        let mut kinds: Vec<ArchArg> = Vec::new();
        for k in args.arch.unwrap_or_else(|| vec![ArchArg::Qrc]) {
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
        let archs = kinds
            .iter()
            .map(|k| match k {
                ArchArg::Qrc => Ok(ArchitectureParams::Qrc { n: n_in }),
                ArchArg::Perceptron => Ok(ArchitectureParams::Perceptron { n_in }),
                ArchArg::Qnn => match (args.layers, args.n_per_layer) {
                    (Some(l), _) if l < 2 => Err(CliError::Usage(format!(
                        "qnn needs at least 2 layers (got {l})"
                    ))),
                    (Some(l), n_l) if l > 2 => Ok(ArchitectureParams::Layered {
                        layers: l,
                        n_l: n_l.unwrap_or(n_in),
                    }),
                    (_, Some(n_l)) => Ok(ArchitectureParams::Qnn {
                        n_in: n_l,
                        n_out: n_l,
                    }),
                    _ => Ok(ArchitectureParams::Qnn { n_in, n_out }),
                },
            })
            .collect::<CliResult<Vec<_>>>()?;
        let cfg = Self {
            archs,
            theta_min: args.theta_min.unwrap_or(0.0),
            theta_max: args.theta_max.unwrap_or(std::f64::consts::FRAC_PI_4),
            theta_steps: args.theta_steps.unwrap_or(41),
            mode: args.mode.map(Mode::from),
            model: args
                .model
                .map(LayerModel::from)
                .unwrap_or(LayerModel::StateEvolution),
            convention: args.convention.unwrap_or_default(),
            out: args.out.unwrap_or_else(|| PathBuf::from("sweep.csv")),
            workers: args.workers.unwrap_or(1),
            emit_gnuplot: args.emit_gnuplot.unwrap_or(false),
            phi: args.phi.unwrap_or(DEFAULT_PHI),
            phi_step: args.phi_step.unwrap_or(DEFAULT_PHI_STEP),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.theta_steps < 2 {
            return usage(format!(
                "theta-steps must be at least 2 (got {})",
                self.theta_steps
            ));
        }
        if !(self.theta_min < self.theta_max) || !self.theta_max.is_finite() {
            return usage(format!(
                "empty theta range [{}, {}]",
                self.theta_min, self.theta_max
            ));
        }
        if self.workers == 0 {
            return usage("workers must be at least 1".into());
        }
        for arch in &self.archs {
            arch.validate()?;
            for theta in [self.theta_min, self.theta_max] {
                self.spec(arch, theta).validate()?;
            }
        }
        Ok(())
    }

    /// Evenly spaced grid, endpoints included exactly.
    pub fn thetas(&self) -> Vec<f64> {
        let n = self.theta_steps - 1;
        let span = self.theta_max - self.theta_min;
        (0..=n)
            .map(|k| {
                if k == n {
                    self.theta_max
                } else {
                    self.theta_min + span * k as f64 / n as f64
                }
            })
            .collect()
    }

    pub fn spec(&self, arch: &ArchitectureParams, theta: f64) -> ProtocolSpec {
        let mut spec = ProtocolSpec::new(*arch, theta)
            .with_phi(self.phi)
            .with_fd_step(self.phi_step)
            .with_model(self.model);
        if let (ArchitectureParams::Qnn { .. }, Some(mode)) = (arch, self.mode) {
            spec = spec.with_mode(mode);
        }
        spec
    }
}

pub fn arch_label(arch: &ArchitectureParams) -> String {
    match *arch {
        ArchitectureParams::Qrc { n } => format!("qrc(n={n})"),
        ArchitectureParams::Perceptron { n_in } => format!("perceptron(n_in={n_in})"),
        ArchitectureParams::Qnn { n_in, n_out } => format!("qnn(n_in={n_in},n_out={n_out})"),
        ArchitectureParams::Layered { layers, n_l } => format!("qnn(L={layers},n_l={n_l})"),
    }
}
