use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use squeeze_cli::compare::{cmd_compare, CompareConfig, COMPARE_PHI_STEP};
use squeeze_cli::config::{SweepArgs, SweepConfig};
use squeeze_cli::oracle_check::cmd_oracle_check;
use squeeze_cli::sweep::{cmd_sweep, write_json};
use squeeze_cli::validate::{cmd_validate_effective, ValidateConfig};
use squeeze_cli::{CliError, CliResult};

/// Echo-based field sensing on reservoirs, perceptrons and layered networks.
#[derive(Parser, Debug)]
#[command(name = "squeeze", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the twist angle and write per-point sensitivities as CSV.
    Sweep {
        /// Flat JSON file of flag values; flags given here take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        args: SweepArgs,
    },
    /// Compare a layered network with a reservoir of equal size.
    Compare {
        #[arg(long)]
        n_total: usize,
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long, default_value_t = COMPARE_PHI_STEP)]
        phi_step: f64,
        /// JSON report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the strong-drive effective Hamiltonian against full dynamics.
    ValidateEffective {
        #[arg(long, default_value_t = 2)]
        n_in: usize,
        #[arg(long, default_value_t = 1)]
        n_out: usize,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        /// Drive strengths in units of J, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "20,40,80,160")]
        omega: Vec<f64>,
        /// Evolution time; defaults to 0.2/J.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check collective echoes against full state-vector replays.
    OracleCheck {
        #[arg(long, default_value_t = 6)]
        max_qubits: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn emit<T: Serialize>(out: Option<PathBuf>, value: &T) -> CliResult<()> {
    match out {
        Some(path) => write_json(&path, value),
        None => {
            let text = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sweep { config, args } => {
            let base = match config {
                Some(path) => SweepArgs::from_file(&path)?,
                None => SweepArgs::default(),
            };
            let cfg = SweepConfig::resolve(args.over(base))?;
            let summary = cmd_sweep(&cfg)?;
            println!("wrote {} rows to {}", summary.rows, summary.csv.display());
            Ok(())
        }
        Command::Compare {
            n_total,
            layers,
            phi_step,
            out,
        } => {
            let cfg = CompareConfig {
                n_total,
                layers,
                phi_step,
            };
            emit(out, &cmd_compare(&cfg)?)
        }
        Command::ValidateEffective {
            n_in,
            n_out,
            j,
            omega,
            t,
            out,
        } => {
            let mut cfg = ValidateConfig::ladder(n_in, n_out, j);
            cfg.omega_over_j = omega;
            if let Some(t) = t {
                cfg.t = t;
            }
            emit(out, &cmd_validate_effective(&cfg)?)
        }
        Command::OracleCheck {
            max_qubits,
            inject_fault,
        } => {
            let results = cmd_oracle_check(max_qubits, inject_fault)?;
            let failed = results.iter().filter(|c| !c.passed).count();
            for r in &results {
                println!("{r}");
            }
            println!("{} checks, {} failed", results.len(), failed);
            if failed > 0 {
                Err(CliError::CheckFailed(failed))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("squeeze: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
