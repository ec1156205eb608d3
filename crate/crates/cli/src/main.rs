use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pinn_core::config::{load_config, ProblemName, Profile, RunConfig};
use pinn_core::pipeline::{cmd_benchmark, cmd_check, cmd_evaluate, cmd_tables, cmd_train};
use pinn_core::PinnError;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_THRESHOLD: u8 = 3;

/// Physics-informed neural networks for the Newell-Whitehead-Segel and
/// Allen-Cahn equations.
#[derive(Parser)]
#[command(name = "pinn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration; omitted keys take the profile defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// nws or allen-cahn; overrides the config file.
    #[arg(long, global = true)]
    problem: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// paper or ci.
    #[arg(long, global = true, default_value = "paper")]
    profile: String,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Checkpoint to read; defaults to model.ckpt in the output directory.
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train and write checkpoint, history.csv and manifest.json.
    Train {
        #[command(flatten)]
        common: Common,
    },
    /// Error grid against the exact solution: errors.csv, norms.csv.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Exit with status 3 if the largest grid error exceeds this.
        #[arg(long)]
        max_error: Option<f64>,
    },
    /// Comparison with the published spline errors: tables.txt.
    Tables {
        #[command(flatten)]
        common: Common,
        /// Exit with status 3 unless every interior point beats this method.
        #[arg(long)]
        require_below: Option<String>,
    },
    /// Inference timing at growing point counts: timing.csv.
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// Exit with status 3 if the linear fit's r² is lower.
        #[arg(long)]
        min_r2: Option<f64>,
    },
    /// Exact-solution residuals and derivative checks.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Error(PinnError),
    Threshold(String),
}

impl From<PinnError> for Failure {
    fn from(e: PinnError) -> Self {
        Failure::Error(e)
    }
}

fn resolve(common: &Common) -> Result<RunConfig, PinnError> {
    let problem = common.problem.as_deref().map(str::parse::<ProblemName>).transpose()?;
    let profile: Profile = common.profile.parse()?;
    let mut cfg = match &common.config {
        Some(path) => load_config(path, problem, profile)?,
        None => RunConfig::from_toml_str("", problem, profile)?,
    };
    if let Some(seed) = common.seed {
        cfg.sampling.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Train { common } => {
            let cfg = resolve(&common)?;
            let r = cmd_train(&cfg)?;
            println!(
                "trained {} ({} parameters, {} iterations): loss {:.3e} -> {:.3e} in {:.1}s; wrote {}",
                r.manifest.problem,
                r.manifest.param_count,
                r.manifest.iterations,
                r.manifest.initial_loss,
                r.manifest.final_loss,
                r.manifest.wall_seconds,
                cfg.output.dir.display()
            );
        }
        Command::Evaluate { common, max_error } => {
            let cfg = resolve(&common)?;
            let report = cmd_evaluate(&cfg, common.checkpoint.as_deref())?;
            println!(
                "max_abs_error {:.6e} over {} points (h = {}, dt = {})",
                report.max_abs_error,
                report.len(),
                cfg.evaluation.h,
                cfg.evaluation.dt
            );
            if let Some(limit) = max_error {
                if !(report.max_abs_error <= limit) {
                    return Err(Failure::Threshold(format!(
                        "max_abs_error {:.3e} exceeds {limit:.3e}",
                        report.max_abs_error
                    )));
                }
            }
        }
        Command::Tables { common, require_below } => {
            let cfg = resolve(&common)?;
            let table = cmd_tables(&cfg, common.checkpoint.as_deref())?;
            print!("{}", table.render());
            if let Some(method) = require_below {
                if !table.methods.contains(&method.as_str()) {
                    return Err(PinnError::Usage(format!(
                        "`{method}` is not in this table; choose one of {}",
                        table.methods.join(", ")
                    ))
                    .into());
                }
                let fails = table.dominance_failures(&method, true);
                if !fails.is_empty() {
                    return Err(Failure::Threshold(format!(
                        "{} interior points are not below {method}",
                        fails.len()
                    )));
                }
            }
        }
        Command::Benchmark { common, min_r2 } => {
            let cfg = resolve(&common)?;
            let record = cmd_benchmark(&cfg, common.checkpoint.as_deref())?;
            println!("{:>8} {:>12}", "points", "seconds");
            for (n, s) in record.point_counts.iter().zip(&record.seconds) {
                println!("{n:>8} {s:>12.6}");
            }
            println!("{}", record.summary());
            if let Some(limit) = min_r2 {
                if !(record.fit.r_squared >= limit) {
                    return Err(Failure::Threshold(format!(
                        "r² {:.4} below {limit}",
                        record.fit.r_squared
                    )));
                }
            }
        }
        Command::Check { common } => {
            let outcomes = cmd_check(common.seed.unwrap_or(1))?;
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(Failure::Threshold(format!("{failed} checks failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Threshold(msg)) => {
            eprintln!("threshold not met: {msg}");
            ExitCode::from(EXIT_THRESHOLD)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                PinnError::Numerical(_) | PinnError::Singularity(_) => EXIT_NUMERICAL,
                _ => EXIT_VALIDATION,
            };
            ExitCode::from(code)
        }
    }
}
