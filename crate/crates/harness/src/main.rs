use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use satdiam::samplers::{sample_planted, sample_uniform_formula, sample_uniform_satisfiable};
use satdiam::RngStream;
use satdiam_harness::dimacs::to_dimacs_string;
use satdiam_harness::experiments::{self, CertifyKind, ExperimentConfig, OutputFormat};
use satdiam_harness::report::{self, Table};
use satdiam_harness::{verify_identity, HarnessError, Result};

#[derive(Parser)]
#[command(name = "satdiam", version, about = "Random k-SAT solution geometry experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the rate curve f*(x) on a uniform grid.
    Curve(Flags),
    /// Locate eps1 and eps2 and check the negativity assumption at eps2.
    Thresholds(Flags),
    /// Run a grid certificate.
    Certify {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        flags: Flags,
    },
    /// Compare planted distance profiles against the exact expectation.
    McPlanted(Flags),
    /// Diameter histogram over uniformly random satisfiable formulas.
    McDiameter(Flags),
    /// Emit a random formula as DIMACS.
    Gen {
        #[arg(long, value_enum, default_value = "planted")]
        model: Model,
        #[command(flatten)]
        flags: Flags,
    },
    /// Exact tiny-universe check of the transfer identity and T <= W.
    VerifyIdentity(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Prop32,
    Prop33,
    Theorem,
    Diameter,
    Assumption,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Uniform,
    Planted,
    Satisfiable,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    max_tries: Option<u64>,
    /// Smallest relative distance for the diameter certificate.
    #[arg(long)]
    y_min: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl From<Flags> for ExperimentConfig {
    fn from(f: Flags) -> Self {
        ExperimentConfig {
            k: f.k,
            eps: f.eps,
            c: f.c,
            n: f.n,
            m: f.m,
            seed: f.seed,
            trials: f.trials,
            grid: f.grid,
            max_tries: f.max_tries,
            y_min: f.y_min,
            out: f.out,
            format: match f.format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            },
        }
    }
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_report<T: serde::Serialize>(cfg: &ExperimentConfig, command: &str, data: &T, table: Table) -> Result<()> {
    let text = match cfg.format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => report::to_json(command, data)?,
    };
    emit(cfg, &text)
}

/// `Ok(true)` when every check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Curve(flags) => {
            let cfg = flags.into();
            let rep = experiments::run_curve(&cfg)?;
            emit_report(&cfg, "curve", &rep, report::curve_table(&rep))?;
            Ok(true)
        }
        Command::Thresholds(flags) => {
            let cfg = flags.into();
            let rep = experiments::run_thresholds(&cfg)?;
            emit_report(&cfg, "thresholds", &rep, report::threshold_table(&rep))?;
            Ok(rep.passed)
        }
        Command::Certify { which, flags } => {
            let cfg = flags.into();
            let kind = match which {
                Which::Prop32 => CertifyKind::Prop32,
                Which::Prop33 => CertifyKind::Prop33,
                Which::Theorem => CertifyKind::Theorem,
                Which::Diameter => CertifyKind::Diameter,
                Which::Assumption => CertifyKind::Assumption,
            };
            let rep = experiments::run_certify(kind, &cfg)?;
            emit_report(&cfg, "certify", &rep, report::certify_table(&rep))?;
            Ok(rep.passed())
        }
        Command::McPlanted(flags) => {
            let cfg = flags.into();
            let rep = experiments::run_mc_planted(&cfg)?;
            emit_report(&cfg, "mc-planted", &rep, report::mc_planted_table(&rep))?;
            Ok(rep.passed())
        }
        Command::McDiameter(flags) => {
            let cfg = flags.into();
            let rep = experiments::run_mc_diameter(&cfg)?;
            emit_report(&cfg, "mc-diameter", &rep, report::mc_diameter_table(&rep))?;
            Ok(rep.well_formed())
        }
        Command::Gen { model, flags } => {
            let cfg: ExperimentConfig = flags.into();
            let sc = cfg.sampler_config()?;
            let mut rng = RngStream::new(cfg.seed()?, 0);
            let text = match model {
                Model::Uniform => to_dimacs_string(&sample_uniform_formula(&sc, &mut rng)?, None),
                Model::Planted => {
                    let inst = sample_planted(&sc, &mut rng)?;
                    to_dimacs_string(inst.formula(), Some(inst.planted()))
                }
                Model::Satisfiable => {
                    let (f, _) = sample_uniform_satisfiable(&sc, &mut rng, cfg.max_tries())?;
                    to_dimacs_string(&f, None)
                }
            };
            emit(&cfg, &text)?;
            Ok(true)
        }
        Command::VerifyIdentity(flags) => {
            let cfg: ExperimentConfig = flags.into();
            let m = cfg.m.ok_or_else(|| HarnessError::Config("--m is required".into()))?;
            let rep = verify_identity(cfg.n()?, cfg.k()?, m)?;
            emit_report(&cfg, "verify-identity", &rep, report::identity_table(&rep))?;
            Ok(rep.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
