use clap::{Args, Parser, Subcommand, ValueEnum};
use nlwave_cli::{resolve, run, workers_from_env, Kind, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Reproducible verification runs for the nlwave toolkit.
///
/// Exit status: 0 when every verdict passes, 1 when any verdict fails,
/// 2 for configuration errors, 3 when artifacts cannot be written.
/// NLWAVE_WORKERS sets the worker thread count.
#[derive(Parser)]
#[command(name = "nlwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config (or a previous report.json); defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json and CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lower,
    Higher,
}

#[derive(Subcommand)]
enum Command {
    /// Laurent coefficients of the interaction coefficients.
    SeriesCheck(Common),
    /// Round trip of the nonlinearity coefficients through the oracle.
    Recover {
        /// Which coefficients to recover when the config names no kind.
        #[arg(long, value_enum, default_value = "lower")]
        mode: Mode,
        #[command(flatten)]
        common: Common,
    },
    /// Nonlinear forward solve and DN trace.
    Forward(Common),
    /// Finite-difference linearization against the cascade.
    Linearize(Common),
    /// Null bicharacteristics and the observable point.
    Trace(Common),
    /// Fans of null directions and their crossings.
    Flowout(Common),
    /// Any experiment, with the kind taken from the config file.
    Run(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (allowed, common): (Vec<Kind>, Common) = match cli.command {
        Command::SeriesCheck(c) => (vec![Kind::SeriesCheck], c),
        Command::Recover { mode: Mode::Lower, common } => (vec![Kind::RecoverLower, Kind::RecoverHigher], common),
        Command::Recover { mode: Mode::Higher, common } => (vec![Kind::RecoverHigher, Kind::RecoverLower], common),
        Command::Forward(c) => (vec![Kind::Forward], c),
        Command::Linearize(c) => (vec![Kind::LinearizeCheck], c),
        Command::Trace(c) => (vec![Kind::Trace], c),
        Command::Flowout(c) => (vec![Kind::Flowout], c),
        Command::Run(c) => (vec![], c),
    };
    let workers = match workers_from_env() {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides { config: common.config, out: common.out, seed: common.seed };
    let config = match resolve(&allowed, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let start = Instant::now();
    let report = run(&config, workers);
    let wall = start.elapsed().as_secs_f64();
    if let Err(e) = report.emit(&config.output_dir, wall) {
        eprintln!("error: cannot write {}: {e}", config.output_dir.display());
        return ExitCode::from(3);
    }

    for v in &report.verdicts {
        let tol = match (v.target, v.tolerance) {
            (Some(t), Some(tol)) => format!(" (target {t} ± {tol:e})"),
            (None, Some(tol)) => format!(" ({:?} {tol:e})", v.comparison),
            _ => String::new(),
        };
        println!("[{}] {}: {:e}{tol}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.value);
    }
    if let Some(e) = &report.error {
        println!("error: {e}");
    }
    println!("{} in {wall:.2}s -> {}", config.kind, config.output_dir.display());
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
