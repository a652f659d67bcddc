//! Batch harness around `nlwave`: resolves a JSON experiment config, runs the
//! owning module, and writes `report.json` plus CSV tables.

// schema checks use `!(a > b)` so NaN fails them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{resolve, ExperimentConfig, Kind, Overrides, Parameters, SchemaError};
pub use report::{Comparison, Report, Table, Verdict};

use experiments::{flowout, forward, linearize, recover, series, trace};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "NLWAVE_WORKERS";

/// Worker count from [`WORKERS_ENV`]; `None` keeps the rayon default.
pub fn workers_from_env() -> Result<Option<usize>, String> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")),
        },
        Err(_) => Ok(None),
    }
}

/// Runs one experiment on a pool of `workers` threads. Results do not
/// depend on the worker count.
pub fn run(config: &ExperimentConfig, workers: Option<usize>) -> Report {
    let echo = serde_json::to_value(config).unwrap_or(serde_json::Value::Null);
    let mut report = Report::new(echo);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(|| dispatch(config, &mut report)),
        Err(e) => report.fail_with("worker pool", e),
    }
    report.finish();
    report
}

fn dispatch(config: &ExperimentConfig, report: &mut Report) {
    let seed = config.seed;
    match &config.parameters {
        Parameters::Series(p) => series::run(p, report),
        Parameters::RecoverLower(p) => recover::run_lower(p, seed, report),
        Parameters::RecoverHigher(p) => recover::run_higher(p, seed, report),
        Parameters::Forward(p) => forward::run(p, report),
        Parameters::Linearize(p) => linearize::run(p, report),
        Parameters::Trace(p) => trace::run(p, seed, report),
        Parameters::Flowout(p) => flowout::run(p, report),
    }
}
