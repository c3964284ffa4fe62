//! Experiment runner: kernel-approximation error protocols, the KRR
//! benchmark, slope fits, and CSV/JSON reporting.
//!
//! A run is described by an [`ExperimentConfig`] and produces a list of
//! [`ResultRecord`]s. Trials are spread over the rayon pool, but every
//! random stream is derived from the master seed by counter and every
//! aggregate is reduced in trial order, so the CSV does not depend on the
//! number of threads.

mod approx;
mod bench;
mod config;
mod stats;
pub mod target;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::kernels::{median_bandwidth, KernelSpec};
use crate::seed::{derive_seed, label};

pub use approx::run_approx_error;
pub use bench::{bench_target, run_krr_bench, training_set};
pub use config::{ExperimentConfig, ExperimentKind, DEFAULT_APPROX_GRID, DEFAULT_KRR_GRID};
pub use stats::{fit_loglog_slope, mean, median, quantile_sorted};
pub use target::{calibrate, target_r05, target_r1, TargetSpec};

pub const CSV_HEADER: &str = "experiment,sampler,d,M,statistic,value,trials,wall_ms,seed";

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub sampler: String,
    pub d: usize,
    /// Absent for per-sampler summaries (slopes, exact KRR, `m_star`).
    pub m: Option<usize>,
    pub statistic: String,
    pub value: f64,
    pub trials: usize,
    pub wall_ms: u64,
    pub seed: u64,
}

impl ResultRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.sampler,
            self.d,
            self.m.map(|m| m.to_string()).unwrap_or_default(),
            self.statistic,
            fmt_float(self.value),
            self.trials,
            self.wall_ms,
            self.seed
        )
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:?}")
}

/// Records plus anything worth telling the reader that is not a number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub records: Vec<ResultRecord>,
    pub notes: Vec<String>,
    /// Kernel length scale actually used.
    pub sigma: f64,
    pub wall_ms: u64,
}

impl RunOutput {
    /// First record matching `sampler`, `m` and `statistic`.
    pub fn find(&self, sampler: &str, m: Option<usize>, statistic: &str) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.sampler == sampler && r.m == m && r.statistic == statistic)
            .map(|r| r.value)
    }
}

/// Runs whichever experiment `cfg` names.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    if cfg.experiment.is_approx() {
        run_approx_error(cfg)
    } else {
        run_krr_bench(cfg)
    }
}

pub fn write_csv<W: Write>(mut out: W, records: &[ResultRecord]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Sidecar<'a> {
    library: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    sigma: f64,
    notes: &'a [String],
    total_wall_ms: u64,
    mse_target: &'static str,
}

/// JSON metadata describing a run: resolved config, library version, notes.
pub fn sidecar_json(cfg: &ExperimentConfig, out: &RunOutput) -> Result<String> {
    let s = Sidecar {
        library: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        sigma: out.sigma,
        notes: &out.notes,
        total_wall_ms: out.wall_ms,
        mse_target: "test MSE is measured against the noiseless regression function",
    };
    serde_json::to_string_pretty(&s).map_err(|e| crate::Error::Io(e.to_string()))
}

/// Writes `path` (CSV) and `path` with a `.json` extension (sidecar).
pub fn write_outputs(path: &Path, cfg: &ExperimentConfig, out: &RunOutput) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(file, &out.records)?;
    std::fs::write(path.with_extension("json"), sidecar_json(cfg, out)?)?;
    Ok(())
}

/// The configured kernel, with the median heuristic filling in a missing
/// bandwidth.
pub fn resolve_kernel(cfg: &ExperimentConfig) -> Result<KernelSpec> {
    let sigma = match cfg.sigma {
        Some(s) => s,
        None => median_bandwidth(
            cfg.d,
            cfg.bandwidth_probes,
            derive_seed(cfg.master_seed, &[label("bandwidth"), cfg.d as u64]),
        )?,
    };
    KernelSpec::new(cfg.kernel, sigma, cfg.d)
}

pub(crate) fn elapsed_ms(cfg: &ExperimentConfig, nanos: u128) -> u64 {
    if cfg.record_timing {
        (nanos / 1_000_000) as u64
    } else {
        0
    }
}
