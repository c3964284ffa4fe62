//! A scaled-down kernel approximation experiment written as CSV to stdout.
//!
//! cargo run --release --example approx_error_experiment > approx.csv

use rqmcf::features::Sampler;
use rqmcf::harness::{run_approx_error, write_csv, ExperimentConfig, ExperimentKind};

fn main() -> rqmcf::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::ApproxAvg);
    cfg.d = 2;
    cfg.samplers = vec![Sampler::Mc, Sampler::Halton, Sampler::SobolOwen];
    cfg.m_grid = vec![16, 32, 64, 128, 256, 512];
    cfg.n_pairs = Some(200);
    cfg.trials = 20;
    cfg.master_seed = 42;

    let out = run_approx_error(&cfg)?;
    write_csv(std::io::stdout().lock(), &out.records)?;
    for s in &cfg.samplers {
        if let Some(slope) = out.find(s.name(), None, "slope") {
            eprintln!("{s}: log2-log2 slope {slope:.3}");
        }
    }
    Ok(())
}
