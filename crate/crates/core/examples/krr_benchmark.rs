//! Small regression benchmark: mean and interquartile band of the test MSE
//! for exact KRR and for feature KRR per sampler, plus the first M that gets
//! within 10% of exact KRR.

use rqmcf::features::Sampler;
use rqmcf::harness::{run_krr_bench, ExperimentConfig, ExperimentKind};

fn main() -> rqmcf::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::KrrBench);
    cfg.d = 2;
    cfg.n_train = 512;
    cfg.n_test = 10_000;
    cfg.trials = 8;
    cfg.m_grid = vec![16, 32, 64, 128];
    cfg.samplers = vec![Sampler::Mc, Sampler::SobolOwen];

    let out = run_krr_bench(&cfg)?;
    println!("sigma = {:.4}", out.sigma);
    for note in &out.notes {
        println!("{note}");
    }
    let band = |s: &str, m: Option<usize>| {
        let get = |stat| out.find(s, m, stat).unwrap_or(f64::NAN);
        format!("{:.4} [{:.4}, {:.4}]", get("mean"), get("q25"), get("q75"))
    };
    println!("exact        {}", band("exact", None));
    for m in &cfg.m_grid {
        for s in &cfg.samplers {
            println!("{:<10} {m:>4} {}", s.name(), band(s.name(), Some(*m)));
        }
    }
    for s in &cfg.samplers {
        if let Some(m) = out.find(s.name(), None, "m_star") {
            println!("{s} reaches exact KRR within 10% at M = {m}");
        }
    }
    Ok(())
}
