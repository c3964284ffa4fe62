//! Exact kernel ridge regression against its random-feature versions on a
//! smooth synthetic target with N(0,1) noise.

use rqmcf::features::{sample_features, Sampler};
use rqmcf::harness::{bench_target, resolve_kernel, training_set, ExperimentConfig, ExperimentKind};
use rqmcf::krr::{fit_exact, fit_features, lambda_schedule, test_mse};
use rqmcf::qmc::uniform_points;

fn main() -> rqmcf::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::KrrBench);
    cfg.d = 2;
    cfg.n_train = 1024;
    cfg.bandwidth_probes = 200_000;

    let kernel = resolve_kernel(&cfg)?;
    let target = bench_target(&cfg, &kernel)?;
    let data = training_set(&cfg, &target, 0)?;
    let lambda = lambda_schedule(cfg.n_train, cfg.r, cfg.lambda_coeff)?;

    let x_test = uniform_points(20_000, cfg.d, 123)?;
    let f_test: Vec<f64> = x_test.rows().map(|x| target.eval(x)).collect();

    let exact = fit_exact(&data, &kernel, lambda)?;
    println!("n = {}, sigma = {:.4}, lambda = {lambda:.5}", data.len(), kernel.sigma);
    println!("exact KRR test MSE: {:.5}", test_mse(&exact, x_test.as_slice(), &f_test)?);
    for m in [16, 64, 256] {
        let row: Vec<String> = [Sampler::Mc, Sampler::Halton, Sampler::SobolOwen]
            .into_iter()
            .map(|s| {
                let bank = sample_features(s, &kernel, m, 7)?;
                let model = fit_features(&data, &bank, lambda)?;
                Ok(format!("{s} {:.5}", test_mse(&model, x_test.as_slice(), &f_test)?))
            })
            .collect::<rqmcf::Result<_>>()?;
        println!("M = {m:>4}: {}", row.join(", "));
    }
    Ok(())
}
