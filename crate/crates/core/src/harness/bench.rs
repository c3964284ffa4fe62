use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::stats::{mean, quantile_sorted};
use super::target::TargetSpec;
use super::{elapsed_ms, resolve_kernel, ExperimentConfig, ExperimentKind, ResultRecord, RunOutput};
use crate::error::{Error, Result};
use crate::features::{gaussian_quantile_unchecked, sample_features, Sampler, EPS_Q};
use crate::kernels::KernelSpec;
use crate::krr::{fit_exact, fit_features, lambda_schedule, test_mse, RegressionDataset};
use crate::qmc::uniform_points;
use crate::seed::{derive_seed, label, rng_from_seed, trial_seed};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Estimator {
    Exact,
    Features(Sampler, usize),
}

/// Training sample of trial `trial`: uniform inputs, `y = f(x) + N(0, 1)`.
/// Normal variates go through the same quantile function as the features.
pub fn training_set(cfg: &ExperimentConfig, target: &TargetSpec, trial: usize) -> Result<RegressionDataset> {
    let ts = trial_seed(cfg.master_seed, trial as u64);
    let x = uniform_points(cfg.n_train, cfg.d, derive_seed(ts, &[label("train")]))?;
    let mut rng = rng_from_seed(derive_seed(ts, &[label("noise")]));
    let truth: Vec<f64> = x.rows().map(|row| target.eval(row)).collect();
    let y = truth
        .iter()
        .map(|f| f + gaussian_quantile_unchecked(rng.gen::<f64>().clamp(EPS_Q, 1.0 - EPS_Q)))
        .collect();
    RegressionDataset::new(x.as_slice().to_vec(), cfg.d, y)?.with_truth(truth)
}

/// Calibrated regression function of a benchmark config.
pub fn bench_target(cfg: &ExperimentConfig, kernel: &KernelSpec) -> Result<TargetSpec> {
    TargetSpec::new(cfg.r, cfg.d, kernel.sigma)?
        .calibrated(cfg.calibration_probes, derive_seed(cfg.master_seed, &[label("calibration"), cfg.d as u64]))
}

/// Test MSE of exact KRR and of feature KRR for every sampler and `M`,
/// over `trials` independent training sets and one fixed test set.
///
/// Emits `mean`, `q25`, `q75` per estimator, and per sampler the smallest
/// grid `M` whose mean lies within 10% of exact KRR (`m_star`).
pub fn run_krr_bench(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    if cfg.experiment != ExperimentKind::KrrBench {
        return Err(Error::Config(format!("{} is not a KRR benchmark", cfg.experiment.name())));
    }
    let start = Instant::now();
    let kernel = resolve_kernel(cfg)?;
    let target = bench_target(cfg, &kernel)?;
    let lambda = lambda_schedule(cfg.n_train, cfg.r, cfg.lambda_coeff)?;
    let test = uniform_points(cfg.n_test, cfg.d, derive_seed(cfg.master_seed, &[label("test"), cfg.d as u64]))?;
    let f_test: Vec<f64> = test.rows().map(|row| target.eval(row)).collect();

    let mut estimators = Vec::new();
    if cfg.include_exact {
        estimators.push(Estimator::Exact);
    }
    for &s in &cfg.samplers {
        estimators.extend(cfg.m_grid.iter().map(|&m| Estimator::Features(s, m)));
    }

    let per_trial: Vec<Vec<(f64, u128)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<(f64, u128)>> {
            let data = training_set(cfg, &target, t)?;
            let ts = trial_seed(cfg.master_seed, t as u64);
            estimators
                .iter()
                .map(|est| {
                    let t0 = Instant::now();
                    let model = match *est {
                        Estimator::Exact => fit_exact(&data, &kernel, lambda)?,
                        Estimator::Features(s, m) => {
                            let seed = derive_seed(ts, &[label("features"), label(s.name()), m as u64]);
                            fit_features(&data, &sample_features(s, &kernel, m, seed)?, lambda)?
                        }
                    };
                    let mse = test_mse(&model, test.as_slice(), &f_test)?;
                    Ok((mse, t0.elapsed().as_nanos()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut notes = vec![format!("lambda = {lambda:?}"), format!("target scale = {:?}", target.scale)];
    let mut means = Vec::with_capacity(estimators.len());
    for (k, est) in estimators.iter().enumerate() {
        let mut values: Vec<f64> = per_trial.iter().map(|t| t[k].0).collect();
        let nanos: u128 = per_trial.iter().map(|t| t[k].1).sum();
        let avg = mean(&values);
        means.push(avg);
        values.sort_by(f64::total_cmp);
        let (sampler, m) = match *est {
            Estimator::Exact => ("exact", None),
            Estimator::Features(s, m) => (s.name(), Some(m)),
        };
        let ms = elapsed_ms(cfg, nanos);
        for (stat, v) in [("mean", avg), ("q25", quantile_sorted(&values, 0.25)), ("q75", quantile_sorted(&values, 0.75))] {
            records.push(ResultRecord {
                experiment: cfg.experiment.name().into(),
                sampler: sampler.into(),
                d: cfg.d,
                m,
                statistic: stat.into(),
                value: v,
                trials: cfg.trials,
                wall_ms: ms,
                seed: cfg.master_seed,
            });
        }
    }

    if cfg.include_exact {
        let exact = means[0];
        for &s in &cfg.samplers {
            let hit = estimators
                .iter()
                .zip(&means)
                .find(|(e, &v)| matches!(e, Estimator::Features(x, _) if *x == s) && (v - exact).abs() <= 0.1 * exact);
            match hit {
                Some((Estimator::Features(_, m), _)) => records.push(ResultRecord {
                    experiment: cfg.experiment.name().into(),
                    sampler: s.name().into(),
                    d: cfg.d,
                    m: None,
                    statistic: "m_star".into(),
                    value: *m as f64,
                    trials: cfg.trials,
                    wall_ms: 0,
                    seed: cfg.master_seed,
                }),
                _ => notes.push(format!("{s} never came within 10% of exact KRR on this grid")),
            }
        }
    }

    Ok(RunOutput { records, notes, sigma: kernel.sigma, wall_ms: start.elapsed().as_millis() as u64 })
}
