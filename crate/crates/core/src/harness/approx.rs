use std::time::Instant;

use rayon::prelude::*;

use super::stats::{fit_loglog_slope, mean, median};
use super::{elapsed_ms, resolve_kernel, ExperimentConfig, ExperimentKind, ResultRecord, RunOutput};
use crate::error::{Error, Result};
use crate::features::{sample_features, FeatureBank, Sampler};
use crate::kernels::Kernel;
use crate::qmc::uniform_points;
use crate::seed::{derive_seed, label};

/// Seed of replicate `r` of `sampler` at `m` features. Independent of the
/// experiment kind, so the three protocols see the same draws.
pub(crate) fn feature_seed(cfg: &ExperimentConfig, sampler: Sampler, m: usize, r: usize) -> u64 {
    derive_seed(
        cfg.master_seed,
        &[label("features"), label(sampler.name()), cfg.d as u64, m as u64, r as u64],
    )
}

/// `|K(x_i, y_i) - K_M(x_i, y_i)|^2` for every pair.
fn squared_errors(bank: &FeatureBank, xs: &[f64], ys: &[f64], exact: &[f64]) -> Vec<f64> {
    let d = bank.dim();
    let mut fx = vec![0.0; bank.len()];
    let mut fy = vec![0.0; bank.len()];
    xs.chunks_exact(d)
        .zip(ys.chunks_exact(d))
        .zip(exact)
        .map(|((x, y), k)| {
            bank.features_into(x, &mut fx);
            bank.features_into(y, &mut fy);
            let km: f64 = fx.iter().zip(&fy).map(|(a, b)| a * b).sum();
            (k - km).powi(2)
        })
        .collect()
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Kernel approximation error of each sampler over the M grid.
///
/// * `approx_avg`: mean over pairs of the replicate-mean squared error.
/// * `approx_sup_avg`: max over pairs of the replicate-mean squared error.
/// * `approx_det`: max over pairs of the squared error of one feature set,
///   reported as mean and median over replicates.
///
/// The deterministic Halton sampler uses a single feature set per `M`.
/// A log-log slope of the first statistic is appended per sampler when the
/// grid has at least three points.
pub fn run_approx_error(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    if !cfg.experiment.is_approx() {
        return Err(Error::Config(format!("{} is not an approximation experiment", cfg.experiment.name())));
    }
    let start = Instant::now();
    let kernel = resolve_kernel(cfg)?;
    let (d, n) = (cfg.d, cfg.pairs());
    let pts = uniform_points(2 * n, d, derive_seed(cfg.master_seed, &[label("pairs"), d as u64]))?;
    let (xs, ys) = pts.as_slice().split_at(n * d);
    let exact: Vec<f64> = xs.chunks_exact(d).zip(ys.chunks_exact(d)).map(|(x, y)| kernel.eval(x, y)).collect();

    let mut records = Vec::new();
    let mut notes = Vec::new();
    let record = |sampler: Sampler, m: Option<usize>, statistic: &str, value: f64, trials: usize, ms: u64| {
        ResultRecord {
            experiment: cfg.experiment.name().into(),
            sampler: sampler.name().into(),
            d,
            m,
            statistic: statistic.into(),
            value,
            trials,
            wall_ms: ms,
            seed: cfg.master_seed,
        }
    };

    for &sampler in &cfg.samplers {
        let reps = if sampler.is_randomized() { cfg.trials } else { 1 };
        let mut series = Vec::with_capacity(cfg.m_grid.len());
        for &m in &cfg.m_grid {
            let t0 = Instant::now();
            let draw = |r: usize| -> Result<Vec<f64>> {
                let bank = sample_features(sampler, &kernel, m, feature_seed(cfg, sampler, m, r))?;
                Ok(squared_errors(&bank, xs, ys, &exact))
            };
            let stats: Vec<(&str, f64)> = match cfg.experiment {
                ExperimentKind::ApproxDet => {
                    let sups: Vec<f64> =
                        (0..reps).into_par_iter().map(|r| draw(r).map(|e| max(&e))).collect::<Result<_>>()?;
                    vec![("sup_sq_err_mean", mean(&sups)), ("sup_sq_err_median", median(&sups))]
                }
                _ => {
                    let per_rep: Vec<Vec<f64>> = (0..reps).into_par_iter().map(draw).collect::<Result<_>>()?;
                    let mut acc = vec![0.0; n];
                    for errs in &per_rep {
                        acc.iter_mut().zip(errs).for_each(|(a, e)| *a += e);
                    }
                    acc.iter_mut().for_each(|a| *a /= reps as f64);
                    if cfg.experiment == ExperimentKind::ApproxAvg {
                        vec![("mean_sq_err", mean(&acc))]
                    } else {
                        vec![("sup_mean_sq_err", max(&acc))]
                    }
                }
            };
            let ms = elapsed_ms(cfg, t0.elapsed().as_nanos());
            series.push((m as f64, stats[0].1));
            for (name, value) in stats {
                records.push(record(sampler, Some(m), name, value, reps, ms));
            }
        }
        match fit_loglog_slope(&series) {
            Ok(slope) => records.push(record(sampler, None, "slope", slope, reps, 0)),
            Err(e) => notes.push(format!("slope omitted for {sampler}: {e}")),
        }
    }

    Ok(RunOutput {
        records,
        notes,
        sigma: kernel.sigma,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(kind);
        cfg.d = 2;
        cfg.m_grid = vec![16, 32, 64];
        cfg.n_pairs = Some(50);
        cfg.trials = 8;
        cfg.bandwidth_probes = 10_000;
        cfg.master_seed = 3;
        cfg
    }

    #[test]
    fn record_layout() {
        let cfg = small(ExperimentKind::ApproxAvg);
        let out = run_approx_error(&cfg).unwrap();
        // 3 samplers x 3 M + 3 slopes.
        assert_eq!(out.records.len(), 12);
        assert!(out.notes.is_empty());
        let halton = out.records.iter().find(|r| r.sampler == "halton").unwrap();
        assert_eq!(halton.trials, 1);
        assert!(out.find("mc", None, "slope").is_some());
        assert!(out.records.iter().all(|r| r.wall_ms == 0));
    }

    #[test]
    fn short_grid_flags_missing_slope() {
        let mut cfg = small(ExperimentKind::ApproxSupAvg);
        cfg.m_grid = vec![64];
        let out = run_approx_error(&cfg).unwrap();
        assert!(out.records.iter().all(|r| r.statistic != "slope"));
        assert_eq!(out.notes.len(), cfg.samplers.len());
    }

    #[test]
    fn single_replicate_sup_average_is_deterministic_sup() {
        let mut sup = small(ExperimentKind::ApproxSupAvg);
        sup.trials = 1;
        let mut det = sup.clone();
        det.experiment = ExperimentKind::ApproxDet;
        let a = run_approx_error(&sup).unwrap();
        let b = run_approx_error(&det).unwrap();
        for s in ["mc", "sobol_owen", "halton"] {
            for m in [16, 32, 64] {
                let x = a.find(s, Some(m), "sup_mean_sq_err").unwrap();
                assert_eq!(x, b.find(s, Some(m), "sup_sq_err_mean").unwrap());
                assert_eq!(x, b.find(s, Some(m), "sup_sq_err_median").unwrap());
            }
        }
    }

    #[test]
    fn average_never_exceeds_sup() {
        let avg = run_approx_error(&small(ExperimentKind::ApproxAvg)).unwrap();
        let sup = run_approx_error(&small(ExperimentKind::ApproxSupAvg)).unwrap();
        for r in avg.records.iter().filter(|r| r.m.is_some()) {
            let s = sup.find(&r.sampler, r.m, "sup_mean_sq_err").unwrap();
            assert!(r.value <= s);
        }
    }

    #[test]
    fn rejects_krr_config() {
        let cfg = ExperimentConfig::new(ExperimentKind::KrrBench);
        assert!(matches!(run_approx_error(&cfg), Err(Error::Config(_))));
    }
}
