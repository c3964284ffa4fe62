//! Synthetic regression functions for the KRR benchmark.
//!
//! For smoothness `r = 1` the target is `f~(x) = int K(x, z) g(z) dz` over the
//! unit cube with `g(z) = exp(|z|^2 / (2 sigma^2))`, which has the closed form
//! `sigma^{2d} exp(-|x|^2 / (2 sigma^2)) prod_j (exp(x_j / sigma^2) - 1) / x_j`.
//! For `r = 1/2` it is a sum of two kernel sections centred at `1/3` and
//! `2/3` of the diagonal. Both are rescaled so that their mean over the cube
//! is 5.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelSpec};
use crate::seed::rng_from_seed;

pub const DEFAULT_CALIBRATION_PROBES: usize = 1_000_000;
pub const MIN_CALIBRATION_PROBES: usize = 10_000;
pub const TARGET_MEAN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    /// 1.0 or 0.5.
    pub r: f64,
    pub d: usize,
    /// Gaussian kernel length scale.
    pub sigma: f64,
    /// Multiplier applied to `f~`; 1.0 until calibrated.
    pub scale: f64,
}

impl TargetSpec {
    pub fn new(r: f64, d: usize, sigma: f64) -> Result<Self> {
        if r != 1.0 && r != 0.5 {
            return Err(Error::Domain(format!("targets exist for r = 1 and r = 0.5, got {r}")));
        }
        KernelSpec::gaussian(sigma, d)?;
        Ok(Self { r, d, sigma, scale: 1.0 })
    }

    /// A copy with `scale` chosen by [`calibrate`].
    pub fn calibrated(mut self, n_probe: usize, seed: u64) -> Result<Self> {
        self.scale = 1.0;
        self.scale = calibrate(&self, n_probe, seed)?;
        Ok(self)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.r == 1.0 {
            target_r1(x, self)
        } else {
            target_r05(x, self)
        }
    }
}

/// `(e^t - 1) / t`, equal to 1 at `t = 0`.
#[inline]
fn expm1_ratio(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.exp_m1() / t
    }
}

/// The `r = 1` target. Each factor `sigma^2 (e^{x_j/sigma^2} - 1) / x_j` is
/// evaluated as `expm1(t)/t` with `t = x_j / sigma^2`, which is continuous
/// through `x_j = 0`.
pub fn target_r1(x: &[f64], spec: &TargetSpec) -> f64 {
    let s2 = spec.sigma * spec.sigma;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let prod: f64 = x.iter().map(|&v| expm1_ratio(v / s2)).product();
    spec.scale * (-sq / (2.0 * s2)).exp() * prod
}

/// The `r = 1/2` target `K(1/3 1, x) + K(2/3 1, x)`.
pub fn target_r05(x: &[f64], spec: &TargetSpec) -> f64 {
    let s2 = spec.sigma * spec.sigma;
    let (mut a, mut b) = (0.0, 0.0);
    for &v in x {
        a += (v - 1.0 / 3.0).powi(2);
        b += (v - 2.0 / 3.0).powi(2);
    }
    spec.scale * ((-a / (2.0 * s2)).exp() + (-b / (2.0 * s2)).exp())
}

/// `5 / mean(f)` over `n_probe` uniform points in `[0,1)^d`.
pub fn calibration_constant(f: impl Fn(&[f64]) -> f64, d: usize, n_probe: usize, seed: u64) -> Result<f64> {
    if n_probe < MIN_CALIBRATION_PROBES {
        return Err(Error::Domain(format!(
            "calibration needs at least {MIN_CALIBRATION_PROBES} probes, got {n_probe}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut x = vec![0.0; d];
    let mut sum = 0.0;
    for _ in 0..n_probe {
        x.iter_mut().for_each(|v| *v = rng.gen());
        sum += f(&x);
    }
    let mean = sum / n_probe as f64;
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::Domain(format!("target mean {mean} is not positive")));
    }
    Ok(TARGET_MEAN / mean)
}

/// Calibration constant for `spec` with its current scale treated as 1.
pub fn calibrate(spec: &TargetSpec, n_probe: usize, seed: u64) -> Result<f64> {
    let raw = TargetSpec { scale: 1.0, ..*spec };
    calibration_constant(|x| raw.eval(x), spec.d, n_probe, seed)
}

/// Kernel used by a target (handy for the quadrature check).
pub fn target_kernel(spec: &TargetSpec) -> impl Kernel {
    KernelSpec::gaussian(spec.sigma, spec.d).expect("validated in TargetSpec::new")
}
