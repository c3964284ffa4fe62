//! Shift-invariant kernels, Gram matrices and the median-heuristic bandwidth.
//!
//! Every family is parameterized by a length scale `sigma` that divides the
//! input difference:
//!
//! | family      | `K(x, x')`                                  | spectral component |
//! |-------------|---------------------------------------------|--------------------|
//! | `Gaussian`  | `exp(-\|x - x'\|^2 / (2 sigma^2))`          | `N(0, 1/sigma^2)`  |
//! | `Laplacian` | `exp(-\|x - x'\|_1 / sigma)`                | Cauchy, scale `1/sigma` |
//! | `Cauchy`    | `prod_j 1 / (1 + (x_j - x'_j)^2 / sigma^2)` | Laplace, scale `1/sigma` |
//!
//! A Gaussian written as `exp(-\|s (x - x')\|^2 / 2)` corresponds to
//! `sigma = 1 / s`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Gaussian,
    Laplacian,
    Cauchy,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Laplacian => "laplacian",
            KernelFamily::Cauchy => "cauchy",
        }
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(KernelFamily::Gaussian),
            "laplacian" => Ok(KernelFamily::Laplacian),
            "cauchy" => Ok(KernelFamily::Cauchy),
            other => Err(Error::Config(format!("unknown kernel family '{other}'"))),
        }
    }
}

/// Anything that evaluates a positive-definite kernel on `R^d`.
///
/// `eval` assumes both arguments have length `dim()`; use [`eval_kernel`] for
/// a checked call.
pub trait Kernel: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], y: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub sigma: f64,
    pub dim: usize,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, sigma: f64, dim: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::NonPositiveSigma(sigma));
        }
        if dim == 0 {
            return Err(Error::Domain("kernel dimension must be at least 1".into()));
        }
        Ok(Self { family, sigma, dim })
    }

    pub fn gaussian(sigma: f64, dim: usize) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, sigma, dim)
    }
}

impl Kernel for KernelSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let diffs = x.iter().zip(y).map(|(a, b)| a - b);
        match self.family {
            KernelFamily::Gaussian => {
                let sq: f64 = diffs.map(|d| d * d).sum();
                (-sq / (2.0 * self.sigma * self.sigma)).exp()
            }
            KernelFamily::Laplacian => {
                let l1: f64 = diffs.map(f64::abs).sum();
                (-l1 / self.sigma).exp()
            }
            KernelFamily::Cauchy => diffs
                .map(|d| {
                    let z = d / self.sigma;
                    1.0 / (1.0 + z * z)
                })
                .product(),
        }
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Checked kernel evaluation.
pub fn eval_kernel<K: Kernel + ?Sized>(kernel: &K, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(kernel.dim(), x.len())?;
    check_dim(kernel.dim(), y.len())?;
    Ok(kernel.eval(x, y))
}

/// `[K(x_i, x_j)]` for the rows of `x` (row-major, `n x dim`).
pub fn gram_matrix<K: Kernel + ?Sized>(kernel: &K, x: &[f64]) -> Result<DMatrix<f64>> {
    let d = kernel.dim();
    if x.is_empty() || x.len() % d != 0 {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() % d });
    }
    let n = x.len() / d;
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        let xi = &x[i * d..(i + 1) * d];
        for j in 0..=i {
            let v = kernel.eval(xi, &x[j * d..(j + 1) * d]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Default number of pairs for [`median_bandwidth`].
pub const DEFAULT_BANDWIDTH_PROBES: usize = 1_000_000;

/// Median of `|X - X'|` over `n_probe` independent pairs `X, X' ~ Unif[0,1]^d`.
pub fn median_bandwidth(d: usize, n_probe: usize, seed: u64) -> Result<f64> {
    if n_probe < 2 || d == 0 {
        return Err(Error::Domain(format!(
            "median bandwidth needs d >= 1 and at least 2 probes (got d={d}, n={n_probe})"
        )));
    }
    let mut rng = crate::seed::rng_from_seed(seed);
    let mut dists: Vec<f64> = (0..n_probe)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let delta = rng.gen::<f64>() - rng.gen::<f64>();
                    delta * delta
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Ok(median_in_place(&mut dists))
}

/// Median of a non-empty slice (mean of the two middle order statistics for
/// even lengths). Reorders the slice.
pub(crate) fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    let mid = n / 2;
    let (lo, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *m;
    if n % 2 == 1 {
        upper
    } else {
        let lower = lo.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}
