//! Random Fourier features driven by (randomized) low-discrepancy points.
//!
//! A point `omega = (t, b)` of `[0,1)^{d+1}` becomes the feature
//! `psi(x, omega) = sqrt(2) cos(x . Q(t) + 2 pi b)`, where `Q` applies the
//! spectral quantile of the kernel componentwise to the first `d`
//! coordinates and `b`, the last coordinate, is the phase. Averaging
//! `psi(x, omega_i) psi(x', omega_i)` over `M` such points approximates the
//! kernel; the approximation error depends on how the points are sampled
//! (see [`Sampler`]).

mod quantile;

pub use quantile::{gaussian_quantile, normal_cdf};
pub(crate) use quantile::gaussian_quantile_unchecked;

use std::f64::consts::{PI, SQRT_2};
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelFamily, KernelSpec};
use crate::qmc::{
    cp_rotate, halton_points, owen_scramble, sobol_points_count, uniform_points, PointMeta,
    PointSet, ScrambleSpec,
};

/// Uniform inputs are clamped to `[EPS_Q, 1 - EPS_Q]` before the quantile
/// transform so every frequency is finite.
pub const EPS_Q: f64 = 1.0 / (1u64 << 53) as f64;

/// How the `M` points in `[0,1)^{d+1}` are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// i.i.d. uniform (plain random features).
    Mc,
    /// Halton points from index 1; deterministic, ignores the seed.
    Halton,
    /// Owen-scrambled Sobol' points.
    SobolOwen,
    /// Cranley-Patterson rotated Sobol' points.
    SobolCp,
}

impl Sampler {
    pub const ALL: [Sampler; 4] = [Sampler::Mc, Sampler::Halton, Sampler::SobolOwen, Sampler::SobolCp];

    pub fn name(self) -> &'static str {
        match self {
            Sampler::Mc => "mc",
            Sampler::Halton => "halton",
            Sampler::SobolOwen => "sobol_owen",
            Sampler::SobolCp => "sobol_cp",
        }
    }

    /// False only for the deterministic QMC sampler.
    pub fn is_randomized(self) -> bool {
        !matches!(self, Sampler::Halton)
    }

    /// `count` points in `[0,1)^dim`.
    pub fn points(self, count: usize, dim: usize, seed: u64) -> Result<PointSet> {
        match self {
            Sampler::Mc => uniform_points(count, dim, seed),
            Sampler::Halton => halton_points(count, dim, 1),
            Sampler::SobolOwen => {
                owen_scramble(&sobol_points_count(count, dim, 0)?, &ScrambleSpec::owen(seed))
            }
            Sampler::SobolCp => Ok(cp_rotate(&sobol_points_count(count, dim, 0)?, seed)),
        }
    }
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "mc" => Ok(Sampler::Mc),
            "halton" | "qmc" => Ok(Sampler::Halton),
            "sobol_owen" | "rqmc" => Ok(Sampler::SobolOwen),
            "sobol_cp" => Ok(Sampler::SobolCp),
            other => Err(Error::Config(format!("unknown sampler '{other}'"))),
        }
    }
}

impl std::fmt::Display for Sampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Realized frequencies and phases of `M` features for one kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBank {
    /// Row-major `M x d`.
    frequencies: Vec<f64>,
    /// Phases `b_i` in `[0,1)`.
    phases: Vec<f64>,
    kernel: KernelSpec,
    meta: PointMeta,
}

/// `phi_M(x)`: the `M` feature values, already scaled by `1/sqrt(M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureBank {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn meta(&self) -> &PointMeta {
        &self.meta
    }

    pub fn frequency(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.frequencies[i * d..(i + 1) * d]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Writes `phi_M(x)` into `out` (length `M`). No dimension checks.
    #[inline]
    pub fn features_into(&self, x: &[f64], out: &mut [f64]) {
        let scale = (2.0 / self.len() as f64).sqrt();
        let d = self.dim();
        for ((o, w), &b) in out.iter_mut().zip(self.frequencies.chunks_exact(d)).zip(&self.phases) {
            let arg: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + 2.0 * PI * b;
            *o = scale * arg.cos();
        }
    }

    /// `n x M` design matrix whose rows are `phi_M(x_i)` for the rows of `xs`.
    pub fn feature_matrix(&self, xs: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        if xs.len() % d != 0 {
            return Err(Error::DimensionMismatch { expected: d, got: xs.len() % d });
        }
        let n = xs.len() / d;
        let m = self.len();
        let mut row = vec![0.0; m];
        let mut phi = DMatrix::zeros(n, m);
        for (i, x) in xs.chunks_exact(d).enumerate() {
            self.features_into(x, &mut row);
            for (j, &v) in row.iter().enumerate() {
                phi[(i, j)] = v;
            }
        }
        Ok(phi)
    }
}

impl Kernel for FeatureBank {
    fn dim(&self) -> usize {
        self.kernel.dim
    }

    /// `K_M(x, y) = (1/M) sum_i psi(x, omega_i) psi(y, omega_i)`.
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for (w, &b) in self.frequencies.chunks_exact(d).zip(&self.phases) {
            let phase = 2.0 * PI * b;
            let ax: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + phase;
            let ay: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum::<f64>() + phase;
            acc += (SQRT_2 * ax.cos()) * (SQRT_2 * ay.cos());
        }
        acc / self.len() as f64
    }
}

#[inline]
fn spectral_quantile(family: KernelFamily, p: f64) -> f64 {
    let p = p.clamp(EPS_Q, 1.0 - EPS_Q);
    match family {
        KernelFamily::Gaussian => gaussian_quantile_unchecked(p),
        KernelFamily::Laplacian => quantile::cauchy_quantile(p),
        KernelFamily::Cauchy => quantile::laplace_quantile(p),
    }
}

/// Maps a point set in `[0,1)^{d+1}` to feature frequencies and phases.
pub fn build_features(ps: &PointSet, kernel: &KernelSpec) -> Result<FeatureBank> {
    let d = kernel.dim;
    if ps.dim() != d + 1 {
        return Err(Error::DimensionMismatch { expected: d + 1, got: ps.dim() });
    }
    let mut frequencies = Vec::with_capacity(ps.len() * d);
    let mut phases = Vec::with_capacity(ps.len());
    for row in ps.rows() {
        frequencies.extend(row[..d].iter().map(|&t| spectral_quantile(kernel.family, t) / kernel.sigma));
        phases.push(row[d]);
    }
    Ok(FeatureBank { frequencies, phases, kernel: *kernel, meta: *ps.meta() })
}

/// Draws `m` points with `sampler` and builds their features.
pub fn sample_features(sampler: Sampler, kernel: &KernelSpec, m: usize, seed: u64) -> Result<FeatureBank> {
    build_features(&sampler.points(m, kernel.dim + 1, seed)?, kernel)
}

/// Checked `phi_M(x)`.
pub fn feature_vector(bank: &FeatureBank, x: &[f64]) -> Result<FeatureVector> {
    if x.len() != bank.dim() {
        return Err(Error::DimensionMismatch { expected: bank.dim(), got: x.len() });
    }
    let mut values = vec![0.0; bank.len()];
    bank.features_into(x, &mut values);
    Ok(FeatureVector { values })
}

/// Checked `K_M(x, x') = phi_M(x) . phi_M(x')`.
pub fn approx_kernel(bank: &FeatureBank, x: &[f64], y: &[f64]) -> Result<f64> {
    crate::kernels::eval_kernel(bank, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmc::{sobol_points, uniform_points};

    fn gauss(sigma: f64, d: usize) -> KernelSpec {
        KernelSpec::gaussian(sigma, d).unwrap()
    }

    #[test]
    fn centered_point_gives_zero_frequency() {
        let ps = PointSet::from_rows(&[vec![0.5, 0.5, 0.25]]).unwrap();
        let bank = build_features(&ps, &gauss(1.0, 2)).unwrap();
        assert_eq!(bank.frequency(0), &[0.0, 0.0]);
        assert_eq!(bank.phases(), &[0.25]);
    }

    #[test]
    fn bandwidth_scales_frequencies() {
        let ps = uniform_points(64, 4, 2).unwrap();
        let b1 = build_features(&ps, &gauss(1.0, 3)).unwrap();
        let b2 = build_features(&ps, &gauss(2.0, 3)).unwrap();
        for i in 0..64 {
            for (a, b) in b1.frequency(i).iter().zip(b2.frequency(i)) {
                assert_eq!(*b, 0.5 * a);
            }
        }
    }

    #[test]
    fn boundary_points_stay_finite() {
        // The unscrambled Sobol' origin hits the clamp.
        let ps = sobol_points(4, 3, 0).unwrap();
        for family in [KernelFamily::Gaussian, KernelFamily::Laplacian, KernelFamily::Cauchy] {
            let k = KernelSpec::new(family, 1.0, 2).unwrap();
            let bank = build_features(&ps, &k).unwrap();
            assert!((0..bank.len()).all(|i| bank.frequency(i).iter().all(|w| w.is_finite())));
        }
    }

    #[test]
    fn frequency_covariance_matches_spectral_measure() {
        let sigma = 0.8;
        let n = 100_000;
        let bank = sample_features(Sampler::Mc, &gauss(sigma, 2), n, 17).unwrap();
        let target = 1.0 / (sigma * sigma);
        let mut cov = [[0.0; 2]; 2];
        for i in 0..n {
            let w = bank.frequency(i);
            for a in 0..2 {
                for b in 0..2 {
                    cov[a][b] += w[a] * w[b] / n as f64;
                }
            }
        }
        assert!((cov[0][0] / target - 1.0).abs() < 0.02, "{cov:?}");
        assert!((cov[1][1] / target - 1.0).abs() < 0.02, "{cov:?}");
        assert!(cov[0][1].abs() < 0.02 * target, "{cov:?}");
    }

    #[test]
    fn feature_vector_sign_cases() {
        let m = 8;
        let rows: Vec<Vec<f64>> = (0..m).map(|_| vec![0.5, 0.0]).collect();
        let bank = build_features(&PointSet::from_rows(&rows).unwrap(), &gauss(1.0, 1)).unwrap();
        let v = feature_vector(&bank, &[0.3]).unwrap();
        for x in v.values {
            assert!((x - (2.0 / m as f64).sqrt()).abs() < 1e-15);
        }
        let rows: Vec<Vec<f64>> = (0..m).map(|_| vec![0.5, 0.5]).collect();
        let bank = build_features(&PointSet::from_rows(&rows).unwrap(), &gauss(1.0, 1)).unwrap();
        let v = feature_vector(&bank, &[0.3]).unwrap();
        for x in v.values {
            assert!((x + (2.0 / m as f64).sqrt()).abs() < 1e-15);
        }
        assert!(feature_vector(&bank, &[0.3, 0.1]).is_err());
    }

    #[test]
    fn single_feature_product() {
        let ps = PointSet::from_rows(&[vec![0.8, 0.3]]).unwrap();
        let bank = build_features(&ps, &gauss(1.0, 1)).unwrap();
        let w = bank.frequency(0)[0];
        let b = 0.3;
        let (x, y) = (0.2, 0.9);
        let expect = 2.0 * (x * w + 2.0 * PI * b).cos() * (y * w + 2.0 * PI * b).cos();
        assert!((approx_kernel(&bank, &[x], &[y]).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn approx_kernel_symmetric_and_bounded() {
        let bank = sample_features(Sampler::SobolOwen, &gauss(0.5, 3), 128, 4).unwrap();
        let ps = uniform_points(1000, 3, 9).unwrap();
        for i in 0..999 {
            let (x, y) = (ps.row(i), ps.row(i + 1));
            assert_eq!(bank.eval(x, y), bank.eval(y, x));
            let kxx = approx_kernel(&bank, x, x).unwrap();
            let phi = feature_vector(&bank, x).unwrap();
            let norm: f64 = phi.values.iter().map(|v| v * v).sum();
            assert!((0.0..=2.0 + 1e-12).contains(&kxx));
            assert!((kxx - norm).abs() < 1e-12);
        }
    }

    #[test]
    fn mc_estimate_near_exact() {
        let k = gauss(1.0, 1);
        let bank = sample_features(Sampler::Mc, &k, 1 << 14, 23).unwrap();
        let approx = approx_kernel(&bank, &[0.2], &[0.7]).unwrap();
        let exact = k.eval(&[0.2], &[0.7]);
        assert!((approx - exact).abs() <= 5.0 / 128.0, "{approx} vs {exact}");
    }

    #[test]
    fn dimension_mismatch() {
        let ps = uniform_points(4, 3, 0).unwrap();
        assert!(matches!(
            build_features(&ps, &gauss(1.0, 3)),
            Err(Error::DimensionMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn sampler_names_round_trip() {
        for s in Sampler::ALL {
            assert_eq!(s.name().parse::<Sampler>().unwrap(), s);
        }
        assert_eq!("sobol-owen".parse::<Sampler>().unwrap(), Sampler::SobolOwen);
        assert!("faure".parse::<Sampler>().is_err());
    }
}
