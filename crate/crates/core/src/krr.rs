//! Kernel ridge regression, exact and on random features.
//!
//! Exact mode solves `(K + n lambda I) alpha = y` and predicts
//! `f(x) = sum_i alpha_i K(x_i, x)`. Feature mode builds the `n x M` design
//! `Phi` with rows `phi_M(x_i)` and solves the primal system
//! `(Phi^T Phi + n lambda I) w = Phi^T y`, predicting `f(x) = phi_M(x) . w`.
//! The two agree when exact mode is run with the approximate kernel `K_M`.
//!
//! Both systems are dense symmetric positive definite and are solved by
//! Cholesky factorization. After every solve the relative residual
//! `|A c - rhs| / |rhs|` is checked against [`RESIDUAL_TOLERANCE`], with up to
//! [`REFINEMENT_STEPS`] rounds of iterative refinement before giving up.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::features::FeatureBank;
use crate::kernels::{gram_matrix, Kernel, KernelSpec};

pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
pub const REFINEMENT_STEPS: usize = 3;

/// Default coefficient `c` in `lambda = c n^{-1/(2r+1)}`.
pub const DEFAULT_LAMBDA_COEFF: f64 = 0.25;

/// `n` observations `(x_i, y_i)` with optional noiseless targets `f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDataset {
    x: Vec<f64>,
    dim: usize,
    y: Vec<f64>,
    truth: Option<Vec<f64>>,
}

impl RegressionDataset {
    /// `x` is row-major `n x dim`.
    pub fn new(x: Vec<f64>, dim: usize, y: Vec<f64>) -> Result<Self> {
        if dim == 0 || x.len() != y.len() * dim || y.is_empty() {
            return Err(Error::DimensionMismatch { expected: y.len() * dim.max(1), got: x.len() });
        }
        Ok(Self { x, dim, y, truth: None })
    }

    pub fn with_truth(mut self, truth: Vec<f64>) -> Result<Self> {
        if truth.len() != self.y.len() {
            return Err(Error::DimensionMismatch { expected: self.y.len(), got: truth.len() });
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn truth(&self) -> Option<&[f64]> {
        self.truth.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrrMode {
    Exact,
    Features,
}

#[derive(Clone)]
enum Predictor {
    Exact { x: Vec<f64>, kernel: Arc<dyn Kernel> },
    Features { bank: FeatureBank },
}

/// A fitted ridge regressor. Immutable after fitting.
#[derive(Clone)]
pub struct KrrModel {
    lambda: f64,
    coef: Vec<f64>,
    residual: f64,
    predictor: Predictor,
}

impl std::fmt::Debug for KrrModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KrrModel")
            .field("mode", &self.mode())
            .field("lambda", &self.lambda)
            .field("n_coef", &self.coef.len())
            .field("residual", &self.residual)
            .finish()
    }
}

impl KrrModel {
    pub fn mode(&self) -> KrrMode {
        match self.predictor {
            Predictor::Exact { .. } => KrrMode::Exact,
            Predictor::Features { .. } => KrrMode::Features,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Dual `alpha` (exact mode) or primal `w` (feature mode).
    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    /// Relative residual of the final solve.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn dim(&self) -> usize {
        match &self.predictor {
            Predictor::Exact { kernel, .. } => kernel.dim(),
            Predictor::Features { bank } => bank.dim(),
        }
    }

    /// Prediction at a single point. No dimension check.
    pub fn predict_one(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        match &self.predictor {
            Predictor::Exact { x: train, kernel } => {
                let d = kernel.dim();
                train
                    .chunks_exact(d)
                    .zip(&self.coef)
                    .map(|(xi, a)| a * kernel.eval(xi, x))
                    .sum()
            }
            Predictor::Features { bank } => {
                scratch.resize(bank.len(), 0.0);
                bank.features_into(x, scratch);
                scratch.iter().zip(&self.coef).map(|(p, w)| p * w).sum()
            }
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// Solves the SPD system `a c = rhs`, refining until the relative residual
/// meets [`RESIDUAL_TOLERANCE`].
fn spd_solve(a: DMatrix<f64>, rhs: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let chol = a.clone().cholesky().ok_or(Error::Factorization)?;
    let mut c = chol.solve(rhs);
    let rhs_norm = rhs.norm();
    let rel = |r: &DVector<f64>| if rhs_norm > 0.0 { r.norm() / rhs_norm } else { r.norm() };
    let mut r = rhs - &a * &c;
    let mut res = rel(&r);
    let mut steps = 0;
    while res > RESIDUAL_TOLERANCE && steps < REFINEMENT_STEPS {
        c += chol.solve(&r);
        r = rhs - &a * &c;
        res = rel(&r);
        steps += 1;
    }
    if !(res <= RESIDUAL_TOLERANCE) {
        return Err(Error::Residual { residual: res, tolerance: RESIDUAL_TOLERANCE });
    }
    Ok((c, res))
}

/// Exact KRR with any kernel (including a feature bank's `K_M`).
pub fn fit_exact_with(data: &RegressionDataset, kernel: Arc<dyn Kernel>, lambda: f64) -> Result<KrrModel> {
    check_lambda(lambda)?;
    if kernel.dim() != data.dim() {
        return Err(Error::DimensionMismatch { expected: kernel.dim(), got: data.dim() });
    }
    let n = data.len();
    let mut a = gram_matrix(kernel.as_ref(), data.x())?;
    for i in 0..n {
        a[(i, i)] += n as f64 * lambda;
    }
    let (alpha, residual) = spd_solve(a, &DVector::from_column_slice(data.y()))?;
    Ok(KrrModel {
        lambda,
        coef: alpha.as_slice().to_vec(),
        residual,
        predictor: Predictor::Exact { x: data.x().to_vec(), kernel },
    })
}

/// Exact KRR with the closed-form kernel `spec`.
pub fn fit_exact(data: &RegressionDataset, spec: &KernelSpec, lambda: f64) -> Result<KrrModel> {
    fit_exact_with(data, Arc::new(*spec), lambda)
}

/// Ridge regression on the random features of `bank`.
pub fn fit_features(data: &RegressionDataset, bank: &FeatureBank, lambda: f64) -> Result<KrrModel> {
    check_lambda(lambda)?;
    if bank.dim() != data.dim() {
        return Err(Error::DimensionMismatch { expected: bank.dim(), got: data.dim() });
    }
    let n = data.len();
    let phi = bank.feature_matrix(data.x())?;
    let mut a = phi.tr_mul(&phi);
    for i in 0..bank.len() {
        a[(i, i)] += n as f64 * lambda;
    }
    let rhs = phi.tr_mul(&DVector::from_column_slice(data.y()));
    let (w, residual) = spd_solve(a, &rhs)?;
    Ok(KrrModel {
        lambda,
        coef: w.as_slice().to_vec(),
        residual,
        predictor: Predictor::Features { bank: bank.clone() },
    })
}

/// Predictions at the rows of `x_test` (row-major).
pub fn predict(model: &KrrModel, x_test: &[f64]) -> Result<Vec<f64>> {
    let d = model.dim();
    if x_test.len() % d != 0 {
        return Err(Error::DimensionMismatch { expected: d, got: x_test.len() % d });
    }
    let mut scratch = Vec::new();
    Ok(x_test.chunks_exact(d).map(|x| model.predict_one(x, &mut scratch)).collect())
}

/// Mean squared difference of two equal-length vectors.
pub fn mse(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(Error::DimensionMismatch { expected: target.len(), got: pred.len() });
    }
    Ok(pred.iter().zip(target).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / pred.len() as f64)
}

/// Test MSE of `model` against `target` (typically the noiseless `f(x_test)`).
pub fn test_mse(model: &KrrModel, x_test: &[f64], target: &[f64]) -> Result<f64> {
    mse(&predict(model, x_test)?, target)
}

/// `lambda = c n^{-1/(2r+1)}`.
pub fn lambda_schedule(n: usize, r: f64, c: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&r) {
        return Err(Error::Domain(format!("smoothness r = {r} outside [0.5, 1]")));
    }
    if n == 0 || !(c > 0.0) {
        return Err(Error::Domain(format!("need n >= 1 and c > 0 (n={n}, c={c})")));
    }
    Ok(c * (n as f64).powf(-1.0 / (2.0 * r + 1.0)))
}

/// `M = ceil(log^a(1/lambda) / lambda)` at the scheduled `lambda`.
pub fn feature_budget(n: usize, r: f64, a: f64, c: f64) -> Result<usize> {
    let lambda = lambda_schedule(n, r, c)?;
    if lambda >= 1.0 {
        return Err(Error::Domain(format!("lambda = {lambda} >= 1 makes log(1/lambda) nonpositive")));
    }
    let m = (1.0 / lambda).ln().powf(a) / lambda;
    Ok(m.ceil() as usize)
}
