//! Low-discrepancy point sets and their randomizations.
//!
//! A [`PointSet`] is an immutable `M x s` matrix of points in `[0,1)^s`
//! together with the metadata needed to regenerate it bit-for-bit.
//! Generators ([`sobol_points`], [`halton_points`], [`uniform_points`]) build
//! them; [`owen_scramble`] and [`cp_rotate`] randomize them; the
//! [`discrepancy`] and [`nets`] submodules measure them.

mod halton;
mod joe_kuo;
mod scramble;
mod sobol;

pub mod discrepancy;
pub mod nets;

pub use discrepancy::{
    local_discrepancy_max, star_discrepancy_exact, star_discrepancy_lower_bound,
    DiscrepancyReport, EXACT_WORK_LIMIT,
};
pub use halton::{halton_points, radical_inverse, MAX_HALTON_DIM, PRIMES};
pub use nets::{check_lambda_net, check_net_balance, measure_t, NetParams};
pub use scramble::{apply_scramble, cp_rotate, cp_shifts, owen_scramble, ScrambleKind, ScrambleSpec};
pub use sobol::{sobol_points, sobol_points_count, MAX_SOBOL_DIM, MAX_SOBOL_LOG2};

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Which construction produced a point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Sobol,
    Halton,
    /// i.i.d. uniform points from the seeded generator.
    Uniform,
    /// Points supplied by the caller.
    External,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Sobol => "sobol",
            GeneratorKind::Halton => "halton",
            GeneratorKind::Uniform => "uniform",
            GeneratorKind::External => "external",
        }
    }
}

/// Provenance of a [`PointSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMeta {
    pub generator: GeneratorKind,
    pub scramble: ScrambleKind,
    pub seed: u64,
    pub index_offset: u64,
}

impl PointMeta {
    /// Metadata for points supplied by the caller.
    pub fn external() -> Self {
        Self { generator: GeneratorKind::External, scramble: ScrambleKind::None, seed: 0, index_offset: 0 }
    }
}

/// `M` points in `[0,1)^s`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    n_points: usize,
    dim: usize,
    meta: PointMeta,
}

impl PointSet {
    /// Wraps row-major data, validating shape and range.
    pub fn new(data: Vec<f64>, dim: usize, meta: PointMeta) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPointSet("dimension must be at least 1".into()));
        }
        if data.is_empty() || data.len() % dim != 0 {
            return Err(Error::InvalidPointSet(format!(
                "{} values do not form a non-empty matrix with {dim} columns",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(Error::InvalidPointSet(format!("coordinate {bad} outside [0,1)")));
        }
        let n_points = data.len() / dim;
        Ok(Self { data, n_points, dim, meta })
    }

    /// Caller-supplied points with [`GeneratorKind::External`] metadata.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidPointSet("ragged rows".into()));
        }
        let meta = PointMeta {
            generator: GeneratorKind::External,
            scramble: ScrambleKind::None,
            seed: 0,
            index_offset: 0,
        };
        Self::new(rows.concat(), dim, meta)
    }

    // Internal constructor for generators that guarantee the invariants.
    pub(crate) fn from_parts(data: Vec<f64>, dim: usize, meta: PointMeta) -> Self {
        debug_assert!(dim > 0 && !data.is_empty() && data.len() % dim == 0);
        debug_assert!(data.iter().all(|v| (0.0..1.0).contains(v)));
        let n_points = data.len() / dim;
        Self { data, n_points, dim, meta }
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn meta(&self) -> &PointMeta {
        &self.meta
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub(crate) fn with_data(&self, data: Vec<f64>, meta: PointMeta) -> Self {
        Self::from_parts(data, self.dim, meta)
    }
}

/// `count` i.i.d. uniform points in `[0,1)^dim`, a pure function of `seed`.
pub fn uniform_points(count: usize, dim: usize, seed: u64) -> Result<PointSet> {
    if count == 0 || dim == 0 {
        return Err(Error::InvalidPointSet("count and dimension must be positive".into()));
    }
    let mut rng = crate::seed::rng_from_seed(seed);
    let data: Vec<f64> = (0..count * dim).map(|_| rng.gen::<f64>()).collect();
    let meta = PointMeta {
        generator: GeneratorKind::Uniform,
        scramble: ScrambleKind::None,
        seed,
        index_offset: 0,
    };
    Ok(PointSet::from_parts(data, dim, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(PointSet::from_rows(&[vec![0.2, 1.0]]).is_err());
        assert!(PointSet::from_rows(&[vec![-0.0, 0.5]]).is_ok());
        assert!(PointSet::from_rows(&[vec![0.1], vec![0.2, 0.3]]).is_err());
        assert!(PointSet::from_rows(&[]).is_err());
    }

    #[test]
    fn uniform_points_reproducible() {
        let a = uniform_points(50, 3, 9).unwrap();
        let b = uniform_points(50, 3, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, uniform_points(50, 3, 10).unwrap());
    }
}
