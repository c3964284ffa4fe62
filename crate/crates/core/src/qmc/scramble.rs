//! Owen nested uniform scrambling and Cranley-Patterson rotation.
//!
//! Both randomizations work on the 53-bit binary fixed-point expansion of
//! each coordinate, `u = floor(x * 2^53)`. That is exact for every digital
//! net point the Sobol' generator produces and truncates at most the bits
//! below `2^-53` for other inputs.

use serde::{Deserialize, Serialize};

use super::{PointMeta, PointSet};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, label, mix64};

const DIGITS: u32 = 53;
const SCALE: f64 = 1.0 / (1u64 << DIGITS) as f64;
const MASK: u64 = (1 << DIGITS) - 1;

/// Randomization applied to a point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrambleKind {
    None,
    OwenNested,
    CpRotation,
}

impl ScrambleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScrambleKind::None => "none",
            ScrambleKind::OwenNested => "owen_nested",
            ScrambleKind::CpRotation => "cp_rotation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScrambleSpec {
    pub kind: ScrambleKind,
    pub seed: u64,
    /// Number of leading binary digits randomized by the nested scramble.
    pub digit_depth: u32,
}

impl ScrambleSpec {
    pub fn none() -> Self {
        Self { kind: ScrambleKind::None, seed: 0, digit_depth: DIGITS }
    }

    pub fn owen(seed: u64) -> Self {
        Self { kind: ScrambleKind::OwenNested, seed, digit_depth: DIGITS }
    }

    pub fn cp(seed: u64) -> Self {
        Self { kind: ScrambleKind::CpRotation, seed, digit_depth: DIGITS }
    }
}

#[inline]
fn to_fixed(x: f64) -> u64 {
    // x in [0,1): x * 2^53 is exact, the cast floors.
    (x * (1u64 << DIGITS) as f64) as u64
}

/// Nested uniform scramble of every coordinate.
///
/// Digit `k` of coordinate `j` is XOR-ed with one pseudo-random bit chosen by
/// hashing `(seed, j, k, first k-1 input digits)`. A random permutation of
/// `{0, 1}` is either the identity or the swap, so this realizes an exact
/// base-2 nested uniform scramble without storing the permutation tree.
/// Digits beyond `digit_depth` are set to zero, so outputs are multiples of
/// `2^-digit_depth`.
///
/// `ScrambleKind::None` returns the input unchanged.
pub fn owen_scramble(ps: &PointSet, spec: &ScrambleSpec) -> Result<PointSet> {
    match spec.kind {
        ScrambleKind::None => return Ok(ps.clone()),
        ScrambleKind::OwenNested => {}
        other => {
            return Err(Error::WrongScrambleKind { expected: "owen_nested", got: other.name() })
        }
    }
    let depth = spec.digit_depth;
    if !(1..=DIGITS).contains(&depth) {
        return Err(Error::DigitDepth(depth));
    }
    let dim_keys: Vec<u64> = (0..ps.dim())
        .map(|j| derive_seed(spec.seed, &[label("owen"), j as u64]))
        .collect();
    let mut data = Vec::with_capacity(ps.as_slice().len());
    for row in ps.rows() {
        data.extend(row.iter().zip(&dim_keys).map(|(&x, &key)| {
            scramble_digits(to_fixed(x), key, depth) as f64 * SCALE
        }));
    }
    let meta = PointMeta { scramble: ScrambleKind::OwenNested, seed: spec.seed, ..*ps.meta() };
    Ok(ps.with_data(data, meta))
}

#[inline]
fn scramble_digits(u: u64, dim_key: u64, depth: u32) -> u64 {
    let mut out = 0u64;
    for k in 1..=depth {
        let shift = DIGITS - k;
        let digit = (u >> shift) & 1;
        // Prefix of k-1 digits tagged with a sentinel bit so that prefixes of
        // different lengths never collide.
        let prefix = (u >> (shift + 1)) | (1u64 << (k - 1));
        let flip = mix64(dim_key ^ mix64(prefix)) >> 63;
        out |= (digit ^ flip) << shift;
    }
    out
}

/// Per-dimension shifts used by [`cp_rotate`] for `seed`.
pub fn cp_shifts(dim: usize, seed: u64) -> Vec<f64> {
    (0..dim)
        .map(|j| (derive_seed(seed, &[label("cp"), j as u64]) >> (64 - DIGITS)) as f64 * SCALE)
        .collect()
}

/// Cranley-Patterson rotation `x -> frac(x + U_j)` with shifts drawn from `seed`.
pub fn cp_rotate(ps: &PointSet, seed: u64) -> PointSet {
    let shifts = cp_shifts(ps.dim(), seed);
    let mut out = rotate_by(ps, &shifts);
    out.meta.seed = seed;
    out
}

/// Rotation by explicit shifts in `[0,1)`. The addition is carried out modulo
/// 1 in 53-bit fixed point, so within-column differences are preserved exactly
/// for inputs that are multiples of `2^-53`.
pub fn rotate_by(ps: &PointSet, shifts: &[f64]) -> PointSet {
    assert_eq!(shifts.len(), ps.dim(), "one shift per dimension");
    let fixed: Vec<u64> = shifts.iter().map(|&u| to_fixed(u.rem_euclid(1.0))).collect();
    let mut data = Vec::with_capacity(ps.as_slice().len());
    for row in ps.rows() {
        data.extend(
            row.iter()
                .zip(&fixed)
                .map(|(&x, &s)| (to_fixed(x).wrapping_add(s) & MASK) as f64 * SCALE),
        );
    }
    let meta = PointMeta { scramble: ScrambleKind::CpRotation, ..*ps.meta() };
    ps.with_data(data, meta)
}

/// Applies whichever randomization `spec` names.
pub fn apply_scramble(ps: &PointSet, spec: &ScrambleSpec) -> Result<PointSet> {
    match spec.kind {
        ScrambleKind::None => Ok(ps.clone()),
        ScrambleKind::OwenNested => owen_scramble(ps, spec),
        ScrambleKind::CpRotation => Ok(cp_rotate(ps, spec.seed)),
    }
}
