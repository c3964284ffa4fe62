use std::sync::OnceLock;

use super::joe_kuo::JOE_KUO;
use super::{GeneratorKind, PointMeta, PointSet, ScrambleKind};
use crate::error::{Error, Result};

pub use super::joe_kuo::MAX_SOBOL_DIM;

/// Largest supported `m` in `sobol_points(m, ..)`.
pub const MAX_SOBOL_LOG2: u32 = 31;

const BITS: usize = 32;
const INDEX_LIMIT: u64 = 1 << 31;

static DIRECTIONS: OnceLock<Vec<[u32; BITS]>> = OnceLock::new();

fn directions() -> &'static [[u32; BITS]] {
    DIRECTIONS.get_or_init(|| JOE_KUO.iter().map(|&(s, a, m)| direction_numbers(s, a, m)).collect())
}

/// Generator-matrix columns `v_1..v_32` for one dimension, scaled so that
/// `v_k` carries its leading bit at position `32 - k`.
fn direction_numbers(degree: u32, coeffs: u32, initial: &[u32]) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if degree == 0 {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = 1 << (BITS - 1 - k);
        }
        return v;
    }
    let s = degree as usize;
    for k in 0..s.min(BITS) {
        v[k] = initial[k] << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut val = v[k - s] ^ (v[k - s] >> s);
        for i in 1..s {
            if (coeffs >> (s - 1 - i)) & 1 == 1 {
                val ^= v[k - i];
            }
        }
        v[k] = val;
    }
    v
}

/// Raw 32-bit Sobol' coordinate of point `index` in dimension `dim`
/// (natural order: XOR of the columns selected by the bits of `index`).
#[inline]
fn sobol_u32(dirs: &[u32; BITS], index: u64) -> u32 {
    let mut x = 0u32;
    let mut i = index;
    let mut k = 0;
    while i != 0 {
        if i & 1 == 1 {
            x ^= dirs[k];
        }
        i >>= 1;
        k += 1;
    }
    x
}

/// The `2^m` consecutive Sobol' points starting at `index_offset`.
///
/// With `index_offset = 0` (or any multiple of `2^m`) the block is a
/// `(t, m, s)`-net in base 2. Index 0 is the origin.
pub fn sobol_points(m: u32, dim: usize, index_offset: u64) -> Result<PointSet> {
    if m > MAX_SOBOL_LOG2 {
        return Err(Error::IndexOverflow { offset: index_offset, count: 1u64 << m.min(63) });
    }
    sobol_points_count(1usize << m, dim, index_offset)
}

/// The first `count` Sobol' points starting at `index_offset`, for counts
/// that are not powers of two.
pub fn sobol_points_count(count: usize, dim: usize, index_offset: u64) -> Result<PointSet> {
    if dim == 0 || count == 0 {
        return Err(Error::InvalidPointSet("count and dimension must be positive".into()));
    }
    if dim > MAX_SOBOL_DIM {
        return Err(Error::DimensionExceedsTable {
            generator: "Sobol'",
            requested: dim,
            limit: MAX_SOBOL_DIM,
        });
    }
    let end = index_offset.checked_add(count as u64);
    if end.map_or(true, |e| e > INDEX_LIMIT) {
        return Err(Error::IndexOverflow { offset: index_offset, count: count as u64 });
    }
    let dirs = &directions()[..dim];
    let scale = 1.0 / (1u64 << BITS) as f64;
    let mut data = Vec::with_capacity(count * dim);
    for n in 0..count as u64 {
        let index = index_offset + n;
        data.extend(dirs.iter().map(|d| sobol_u32(d, index) as f64 * scale));
    }
    let meta = PointMeta {
        generator: GeneratorKind::Sobol,
        scramble: ScrambleKind::None,
        seed: 0,
        index_offset,
    };
    Ok(PointSet::from_parts(data, dim, meta))
}
