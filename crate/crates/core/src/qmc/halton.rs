use super::{GeneratorKind, PointMeta, PointSet, ScrambleKind};
use crate::error::{Error, Result};

/// The first 64 primes; dimension `j` of the Halton sequence uses `PRIMES[j]`.
pub const PRIMES: [u64; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
    307, 311,
];

pub const MAX_HALTON_DIM: usize = PRIMES.len();

/// Van der Corput radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    // Rounding can only reach 1.0 for absurd indices; keep the range closed-open.
    if acc >= 1.0 {
        1.0 - f64::EPSILON / 2.0
    } else {
        acc
    }
}

/// Points `index_offset .. index_offset + count` of the Halton sequence.
///
/// The QMC feature pipeline uses `index_offset = 1` so the all-zero point
/// never reaches an inverse CDF.
pub fn halton_points(count: usize, dim: usize, index_offset: u64) -> Result<PointSet> {
    if count == 0 || dim == 0 {
        return Err(Error::InvalidPointSet("count and dimension must be positive".into()));
    }
    if dim > MAX_HALTON_DIM {
        return Err(Error::DimensionExceedsTable {
            generator: "Halton",
            requested: dim,
            limit: MAX_HALTON_DIM,
        });
    }
    index_offset
        .checked_add(count as u64)
        .ok_or(Error::IndexOverflow { offset: index_offset, count: count as u64 })?;
    let mut data = Vec::with_capacity(count * dim);
    for n in 0..count as u64 {
        let index = index_offset + n;
        data.extend(PRIMES[..dim].iter().map(|&p| radical_inverse(index, p)));
    }
    let meta = PointMeta {
        generator: GeneratorKind::Halton,
        scramble: ScrambleKind::None,
        seed: 0,
        index_offset,
    };
    Ok(PointSet::from_parts(data, dim, meta))
}
