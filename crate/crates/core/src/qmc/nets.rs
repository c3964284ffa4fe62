//! Balance checks for `(t, m, s)`-nets and `(lambda, t, m, s)`-nets.

use serde::{Deserialize, Serialize};

use super::PointSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetParams {
    pub base: u32,
    pub t: u32,
    pub m: u32,
    pub s: usize,
}

impl NetParams {
    pub fn base2(t: u32, m: u32, s: usize) -> Self {
        Self { base: 2, t, m, s }
    }

    fn validate(&self) -> Result<()> {
        if self.base < 2 || self.t > self.m || self.s == 0 {
            return Err(Error::Domain(format!("invalid net parameters {self:?}")));
        }
        Ok(())
    }
}

fn pow(base: u32, e: u32) -> Result<usize> {
    (base as usize)
        .checked_pow(e)
        .ok_or_else(|| Error::Domain(format!("{base}^{e} overflows")))
}

/// Calls `f` with every vector of `parts` nonnegative integers summing to `total`.
fn for_each_composition(total: u32, parts: usize, f: &mut impl FnMut(&[u32]) -> bool) -> bool {
    fn go(rest: u32, k: &mut Vec<u32>, parts: usize, f: &mut impl FnMut(&[u32]) -> bool) -> bool {
        if k.len() + 1 == parts {
            k.push(rest);
            let ok = f(k);
            k.pop();
            return ok;
        }
        for first in 0..=rest {
            k.push(first);
            let ok = go(rest - first, k, parts, f);
            k.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    go(total, &mut Vec::with_capacity(parts), parts, f)
}

/// Counts of points per elementary interval of shape `k`.
fn cell_counts(ps: &PointSet, base: u32, k: &[u32]) -> Vec<u32> {
    let radices: Vec<u64> = k.iter().map(|&kj| (base as u64).pow(kj)).collect();
    let cells: u64 = radices.iter().product();
    let mut counts = vec![0u32; cells as usize];
    for row in ps.rows() {
        let mut idx = 0u64;
        for (&x, &r) in row.iter().zip(&radices) {
            let c = ((x * r as f64) as u64).min(r - 1);
            idx = idx * r + c;
        }
        counts[idx as usize] += 1;
    }
    counts
}

fn check_shape(ps: &PointSet, params: &NetParams) -> Result<()> {
    if ps.dim() != params.s {
        return Err(Error::DimensionMismatch { expected: params.s, got: ps.dim() });
    }
    Ok(())
}

/// True iff every elementary interval of volume `b^(t-m)` holds exactly `b^t` points.
pub fn check_net_balance(ps: &PointSet, params: &NetParams) -> Result<bool> {
    params.validate()?;
    let expected = pow(params.base, params.m)?;
    if ps.len() != expected {
        return Err(Error::PointCountMismatch { expected, got: ps.len() });
    }
    check_shape(ps, params)?;
    let per_cell = pow(params.base, params.t)? as u32;
    Ok(for_each_composition(params.m - params.t, params.s, &mut |k| {
        cell_counts(ps, params.base, k).iter().all(|&c| c == per_cell)
    }))
}

/// True iff `ps` is a `(lambda, t, m, s)`-net: `lambda * b^t` points in every
/// elementary interval of volume `b^(t-m)` and at most `b^t` in every
/// interval of volume `b^(t-m-1)`.
pub fn check_lambda_net(ps: &PointSet, lambda: u32, params: &NetParams) -> Result<bool> {
    params.validate()?;
    if lambda == 0 || lambda >= params.base {
        return Err(Error::Domain(format!("lambda {lambda} outside [1, {})", params.base)));
    }
    let expected = lambda as usize * pow(params.base, params.m)?;
    if ps.len() != expected {
        return Err(Error::PointCountMismatch { expected, got: ps.len() });
    }
    check_shape(ps, params)?;
    let bt = pow(params.base, params.t)? as u32;
    let balanced = for_each_composition(params.m - params.t, params.s, &mut |k| {
        cell_counts(ps, params.base, k).iter().all(|&c| c == lambda * bt)
    });
    Ok(balanced
        && for_each_composition(params.m + 1 - params.t, params.s, &mut |k| {
            cell_counts(ps, params.base, k).iter().all(|&c| c <= bt)
        }))
}

/// Smallest `t` for which a `2^m`-point set is a `(t, m, s)`-net in base 2.
pub fn measure_t(ps: &PointSet) -> Result<u32> {
    let n = ps.len();
    if !n.is_power_of_two() {
        return Err(Error::PointCountMismatch { expected: n.next_power_of_two(), got: n });
    }
    let m = n.trailing_zeros();
    for t in 0..=m {
        if check_net_balance(ps, &NetParams::base2(t, m, ps.dim()))? {
            return Ok(t);
        }
    }
    unreachable!("every 2^m-point set is a (m, m, s)-net")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmc::{owen_scramble, sobol_points, ScrambleSpec};

    fn set1(v: &[f64]) -> PointSet {
        PointSet::from_rows(&v.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    /// Independent histogram: bucket every point with integer arithmetic.
    fn histogram_ok(ps: &PointSet, t: u32, m: u32) -> bool {
        let k_total = m - t;
        (0..=k_total).all(|k1| {
            let k2 = k_total - k1;
            let mut h = std::collections::HashMap::new();
            for r in ps.rows() {
                let c1 = (r[0] * 2f64.powi(k1 as i32)).floor() as i64;
                let c2 = (r[1] * 2f64.powi(k2 as i32)).floor() as i64;
                *h.entry((c1, c2)).or_insert(0usize) += 1;
            }
            h.len() == 1 << k_total && h.values().all(|&c| c == 1 << t)
        })
    }

    #[test]
    fn sobol_first_two_dims_form_zero_nets() {
        let ps = sobol_points(4, 2, 0).unwrap();
        assert!(check_net_balance(&ps, &NetParams::base2(0, 4, 2)).unwrap());
        assert!(histogram_ok(&ps, 0, 4));
    }

    #[test]
    fn unbalanced_pair() {
        let ps = set1(&[0.0, 0.1]);
        assert!(!check_net_balance(&ps, &NetParams::base2(0, 1, 1)).unwrap());
        assert!(!check_lambda_net(&ps, 1, &NetParams::base2(0, 1, 1)).unwrap());
        let ps = set1(&[0.0, 0.5]);
        assert!(check_lambda_net(&ps, 1, &NetParams::base2(0, 1, 1)).unwrap());
    }

    #[test]
    fn scrambled_sobol_stays_balanced() {
        let ps = sobol_points(4, 2, 0).unwrap();
        for seed in 0..50 {
            let s = owen_scramble(&ps, &ScrambleSpec::owen(seed)).unwrap();
            assert!(check_net_balance(&s, &NetParams::base2(0, 4, 2)).unwrap());
        }
    }

    #[test]
    fn lambda_one_nets_are_nets() {
        for m in 1..8 {
            let ps = sobol_points(m, 3, 0).unwrap();
            let t = measure_t(&ps).unwrap();
            assert!(check_lambda_net(&ps, 1, &NetParams::base2(t, m, 3)).unwrap());
        }
    }

    #[test]
    fn count_mismatch() {
        let ps = set1(&[0.0, 0.5, 0.25]);
        assert!(matches!(
            check_net_balance(&ps, &NetParams::base2(0, 1, 1)),
            Err(Error::PointCountMismatch { expected: 2, got: 3 })
        ));
        assert!(measure_t(&ps).is_err());
    }

    #[test]
    fn compositions_enumerated() {
        let mut seen = Vec::new();
        for_each_composition(3, 2, &mut |k| {
            seen.push(k.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
    }
}
