//! Star discrepancy `D*_M = sup_t | #{x_n in [0,t]} / M - prod_j t_j |`.
//!
//! The exact routine enumerates the critical grid: in each dimension the
//! candidate corners are the distinct point coordinates plus 1. At a grid
//! corner `t` the supremum of `A/M - vol` is attained with the closed count
//! `#{x <= t}`, and the supremum of `vol - A/M` is approached from below with
//! the open count `#{x < t}`. The first `s - 1` coordinates of the corner are
//! enumerated; the last is swept over a sorted list, giving `O(M^s log M)`.

use rand::Rng;
use serde::Serialize;

use super::PointSet;
use crate::error::{Error, Result};

/// Guard on `M^s * s` for the exact enumeration.
pub const EXACT_WORK_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub value: f64,
    /// True for the exhaustive critical-box computation, false for a lower bound.
    pub exact: bool,
    pub boxes_examined: u64,
}

/// Larger of the two one-sided local discrepancies at corner `t`.
#[inline]
fn local(closed: usize, open: usize, n: f64, vol: f64) -> f64 {
    (closed as f64 / n - vol).max(vol - open as f64 / n)
}

/// Exact star discrepancy by critical-grid enumeration.
pub fn star_discrepancy_exact(ps: &PointSet) -> Result<DiscrepancyReport> {
    let n = ps.len();
    let s = ps.dim();
    let work = (n as f64).powi(s as i32) * s as f64;
    if work > EXACT_WORK_LIMIT {
        return Err(Error::InstanceTooLarge { work, limit: EXACT_WORK_LIMIT });
    }
    let grids: Vec<Vec<f64>> = (0..s)
        .map(|j| {
            let mut g = ps.column(j);
            g.push(1.0);
            g.sort_by(f64::total_cmp);
            g.dedup();
            g
        })
        .collect();

    let mut state = Enumeration {
        ps,
        grids: &grids,
        n: n as f64,
        best: 0.0,
        boxes: 0,
        corner: vec![0.0; s],
    };
    let all: Vec<usize> = (0..n).collect();
    state.recurse(0, &all, &all, 1.0);
    Ok(DiscrepancyReport { value: state.best, exact: true, boxes_examined: state.boxes })
}

struct Enumeration<'a> {
    ps: &'a PointSet,
    grids: &'a [Vec<f64>],
    n: f64,
    best: f64,
    boxes: u64,
    corner: Vec<f64>,
}

impl Enumeration<'_> {
    /// `closed` / `open` hold the points that satisfy the corner constraints
    /// in dimensions `< j` with `<=` / `<` respectively.
    fn recurse(&mut self, j: usize, closed: &[usize], open: &[usize], vol: f64) {
        let last = self.grids.len() - 1;
        if j == last {
            self.sweep_last(closed, open, vol);
            return;
        }
        for gi in 0..self.grids[j].len() {
            let t = self.grids[j][gi];
            self.corner[j] = t;
            let c: Vec<usize> =
                closed.iter().copied().filter(|&i| self.ps.get(i, j) <= t).collect();
            let o: Vec<usize> = open.iter().copied().filter(|&i| self.ps.get(i, j) < t).collect();
            self.recurse(j + 1, &c, &o, vol * t);
        }
    }

    fn sweep_last(&mut self, closed: &[usize], open: &[usize], vol: f64) {
        let j = self.grids.len() - 1;
        let mut cvals: Vec<f64> = closed.iter().map(|&i| self.ps.get(i, j)).collect();
        let mut ovals: Vec<f64> = open.iter().map(|&i| self.ps.get(i, j)).collect();
        cvals.sort_by(f64::total_cmp);
        ovals.sort_by(f64::total_cmp);
        let (mut ci, mut oi) = (0, 0);
        for &t in &self.grids[j] {
            while ci < cvals.len() && cvals[ci] <= t {
                ci += 1;
            }
            while oi < ovals.len() && ovals[oi] < t {
                oi += 1;
            }
            let d = local(ci, oi, self.n, vol * t);
            if d > self.best {
                self.best = d;
            }
            self.boxes += 1;
        }
    }
}

/// Maximum local discrepancy over explicitly given corners. Each corner is
/// evaluated with both closed and open counts; the result never exceeds the
/// exact star discrepancy.
pub fn local_discrepancy_max(ps: &PointSet, corners: &[Vec<f64>]) -> Result<f64> {
    let n = ps.len() as f64;
    let mut best = 0.0f64;
    for t in corners {
        if t.len() != ps.dim() {
            return Err(Error::DimensionMismatch { expected: ps.dim(), got: t.len() });
        }
        if t.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain(format!("corner {t:?} outside [0,1]^s")));
        }
        best = best.max(corner_value(ps, t, n));
    }
    Ok(best)
}

fn corner_value(ps: &PointSet, t: &[f64], n: f64) -> f64 {
    let vol: f64 = t.iter().product();
    let mut closed = 0;
    let mut open = 0;
    for row in ps.rows() {
        if row.iter().zip(t).all(|(x, t)| x <= t) {
            closed += 1;
            if row.iter().zip(t).all(|(x, t)| x < t) {
                open += 1;
            }
        }
    }
    local(closed, open, n, vol)
}

/// Lower bound on the star discrepancy from `n_probes` pseudo-random corners
/// plus every corner anchored at a data point.
pub fn star_discrepancy_lower_bound(
    ps: &PointSet,
    n_probes: usize,
    seed: u64,
) -> Result<DiscrepancyReport> {
    if n_probes == 0 {
        return Err(Error::Domain("n_probes must be at least 1".into()));
    }
    let n = ps.len() as f64;
    let mut rng = crate::seed::rng_from_seed(seed);
    let mut best = 0.0f64;
    let mut corner = vec![0.0; ps.dim()];
    for _ in 0..n_probes {
        corner.iter_mut().for_each(|c| *c = rng.gen::<f64>());
        best = best.max(corner_value(ps, &corner, n));
    }
    for row in ps.rows() {
        best = best.max(corner_value(ps, row, n));
    }
    Ok(DiscrepancyReport {
        value: best,
        exact: false,
        boxes_examined: (n_probes + ps.len()) as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmc::sobol_points;

    fn set(rows: &[&[f64]]) -> PointSet {
        PointSet::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn single_centered_point() {
        let r = star_discrepancy_exact(&set(&[&[0.5]])).unwrap();
        assert_eq!(r.value, 0.5);
        assert!(r.exact);
    }

    #[test]
    fn centered_regular_grid() {
        let rows: Vec<Vec<f64>> = (0..4).map(|i| vec![(2 * i + 1) as f64 / 8.0]).collect();
        let r = star_discrepancy_exact(&PointSet::from_rows(&rows).unwrap()).unwrap();
        assert!((r.value - 0.125).abs() < 1e-15);
    }

    #[test]
    fn origin_point_in_two_dimensions() {
        // The degenerate box [0,0]x[0,0] holds the whole (one-point) set.
        let r = star_discrepancy_exact(&set(&[&[0.0, 0.0]])).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn explicit_probes() {
        let ps = set(&[&[0.5]]);
        let v = local_discrepancy_max(&ps, &[vec![0.5], vec![1.0]]).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn guard_rejects_large_instances() {
        let ps = sobol_points(14, 2, 0).unwrap();
        assert!(matches!(star_discrepancy_exact(&ps), Err(Error::InstanceTooLarge { .. })));
        let lb = star_discrepancy_lower_bound(&ps, 10, 1).unwrap();
        assert!(!lb.exact);
    }

    #[test]
    fn lower_bound_with_zero_probes_is_an_error() {
        assert!(star_discrepancy_lower_bound(&set(&[&[0.5]]), 0, 1).is_err());
    }

    #[test]
    fn sobol_decays_in_two_dimensions() {
        let mut prev = f64::INFINITY;
        for m in 2..=8 {
            let d = star_discrepancy_exact(&sobol_points(m, 2, 0).unwrap()).unwrap().value;
            assert!(d <= prev, "m={m}: {d} > {prev}");
            prev = d;
        }
    }
}
