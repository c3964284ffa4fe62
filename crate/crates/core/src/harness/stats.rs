use crate::error::{Error, Result};

/// Least-squares slope of `log2(err)` against `log2(M)`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Domain(format!("slope fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(m, e)) = points.iter().find(|&&(m, e)| !(m > 0.0 && e > 0.0)) {
        return Err(Error::Domain(format!("slope fit needs positive values, got ({m}, {e})")));
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(m, e)| (m.log2(), e.log2())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("slope fit needs at least two distinct M".into()));
    }
    Ok(sxy / sxx)
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Linearly interpolated quantile of a sorted slice (the usual "type 7").
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    quantile_sorted(&s, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (4..=12).map(|k| 2f64.powi(k)).map(|m| (m, f(m))).collect()
    }

    #[test]
    fn exact_lines() {
        assert!((fit_loglog_slope(&grid(|m| 1.0 / m)).unwrap() + 1.0).abs() < 1e-12);
        assert!((fit_loglog_slope(&grid(|m| 3.0 / (m * m))).unwrap() + 2.0).abs() < 1e-12);
        assert!(fit_loglog_slope(&grid(|_| 0.2)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn slope_errors() {
        assert!(fit_loglog_slope(&[(16.0, 1.0), (32.0, 0.5)]).is_err());
        assert!(fit_loglog_slope(&[(16.0, 1.0), (32.0, 0.0), (64.0, 0.1)]).is_err());
        assert!(fit_loglog_slope(&[(16.0, 1.0), (16.0, 0.5), (16.0, 0.1)]).is_err());
    }

    #[test]
    fn quantiles() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&s, 0.25), 2.0);
        assert_eq!(quantile_sorted(&s, 0.5), 3.0);
        assert_eq!(quantile_sorted(&[1.0, 2.0], 0.25), 1.25);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(mean(&[1.0, 2.0, 6.0]), 3.0);
    }
}
