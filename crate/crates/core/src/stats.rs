//! Correlation and error statistics shared by feature extraction and
//! evaluation.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Mean and sample (n-1) standard deviation. The deviation is 0 for fewer
/// than two values.
pub fn mean_std(x: &[f64]) -> (f64, f64) {
    let m = mean(x);
    if x.len() < 2 {
        return (m, 0.0);
    }
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    (m, libm::sqrt(ss / (x.len() - 1) as f64))
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "paired samples of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::EmptyInput("at least two paired samples are required"));
    }
    Ok(())
}

/// Pearson correlation without input validation; returns `None` when
/// either side has zero variance.
pub(crate) fn pearson_raw(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Pearson linear correlation coefficient.
pub fn pcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson_raw(x, y).ok_or(Error::DegenerateVariance("constant input to Pearson correlation"))
}

/// 1-based fractional ranks; tied values share the average of their ranks.
pub fn fractional_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of fractional ranks.
pub fn scc(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson_raw(&fractional_ranks(x), &fractional_ranks(y))
        .ok_or(Error::DegenerateVariance("constant input to Spearman correlation"))
}

/// Root mean squared difference.
pub fn rmse(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(libm::sqrt(ss / x.len() as f64))
}

/// Central moments of order 2, 3 and 4 (population normalization).
pub(crate) fn central_moments(x: &[f64]) -> (f64, f64, f64) {
    let m = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let n = x.len() as f64;
    (m2 / n, m3 / n, m4 / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_and_reversed() {
        let x = [1.0, 2.0, 3.5, 7.0, 11.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pcc(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert!((scc(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert!((pcc(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert!((scc(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn ties_get_average_rank() {
        assert_eq!(fractional_ranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(fractional_ranks(&[3.0, 3.0, 3.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn degenerate_and_short_inputs() {
        assert!(matches!(pcc(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::DegenerateVariance(_))));
        assert!(matches!(scc(&[1.0, 2.0], &[5.0, 5.0]), Err(Error::DegenerateVariance(_))));
        assert!(pcc(&[1.0], &[1.0]).is_err());
        assert!(rmse(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn rmse_basics() {
        assert_eq!(rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - libm::sqrt(12.5)).abs() < 1e-12);
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        assert!((s - libm::sqrt(32.0 / 7.0)).abs() < 1e-12);
    }
}
