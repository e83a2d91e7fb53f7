use statrs::function::beta::beta_reg;

use super::{check_sizes, TestResult};
use crate::{Error, Result};

/// Unbiased sample variance (two-pass).
pub fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

/// CDF of the F distribution with `(d1, d2)` degrees of freedom.
pub fn f_cdf(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 0.0;
    }
    if f.is_infinite() {
        return 1.0;
    }
    let x = d1 * f / (d1 * f + d2);
    beta_reg(d1 / 2.0, d2 / 2.0, x)
}

/// F-test for equality of variances, two-sided.
///
/// Fails with [`Error::Degenerate`] when either sample has zero variance.
pub fn f_variance_test(s1: &[f64], s2: &[f64]) -> Result<TestResult> {
    check_sizes(s1, s2)?;
    let (v1, v2) = (sample_variance(s1), sample_variance(s2));
    if v1 == 0.0 || v2 == 0.0 {
        return Err(Error::Degenerate("zero sample variance".into()));
    }
    let f = v1 / v2;
    let cdf = f_cdf(f, (s1.len() - 1) as f64, (s2.len() - 1) as f64);
    let p_value = (2.0 * cdf.min(1.0 - cdf)).clamp(0.0, 1.0);
    Ok(TestResult { statistic: f, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_variances_give_p_one() {
        let r = f_variance_test(&[1.0, 2.0, 3.0, 4.0], &[10.0, 11.0, 12.0, 13.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_of_four() {
        let r = f_variance_test(&[0.0, 2.0, 4.0], &[0.0, 1.0, 2.0]).unwrap();
        assert!((r.statistic - 4.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_reference_values() {
        // scipy.stats.f.cdf
        assert!((f_cdf(2.0, 5.0, 10.0) - 0.8358050491002613).abs() < 1e-10);
        assert!((f_cdf(0.5, 14.0, 14.0) - 0.10353924518431963).abs() < 1e-10);
        assert!((f_cdf(3.5, 24.0, 49.0) - 0.9998998152820936).abs() < 1e-10);
    }

    #[test]
    fn swap_symmetry() {
        let a = [0.1, 2.3, -1.0, 0.7, 1.9];
        let b = [0.5, 0.4, 0.2, 0.9, 0.3, 0.45];
        let p1 = f_variance_test(&a, &b).unwrap().p_value;
        let p2 = f_variance_test(&b, &a).unwrap().p_value;
        assert!((p1 - p2).abs() < 1e-12);
    }
}
