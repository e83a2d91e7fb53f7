//! Sliding windows over a signal, window-level tests, binarisation and
//! smoothing.
//!
//! A window of even length τ starting at `k` covers positions `k..k+τ`; its
//! first half is tested against its second half. A signal of length `m'`
//! yields `m' − τ + 1` windows at stride 1.

use std::io::Write;

use crate::stats::TestKind;
use crate::{Error, Result};

/// Width of the smoothing moving average.
pub const SMOOTHING_WIDTH: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct PValueSeries {
    pub test: TestKind,
    pub tau: usize,
    pub smoothed: bool,
    pub p_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitSeries {
    pub bits: Vec<bool>,
    pub level: f64,
}

fn check_tau(len: usize, tau: usize) -> Result<()> {
    if tau == 0 || !tau.is_multiple_of(2) {
        return Err(Error::invalid(format!("window length {tau} must be even and positive")));
    }
    if tau > len {
        return Err(Error::invalid(format!("window length {tau} exceeds signal length {len}")));
    }
    Ok(())
}

/// All stride-1 windows of length `tau`, in position order.
pub fn extract_windows(values: &[f64], tau: usize) -> Result<std::slice::Windows<'_, f64>> {
    check_tau(values.len(), tau)?;
    Ok(values.windows(tau))
}

/// Tests the first half of `window` against the second half. Degenerate
/// halves give p = 1.
pub fn window_test(window: &[f64], test: TestKind) -> Result<f64> {
    if !window.len().is_multiple_of(2) {
        return Err(Error::invalid(format!("window length {} is odd", window.len())));
    }
    let (first, second) = window.split_at(window.len() / 2);
    test.p_value_or_one(first, second)
}

/// p-values of every window of length `tau`, in position order.
pub fn p_value_series(values: &[f64], test: TestKind, tau: usize, smoothed: bool) -> Result<PValueSeries> {
    let p_values = extract_windows(values, tau)?.map(|w| window_test(w, test)).collect::<Result<Vec<_>>>()?;
    Ok(PValueSeries { test, tau, smoothed, p_values })
}

/// `bit = 1 ⟺ p < level`.
pub fn binarize(series: &PValueSeries, level: f64) -> Result<BitSeries> {
    Ok(BitSeries { bits: binarize_p(&series.p_values, level)?, level })
}

pub fn binarize_p(p_values: &[f64], level: f64) -> Result<Vec<bool>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("level {level} outside (0, 1)")));
    }
    Ok(p_values.iter().map(|&p| p < level).collect())
}

/// Centered moving average keeping only fully covered positions, so the
/// output has `m − width + 1` values.
pub fn moving_average(values: &[f64], width: usize) -> Result<Vec<f64>> {
    if width == 0 || width.is_multiple_of(2) {
        return Err(Error::invalid(format!("moving-average width {width} must be odd")));
    }
    if width > values.len() {
        return Err(Error::invalid(format!("moving-average width {width} exceeds length {}", values.len())));
    }
    let w = width as f64;
    Ok(values.windows(width).map(|win| win.iter().sum::<f64>() / w).collect())
}

impl PValueSeries {
    /// Debug dump: `position,p_value` with 0-based window start.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["position", "p_value"])?;
        for (k, p) in self.p_values.iter().enumerate() {
            w.write_record([k.to_string(), p.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::signal_rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = signal_rng(seed, 0);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn window_counts() {
        let v = vec![0.0; 200];
        assert_eq!(extract_windows(&v[..100], 100).unwrap().count(), 1);
        assert_eq!(extract_windows(&v[..100], 30).unwrap().count(), 71);
        assert_eq!(extract_windows(&v, 50).unwrap().count(), 151);
        assert!(extract_windows(&v[..96], 100).is_err());
        assert!(extract_windows(&v, 31).is_err());
    }

    #[test]
    fn constant_window() {
        let w = [3.0; 30];
        assert!(window_test(&w, TestKind::Mwu).unwrap() >= 0.9);
        assert!(window_test(&w, TestKind::Ks2).unwrap() >= 0.9);
        assert_eq!(window_test(&w, TestKind::FVar).unwrap(), 1.0);
    }

    #[test]
    fn swapped_halves_give_same_p() {
        let v = noise(1, 30);
        let mut swapped = v[15..].to_vec();
        swapped.extend_from_slice(&v[..15]);
        for t in TestKind::ALL {
            let a = window_test(&v, t).unwrap();
            let b = window_test(&swapped, t).unwrap();
            assert!((a - b).abs() < 1e-12, "{t:?}: {a} vs {b}");
        }
    }

    #[test]
    fn shifted_halves_detected() {
        let mut hits = 0;
        for seed in 0..200 {
            let mut v = noise(seed, 30);
            v[15..].iter_mut().for_each(|x| *x += 5.0);
            hits += (window_test(&v, TestKind::Mwu).unwrap() < 0.005) as usize;
        }
        assert!(hits >= 198, "{hits}");
    }

    #[test]
    fn binarize_is_strict() {
        let s = PValueSeries { test: TestKind::Mwu, tau: 30, smoothed: false, p_values: vec![0.004, 0.1, 0.6] };
        assert_eq!(binarize(&s, 0.1).unwrap().bits, vec![true, false, false]);
        assert_eq!(binarize_p(&[0.49; 4], 0.5).unwrap(), vec![true; 4]);
        assert_eq!(binarize_p(&[0.005; 4], 0.005).unwrap(), vec![false; 4]);
        assert!(binarize_p(&[0.1], 1.0).is_err());
    }

    #[test]
    fn moving_average_cases() {
        assert_eq!(moving_average(&[1.0, 2.0, 3.0, 4.0, 5.0], 5).unwrap(), vec![3.0]);
        let c = moving_average(&[2.5; 100], 5).unwrap();
        assert_eq!(c.len(), 96);
        assert!(c.iter().all(|&x| x == 2.5));
        let ramp: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let r = moving_average(&ramp, 5).unwrap();
        assert_eq!(r.len(), 46);
        for (i, x) in r.iter().enumerate() {
            assert!((x - (i as f64 + 2.0)).abs() < 1e-12);
        }
        assert!(moving_average(&[1.0; 4], 5).is_err());
        assert!(moving_average(&[1.0; 10], 4).is_err());
    }

    #[test]
    fn constant_signal_series() {
        let v = vec![1.0; 120];
        for t in TestKind::ALL {
            let s = p_value_series(&v, t, 30, false).unwrap();
            assert_eq!(s.p_values.len(), 91);
            assert!(s.p_values.iter().all(|&p| p >= 0.9));
        }
    }

    #[test]
    fn csv_dump() {
        let s = PValueSeries { test: TestKind::Ks2, tau: 30, smoothed: true, p_values: vec![0.5, 1.0] };
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "position,p_value\n0,0.5\n1,1\n");
    }
}
