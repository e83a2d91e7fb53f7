//! Folding a window-level bit series into a single indicator bit.
//!
//! Derived indicators read the stride-1 series every δ positions; this is
//! the same as testing only δ-spaced windows.

use crate::{Error, Result};

/// Slack for "at least a fraction β" comparisons, so that e.g. β = 0.3 of
/// 10 windows means 3 and not 4 after floating-point rounding.
const FRACTION_EPS: f64 = 1e-9;

/// Keeps positions `0, δ, 2δ, …`. Output length is `⌊(n−1)/δ⌋ + 1` for
/// nonempty input.
pub fn subsample(bits: &[bool], delta: usize) -> Vec<bool> {
    assert!(delta >= 1, "jump must be at least 1");
    bits.iter().step_by(delta).copied().collect()
}

/// Minimum count of ones meeting the fraction `beta` of `n` windows.
pub fn fraction_threshold(beta: f64, n: usize) -> usize {
    ((beta * n as f64 - FRACTION_EPS).ceil().max(1.0)) as usize
}

/// 1 when any window rejects.
pub fn simple(bits: &[bool]) -> Result<bool> {
    if bits.is_empty() {
        return Err(Error::invalid("simple indicator over an empty series"));
    }
    Ok(bits.iter().any(|&b| b))
}

/// 1 when at least a fraction `beta` of the δ-spaced windows reject.
pub fn global_ratio(bits: &[bool], beta: f64, delta: usize) -> bool {
    let n = bits.len().div_ceil(delta);
    if n == 0 {
        return false;
    }
    let ones = bits.iter().step_by(delta).filter(|&&b| b).count();
    ones >= fraction_threshold(beta, n)
}

/// Longest run of ones among the δ-spaced windows.
pub fn longest_run(bits: &[bool], delta: usize) -> usize {
    let mut best = 0;
    let mut run = 0;
    for &b in bits.iter().step_by(delta) {
        run = if b { run + 1 } else { 0 };
        best = best.max(run);
    }
    best
}

/// 1 when `⌈β·n_δ⌉` consecutive δ-spaced windows all reject, `n_δ` being the
/// number of δ-spaced windows.
pub fn consecutive_ratio(bits: &[bool], beta: f64, delta: usize) -> bool {
    let n = bits.len().div_ceil(delta);
    if n == 0 {
        return false;
    }
    longest_run(bits, delta) >= fraction_threshold(beta, n)
}

/// 1 when some block of `l` consecutive δ-spaced windows holds at least `k`
/// rejections. Fewer than `l` windows give 0.
pub fn local_ratio(bits: &[bool], l: usize, k: usize, delta: usize) -> bool {
    let sub = subsample(bits, delta);
    if sub.len() < l || l == 0 {
        return false;
    }
    let mut count = sub[..l].iter().filter(|&&b| b).count();
    if count >= k {
        return true;
    }
    for i in l..sub.len() {
        count += sub[i] as usize;
        count -= sub[i - l] as usize;
        if count >= k {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[u8]) -> Vec<bool> {
        v.iter().map(|&x| x == 1).collect()
    }

    #[test]
    fn subsample_lengths() {
        assert_eq!(subsample(&[false; 10], 1).len(), 10);
        assert_eq!(subsample(&b(&[1, 0, 0, 0, 1, 0, 0, 0, 1]), 4), b(&[1, 1, 1]));
        assert_eq!(subsample(&[false; 71], 10).len(), 8);
    }

    #[test]
    fn simple_cases() {
        assert!(!simple(&[false; 5]).unwrap());
        let mut v = vec![false; 100];
        v[37] = true;
        assert!(simple(&v).unwrap());
        assert!(simple(&[true; 3]).unwrap());
        assert!(simple(&[]).is_err());
    }

    #[test]
    fn global_cases() {
        assert!(global_ratio(&b(&[1, 0, 1, 0]), 0.5, 1));
        assert!(!global_ratio(&b(&[1, 0, 0, 0]), 0.5, 1));
        assert!(global_ratio(&b(&[1, 0, 1, 0, 1]), 0.5, 2));
    }

    #[test]
    fn consecutive_cases() {
        assert!(consecutive_ratio(&b(&[0, 1, 1, 1, 1, 1, 0, 0, 0, 0]), 0.5, 1));
        assert!(!consecutive_ratio(&b(&[0, 1, 1, 1, 1, 0, 1, 0, 0, 0]), 0.5, 1));
        assert!(!consecutive_ratio(&b(&[1, 0, 1, 0, 1, 0, 1, 0, 1, 0]), 0.3, 1));
        assert_eq!(fraction_threshold(0.3, 10), 3);
        assert_eq!(fraction_threshold(0.1, 71), 8);
        assert_eq!(fraction_threshold(0.1, 3), 1);
    }

    #[test]
    fn local_cases() {
        assert!(local_ratio(&b(&[1, 0, 1]), 3, 2, 1));
        assert!(!local_ratio(&b(&[1, 0, 0, 0, 1]), 3, 2, 1));
        assert!(!local_ratio(&b(&[1, 1]), 3, 2, 1));
        assert!(!local_ratio(&b(&[1, 0, 0, 0, 1, 0, 0, 0]), 3, 2, 4));
        assert!(local_ratio(&b(&[1, 0, 0, 0, 1, 0, 0, 0, 0]), 3, 2, 4));
    }
}
