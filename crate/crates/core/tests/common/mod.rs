//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Two-sided exact MWU p-value by listing every assignment of the pooled
/// ranks to the first sample. Tie-free input only.
pub fn mwu_p_by_enumeration(s1: &[f64], s2: &[f64]) -> f64 {
    let (n1, n2) = (s1.len(), s2.len());
    let n = n1 + n2;
    let pooled: Vec<f64> = s1.iter().chain(s2).copied().collect();
    let rank = |v: f64| 1 + pooled.iter().filter(|&&w| w < v).count();
    let r1: usize = s1.iter().map(|&v| rank(v)).sum();
    let u_obs = r1 - n1 * (n1 + 1) / 2;

    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let r: usize = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).sum();
        let u = r - n1 * (n1 + 1) / 2;
        total += 1;
        le += (u <= u_obs) as u64;
        ge += (u >= u_obs) as u64;
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

/// KS distance by evaluating both empirical CDFs at every sample point.
pub fn ks_d_brute(s1: &[f64], s2: &[f64]) -> f64 {
    let ecdf = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
    s1.iter().chain(s2).map(|&t| (ecdf(s1, t) - ecdf(s2, t)).abs()).fold(0.0, f64::max)
}

/// Variance ratio with Kahan-compensated sums of squared deviations.
pub fn f_stat_brute(s1: &[f64], s2: &[f64]) -> f64 {
    fn var(x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let mut acc = 0.0;
        let mut comp = 0.0;
        for &v in x {
            let d = (v - mean) * (v - mean) - comp;
            let t = acc + d;
            comp = (t - acc) - d;
            acc = t;
        }
        acc / (n - 1.0)
    }
    var(s1) / var(s2)
}

/// Fraction written as tenths, so "at least β of n" is `10·ones ≥ tenths·n`.
pub fn tenths(beta: f64) -> usize {
    let t = (beta * 10.0).round();
    assert!((beta * 10.0 - t).abs() < 1e-12, "oracle handles β in tenths only");
    t as usize
}

pub fn kept(bits: &[bool], delta: usize) -> Vec<bool> {
    (0..bits.len()).filter(|i| i % delta == 0).map(|i| bits[i]).collect()
}

pub fn simple_brute(bits: &[bool]) -> bool {
    bits.contains(&true)
}

pub fn global_brute(bits: &[bool], beta: f64, delta: usize) -> bool {
    let sub = kept(bits, delta);
    let ones = sub.iter().filter(|&&b| b).count();
    !sub.is_empty() && ones >= 1 && 10 * ones >= tenths(beta) * sub.len()
}

pub fn consecutive_brute(bits: &[bool], beta: f64, delta: usize) -> bool {
    let sub = kept(bits, delta);
    let n = sub.len();
    for start in 0..n {
        for end in start + 1..=n {
            let len = end - start;
            if sub[start..end].iter().all(|&b| b) && 10 * len >= tenths(beta) * n {
                return true;
            }
        }
    }
    false
}

pub fn local_brute(bits: &[bool], l: usize, k: usize, delta: usize) -> bool {
    let sub = kept(bits, delta);
    if sub.len() < l {
        return false;
    }
    (0..=sub.len() - l).any(|s| sub[s..s + l].iter().filter(|&&b| b).count() >= k)
}

/// Plug-in mutual information in bits from entropies, `H(X) + H(Y) − H(X,Y)`.
pub fn mi_entropy(x: &[usize], y: &[usize]) -> f64 {
    use std::collections::HashMap;
    fn h<K: std::hash::Hash + Eq>(items: impl Iterator<Item = K>, n: f64) -> f64 {
        let mut c: HashMap<K, f64> = HashMap::new();
        for k in items {
            *c.entry(k).or_default() += 1.0;
        }
        c.values().map(|&v| -(v / n) * (v / n).log2()).sum()
    }
    let n = x.len() as f64;
    h(x.iter(), n) + h(y.iter(), n) - h(x.iter().zip(y), n)
}

/// Greedy MID selection recomputing every score from scratch at each step.
/// Ties keep the lowest column index.
pub fn mrmr_brute(columns: &[Vec<u8>], labels: &[usize], k: usize) -> Vec<usize> {
    let cols: Vec<Vec<usize>> = columns.iter().map(|c| c.iter().map(|&b| b as usize).collect()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..cols.len() {
            if chosen.contains(&j) {
                continue;
            }
            let rel = mi_entropy(&cols[j], labels);
            let red = if chosen.is_empty() {
                0.0
            } else {
                chosen.iter().map(|&s| mi_entropy(&cols[j], &cols[s])).sum::<f64>() / chosen.len() as f64
            };
            let score = rel - red;
            if best.is_none_or(|(_, b)| score > b + 1e-12) {
                best = Some((j, score));
            }
        }
        chosen.push(best.expect("columns left").0);
    }
    chosen
}

/// Bernoulli naive Bayes posterior computed with plain products.
pub fn nb_posterior_brute(x: &[Vec<u8>], y: &[usize], n_classes: usize, row: &[u8]) -> Vec<f64> {
    let mut joint = vec![0.0; n_classes];
    for (c, slot) in joint.iter_mut().enumerate() {
        let members: Vec<&Vec<u8>> = x.iter().zip(y).filter(|(_, &l)| l == c).map(|(r, _)| r).collect();
        let nc = members.len() as f64;
        let mut p = nc / x.len() as f64;
        for (j, &v) in row.iter().enumerate() {
            let ones = members.iter().filter(|r| r[j] == 1).count() as f64;
            let theta = (ones + 1.0) / (nc + 2.0);
            p *= if v == 1 { theta } else { 1.0 - theta };
        }
        *slot = p;
    }
    let z: f64 = joint.iter().sum();
    joint.iter().map(|p| p / z).collect()
}

/// Half-sizes and levels used for the null calibration check.
pub const CALIBRATION_SIZES: [usize; 3] = [15, 25, 50];
pub const LEVELS: [f64; 3] = [0.005, 0.1, 0.5];

/// Share of `trials` standard-normal sample pairs with `p < level`, for each
/// level.
pub fn null_rejection(test: anomind::stats::TestKind, half: usize, trials: usize, seed: u64) -> [f64; 3] {
    let mut r = rng(seed);
    let mut hits = [0usize; 3];
    for _ in 0..trials {
        let a = normals(&mut r, half);
        let b = normals(&mut r, half);
        let p = test.p_value_or_one(&a, &b).unwrap();
        for (h, &lvl) in hits.iter_mut().zip(&LEVELS) {
            *h += (p < lvl) as usize;
        }
    }
    hits.map(|h| h as f64 / trials as f64)
}

pub fn three_se(level: f64, trials: usize) -> f64 {
    3.0 * (level * (1.0 - level) / trials as f64).sqrt()
}
