use statrs::function::erf::erfc;

use super::{check_sizes, TestResult};
use crate::Result;

/// Largest `n1 + n2` for which the exact null distribution is used.
pub const EXACT_MAX_TOTAL: usize = 16;

/// Ranks of `values` (1-based), ties receiving the mean of their positions.
/// Also returns `Σ (t³ − t)` over tie groups.
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank mean((i+1)..=j)
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    (ranks, tie_term)
}

/// Number of arrangements of `n1` first-sample and `n2` second-sample values
/// giving each U in `0..=n1·n2`, where U counts pairs with the first-sample
/// value larger.
pub fn exact_u_counts(n1: usize, n2: usize) -> Vec<u64> {
    let max_u = n1 * n2;
    // table[i][j] = counts for i first-sample and j second-sample values
    let mut prev: Vec<Vec<u64>> = vec![vec![1]; n2 + 1];
    for i in 1..=n1 {
        let mut cur: Vec<Vec<u64>> = Vec::with_capacity(n2 + 1);
        cur.push(vec![1]);
        for j in 1..=n2 {
            // largest value belongs to sample 1 (beats all j) or sample 2
            let mut row = vec![0u64; i * j + 1];
            for (u, &c) in prev[j].iter().enumerate() {
                row[u + j] += c;
            }
            for (u, &c) in cur[j - 1].iter().enumerate() {
                row[u] += c;
            }
            cur.push(row);
        }
        prev = cur;
    }
    let counts = prev.swap_remove(n2);
    debug_assert_eq!(counts.len(), max_u + 1);
    counts
}

/// Two-sided p-value from exact counts: `min(1, 2·min(P(U ≤ u), P(U ≥ u)))`.
fn exact_p(counts: &[u64], u: usize) -> f64 {
    let total: u64 = counts.iter().sum();
    let le: u64 = counts[..=u].iter().sum();
    let ge: u64 = counts[u..].iter().sum();
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

/// Mann-Whitney-Wilcoxon U test, two-sided.
///
/// The statistic is `U1 = R1 − n1(n1+1)/2` with midranks. Without ties and
/// with `n1 + n2 ≤ 16` the p-value comes from the exact null distribution;
/// otherwise from the normal approximation with continuity and tie
/// corrections.
pub fn mann_whitney_u(s1: &[f64], s2: &[f64]) -> Result<TestResult> {
    check_sizes(s1, s2)?;
    let (n1, n2) = (s1.len(), s2.len());
    let mut joined = Vec::with_capacity(n1 + n2);
    joined.extend_from_slice(s1);
    joined.extend_from_slice(s2);
    let (ranks, tie_term) = midranks(&joined);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;

    let n = (n1 + n2) as f64;
    let p_value = if tie_term == 0.0 && n1 + n2 <= EXACT_MAX_TOTAL {
        exact_p(&exact_u_counts(n1, n2), u.round() as usize)
    } else {
        let (a, b) = (n1 as f64, n2 as f64);
        let mean = a * b / 2.0;
        let var = a * b / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
        if var <= 0.0 {
            1.0
        } else {
            let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
            erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
        }
    };
    Ok(TestResult { statistic: u, p_value })
}
