//! Mutual information and mRMR ranking of binary indicators.
//!
//! The ranking is the greedy difference form: the first column maximises
//! `I(x; y)`, each later one maximises `I(x; y) − mean_{s∈S} I(x; x_s)` over
//! the columns not yet chosen. Ties go to the lowest column index.

use std::io::Write;

use crate::exec::Exec;
use crate::{Error, Result};

/// Plug-in mutual information, in bits, between two discrete sequences.
pub fn mutual_information(x: &[usize], y: &[usize]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(Error::invalid("mutual information of empty sequences"));
    }
    let nx = x.iter().max().unwrap() + 1;
    let ny = y.iter().max().unwrap() + 1;
    let mut joint = vec![0usize; nx * ny];
    for (&a, &c) in x.iter().zip(y) {
        joint[a * ny + c] += 1;
    }
    Ok(mi_from_joint(&joint, nx, ny, x.len()))
}

fn mi_from_joint(joint: &[usize], nx: usize, ny: usize, n: usize) -> f64 {
    let mut px = vec![0usize; nx];
    let mut py = vec![0usize; ny];
    for a in 0..nx {
        for c in 0..ny {
            px[a] += joint[a * ny + c];
            py[c] += joint[a * ny + c];
        }
    }
    let n = n as f64;
    let mut mi = 0.0;
    for a in 0..nx {
        for c in 0..ny {
            let k = joint[a * ny + c];
            if k > 0 {
                let k = k as f64;
                mi += k / n * (k * n / (px[a] as f64 * py[c] as f64)).log2();
            }
        }
    }
    mi.max(0.0)
}

/// `I(x; y)` for a 0/1 column against class codes `0..n_classes`.
pub fn relevance(x: &[u8], y: &[usize], n_classes: usize) -> f64 {
    let mut joint = vec![0usize; 2 * n_classes];
    for (&a, &c) in x.iter().zip(y) {
        joint[a as usize * n_classes + c] += 1;
    }
    mi_from_joint(&joint, 2, n_classes, x.len())
}

/// `I(a; b)` for two 0/1 columns.
pub fn binary_mi(a: &[u8], b: &[u8]) -> f64 {
    let mut joint = [0usize; 4];
    for (&u, &v) in a.iter().zip(b) {
        joint[(u as usize) << 1 | v as usize] += 1;
    }
    mi_from_joint(&joint, 2, 2, a.len())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiScore {
    pub column: usize,
    pub relevance: f64,
    /// Mean MI with the columns selected before this one (0 for the first).
    pub redundancy: f64,
    /// `relevance − redundancy` when the column was picked.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub scores: Vec<MiScore>,
}

impl Selection {
    pub fn ordered_columns(&self) -> Vec<usize> {
        self.scores.iter().map(|s| s.column).collect()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `step,column,name,relevance,redundancy,criterion`, steps from 1.
    pub fn write_trace<W: Write>(&self, names: &[String], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "column", "name", "relevance", "redundancy", "criterion"])?;
        for (i, s) in self.scores.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                s.column.to_string(),
                names.get(s.column).cloned().unwrap_or_default(),
                s.relevance.to_string(),
                s.redundancy.to_string(),
                s.score.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Greedy mRMR over `columns` (each a 0/1 column of equal length) against
/// `labels`, selecting up to `k` columns.
pub fn mrmr_rank(columns: &[Vec<u8>], labels: &[usize], k: usize, exec: Exec) -> Result<Selection> {
    if k > columns.len() {
        return Err(Error::invalid(format!("cannot select {k} of {} columns", columns.len())));
    }
    if let Some(bad) = columns.iter().position(|c| c.len() != labels.len()) {
        return Err(Error::invalid(format!("column {bad} length differs from label count")));
    }
    let n_classes = labels.iter().max().map_or(1, |m| m + 1);
    let rel = exec.map_slice(columns, |c| relevance(c, labels, n_classes));
    let mut redundancy_sum = vec![0.0; columns.len()];
    let mut chosen = vec![false; columns.len()];
    let mut scores: Vec<MiScore> = Vec::with_capacity(k);

    for step in 0..k {
        if let Some(last) = scores.last() {
            let last = &columns[last.column];
            let mi = exec.map_range(columns.len(), |j| if chosen[j] { 0.0 } else { binary_mi(&columns[j], last) });
            for (sum, v) in redundancy_sum.iter_mut().zip(mi) {
                *sum += v;
            }
        }
        let mut best: Option<MiScore> = None;
        for j in (0..columns.len()).filter(|&j| !chosen[j]) {
            let redundancy = if step == 0 { 0.0 } else { redundancy_sum[j] / step as f64 };
            let score = rel[j] - redundancy;
            if best.is_none_or(|b| score > b.score) {
                best = Some(MiScore { column: j, relevance: rel[j], redundancy, score });
            }
        }
        let best = best.expect("k ≤ column count");
        chosen[best.column] = true;
        scores.push(best);
    }
    Ok(Selection { scores })
}

/// Evaluates `eval` on the first K ranked columns for K = 1..=max_k.
pub fn forward_curve<T, F>(order: &[usize], max_k: usize, exec: Exec, eval: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[usize]) -> T + Sync + Send,
{
    if max_k == 0 || max_k > order.len() {
        return Err(Error::invalid(format!("max K {max_k} outside 1..={}", order.len())));
    }
    Ok(exec.map_range(max_k, |i| eval(&order[..=i])))
}

/// K in `1..=max_k` with the highest training accuracy, the smallest K on
/// ties. `train_accuracy[i]` belongs to K = i + 1.
pub fn select_optimal_k(train_accuracy: &[f64], max_k: usize) -> Result<usize> {
    if train_accuracy.is_empty() || max_k == 0 {
        return Err(Error::invalid("empty forward curve"));
    }
    let mut best = 0;
    for (i, &a) in train_accuracy.iter().enumerate().take(max_k) {
        if a > train_accuracy[best] {
            best = i;
        }
    }
    Ok(best + 1)
}
