//! Train/test protocol and report assembly.
//!
//! The dataset is split once into a stratified training set and a test set;
//! the test set is dealt into equal-size stratified slices. Classifiers are
//! fitted on the training rows only (this includes the mRMR ranking) and
//! scored on the training set, on each slice and on the whole test set.

mod report;

pub use report::{
    write_confusion_csv, write_curves_csv, write_full_slices_csv, write_per_class_error_csv, write_table_full_csv,
    write_table_selected_csv, Tables,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{ClassifierKind, ForestParams, Model, NaiveBayes};
use crate::exec::Exec;
use crate::indicators::IndicatorMatrix;
use crate::matrix::BinaryMatrix;
use crate::select::{mrmr_rank, select_optimal_k, Selection};
use crate::signal::AnomalyClass;
use crate::{Error, Result};

const N_CLASSES: usize = AnomalyClass::COUNT;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub train_size: usize,
    pub n_slices: usize,
    pub slice_size: usize,
    /// Equal class counts in the training set instead of the dataset's
    /// proportions.
    pub balanced_train: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { train_size: 1000, n_slices: 10, slice_size: 500, balanced_train: false }
    }
}

/// Row indices (into the indicator matrix) of each part of the split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub slices: Vec<Vec<usize>>,
    pub seed: u64,
}

/// Splits `n` items into parts proportional to `weights` summing to `total`
/// by largest remainder; equal remainders favour the lower index.
fn apportion(weights: &[usize], total: usize) -> Vec<usize> {
    let sum: usize = weights.iter().sum();
    let mut out: Vec<usize> = weights.iter().map(|&w| w * total / sum).collect();
    let mut rem: Vec<(usize, usize)> = weights.iter().enumerate().map(|(i, &w)| (w * total % sum, i)).collect();
    rem.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let short = total - out.iter().sum::<usize>();
    for &(_, i) in rem.iter().take(short) {
        out[i] += 1;
    }
    out
}

/// Stratified split. Training rows are drawn per class (proportionally, or
/// equally with `balanced_train`); the remaining rows form the test set,
/// which is dealt round-robin, class by class, into the slices.
pub fn make_split(labels: &[AnomalyClass], config: &SplitConfig, seed: u64) -> Result<SplitPlan> {
    let n = labels.len();
    if config.n_slices == 0 || config.slice_size == 0 {
        return Err(Error::invalid("need at least one non-empty test slice"));
    }
    if n != config.train_size + config.n_slices * config.slice_size {
        return Err(Error::invalid(format!(
            "{n} observations cannot be split into {} training rows and {}×{} test rows",
            config.train_size, config.n_slices, config.slice_size
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); N_CLASSES];
    for (i, l) in labels.iter().enumerate() {
        by_class[l.index()].push(i);
    }
    let counts: Vec<usize> = by_class.iter().map(|c| c.len()).collect();
    if counts.contains(&0) {
        return Err(Error::invalid(format!("every class needs observations, got counts {counts:?}")));
    }
    let quotas = if config.balanced_train {
        apportion(&[1; N_CLASSES], config.train_size)
    } else {
        apportion(&counts, config.train_size)
    };
    if quotas.iter().zip(&counts).any(|(q, c)| q >= c) {
        return Err(Error::invalid(format!("training quotas {quotas:?} leave a class without test rows")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(config.train_size);
    let mut test_by_class = Vec::with_capacity(n - config.train_size);
    for (rows, &q) in by_class.iter_mut().zip(&quotas) {
        rows.shuffle(&mut rng);
        train.extend_from_slice(&rows[..q]);
        test_by_class.extend_from_slice(&rows[q..]);
    }
    let mut slices = vec![Vec::with_capacity(config.slice_size); config.n_slices];
    for (i, &r) in test_by_class.iter().enumerate() {
        slices[i % config.n_slices].push(r);
    }
    for s in &mut slices {
        s.sort_unstable();
    }
    train.sort_unstable();
    let mut test = test_by_class;
    test.sort_unstable();
    Ok(SplitPlan { train, test, slices, seed })
}

pub fn accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    check_pair(predictions, labels)?;
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// `m[true][predicted]` counts.
pub fn confusion_matrix(predictions: &[usize], labels: &[usize]) -> Result<Vec<Vec<usize>>> {
    check_pair(predictions, labels)?;
    let mut m = vec![vec![0; N_CLASSES]; N_CLASSES];
    for (&p, &l) in predictions.iter().zip(labels) {
        if p >= N_CLASSES || l >= N_CLASSES {
            return Err(Error::invalid(format!("class code out of range: {l} / {p}")));
        }
        m[l][p] += 1;
    }
    Ok(m)
}

/// Per-class error `1 − m[c][c] / Σ_p m[c][p]`; classes with no rows give 0.
pub fn per_class_error(confusion: &[Vec<usize>]) -> Vec<f64> {
    confusion
        .iter()
        .enumerate()
        .map(|(c, row)| {
            let total: usize = row.iter().sum();
            if total == 0 {
                0.0
            } else {
                1.0 - row[c] as f64 / total as f64
            }
        })
        .collect()
}

fn check_pair(predictions: &[usize], labels: &[usize]) -> Result<()> {
    if predictions.len() != labels.len() {
        return Err(Error::invalid(format!("{} predictions for {} labels", predictions.len(), labels.len())));
    }
    if labels.is_empty() {
        return Err(Error::invalid("accuracy of an empty set"));
    }
    Ok(())
}

/// Mean and sample standard deviation (n − 1 denominator).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: ClassifierKind,
    pub columns: Vec<usize>,
    pub train_accuracy: f64,
    pub oob_accuracy: Option<f64>,
    pub slice_accuracies: Vec<f64>,
    pub slice_mean: f64,
    pub slice_sd: f64,
    /// Accuracy over the whole test set.
    pub test_accuracy: f64,
    /// Over the whole test set, `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub train_class_error: Vec<f64>,
    pub test_class_error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardRun {
    pub classifier: ClassifierKind,
    /// Report for K = 1, 2, … in order.
    pub curve: Vec<EvalReport>,
    pub k_star: usize,
}

impl ForwardRun {
    pub fn at(&self, k: usize) -> &EvalReport {
        &self.curve[k - 1]
    }

    pub fn best(&self) -> &EvalReport {
        self.at(self.k_star)
    }
}

/// Everything needed to fit and score classifiers on one indicator matrix.
pub struct Experiment<'a> {
    pub data: &'a IndicatorMatrix,
    pub split: SplitPlan,
    pub forest: ForestParams,
    pub exec: Exec,
    labels: Vec<usize>,
    train_y: Vec<usize>,
    test_y: Vec<usize>,
}

impl<'a> Experiment<'a> {
    pub fn new(data: &'a IndicatorMatrix, split: SplitPlan, forest: ForestParams, exec: Exec) -> Result<Self> {
        let n = data.matrix.rows();
        if split.train.iter().chain(&split.test).any(|&r| r >= n) {
            return Err(Error::invalid("split refers to rows outside the matrix"));
        }
        let labels = data.label_codes();
        let train_y = split.train.iter().map(|&r| labels[r]).collect();
        let test_y = split.test.iter().map(|&r| labels[r]).collect();
        Ok(Experiment { data, split, forest, exec, labels, train_y, test_y })
    }

    pub fn n_columns(&self) -> usize {
        self.data.matrix.cols()
    }

    pub fn train_labels(&self) -> &[usize] {
        &self.train_y
    }

    fn train_matrix(&self, columns: &[usize]) -> BinaryMatrix {
        self.data.matrix.select(&self.split.train, columns)
    }

    pub fn fit(&self, kind: ClassifierKind, columns: &[usize]) -> Result<Model> {
        Model::fit(kind, &self.train_matrix(columns), &self.train_y, N_CLASSES, &self.forest, self.exec)
    }

    /// Fits on the training rows restricted to `columns` and scores the model.
    pub fn evaluate(&self, kind: ClassifierKind, columns: &[usize]) -> Result<EvalReport> {
        let train_x = self.train_matrix(columns);
        let model = Model::fit(kind, &train_x, &self.train_y, N_CLASSES, &self.forest, self.exec)?;
        let train_pred = model.predict_matrix(&train_x, self.exec)?;
        let test_x = self.data.matrix.select(&self.split.test, columns);
        let test_pred = model.predict_matrix(&test_x, self.exec)?;

        let position: std::collections::HashMap<usize, usize> =
            self.split.test.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let slice_accuracies = self
            .split
            .slices
            .iter()
            .map(|slice| {
                let hits = slice.iter().filter(|&&r| test_pred[position[&r]] == self.labels[r]).count();
                hits as f64 / slice.len() as f64
            })
            .collect::<Vec<_>>();
        let (slice_mean, slice_sd) = mean_sd(&slice_accuracies);
        let confusion = confusion_matrix(&test_pred, &self.test_y)?;
        let train_confusion = confusion_matrix(&train_pred, &self.train_y)?;
        Ok(EvalReport {
            classifier: kind,
            columns: columns.to_vec(),
            train_accuracy: accuracy(&train_pred, &self.train_y)?,
            oob_accuracy: model.oob_accuracy(),
            slice_accuracies,
            slice_mean,
            slice_sd,
            test_accuracy: accuracy(&test_pred, &self.test_y)?,
            test_class_error: per_class_error(&confusion),
            train_class_error: per_class_error(&train_confusion),
            confusion,
        })
    }

    /// All columns of the (deduplicated) matrix.
    pub fn run_full(&self, kind: ClassifierKind) -> Result<EvalReport> {
        let all: Vec<usize> = (0..self.n_columns()).collect();
        self.evaluate(kind, &all)
    }

    /// mRMR ranking of up to `k` columns, computed on training rows only.
    pub fn rank(&self, k: usize) -> Result<Selection> {
        let train = self.data.matrix.select_rows(&self.split.train);
        mrmr_rank(&train.columns(), &self.train_y, k.min(self.n_columns()), self.exec)
    }

    /// Forward curve over the first `max_k` ranked columns; K* maximises
    /// training accuracy within `1..=k_cap`.
    pub fn run_forward(
        &self,
        kind: ClassifierKind,
        ranking: &Selection,
        max_k: usize,
        k_cap: usize,
    ) -> Result<ForwardRun> {
        let order = ranking.ordered_columns();
        if max_k == 0 || max_k > order.len() {
            return Err(Error::invalid(format!("max K {max_k} outside 1..={}", order.len())));
        }
        let curve = self
            .exec
            .map_range(max_k, |i| self.evaluate(kind, &order[..=i]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let train: Vec<f64> = curve.iter().map(|r| r.train_accuracy).collect();
        let k_star = select_optimal_k(&train, k_cap.min(max_k))?;
        Ok(ForwardRun { classifier: kind, curve, k_star })
    }

    /// Naive Bayes fitted on the training rows with the given columns.
    pub fn naive_bayes(&self, columns: &[usize]) -> Result<NaiveBayes> {
        NaiveBayes::fit(&self.train_matrix(columns), &self.train_y, N_CLASSES)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_labels() -> Vec<AnomalyClass> {
        let mut v = vec![AnomalyClass::NoAnomaly; 3000];
        for c in &AnomalyClass::ALL[1..] {
            v.extend(std::iter::repeat_n(*c, 1000));
        }
        v
    }

    fn class_counts(rows: &[usize], labels: &[AnomalyClass]) -> Vec<usize> {
        let mut c = vec![0; 4];
        for &r in rows {
            c[labels[r].index()] += 1;
        }
        c
    }

    #[test]
    fn default_split_shape() {
        let labels = paper_labels();
        let plan = make_split(&labels, &SplitConfig::default(), 1).unwrap();
        assert_eq!(plan.train.len(), 1000);
        assert_eq!(plan.test.len(), 5000);
        assert_eq!(class_counts(&plan.train, &labels), vec![500, 167, 167, 166]);
        assert_eq!(class_counts(&plan.test, &labels), vec![2500, 833, 833, 834]);
        let mut seen = std::collections::HashSet::new();
        for s in &plan.slices {
            assert_eq!(s.len(), 500);
            let c = class_counts(s, &labels);
            assert_eq!(c[0], 250);
            assert!(c[1..].iter().all(|&k| k == 83 || k == 84), "{c:?}");
            for &r in s {
                assert!(seen.insert(r));
            }
        }
        assert_eq!(seen.len(), 5000);
        assert!(plan.train.iter().all(|r| !seen.contains(r)));
        assert_eq!(plan, make_split(&labels, &SplitConfig::default(), 1).unwrap());
        assert_ne!(plan.train, make_split(&labels, &SplitConfig::default(), 2).unwrap().train);
    }

    #[test]
    fn balanced_train() {
        let labels = paper_labels();
        let cfg = SplitConfig { balanced_train: true, ..Default::default() };
        let plan = make_split(&labels, &cfg, 0).unwrap();
        assert_eq!(class_counts(&plan.train, &labels), vec![250; 4]);
        for s in &plan.slices {
            assert_eq!(s.len(), 500);
        }
    }

    #[test]
    fn composition_mismatch() {
        let labels = paper_labels();
        assert!(make_split(&labels[..5999], &SplitConfig::default(), 0).is_err());
    }

    #[test]
    fn apportion_largest_remainder() {
        assert_eq!(apportion(&[3000, 1000, 1000, 1000], 1000), vec![500, 167, 167, 166]);
        assert_eq!(apportion(&[1, 1, 1, 1], 10), vec![3, 3, 2, 2]);
    }

    #[test]
    fn metrics() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 2, 3], &[0, 1, 2]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 2, 3], &[0, 1, 2, 0]).unwrap(), 0.75);
        assert!(accuracy(&[], &[]).is_err());
        let m = confusion_matrix(&[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap();
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, (i == j) as usize);
            }
        }
        let pred = [0, 1, 1, 3, 2, 2, 0];
        let truth = [0, 1, 2, 3, 2, 3, 0];
        let m = confusion_matrix(&pred, &truth).unwrap();
        let trace: usize = (0..4).map(|i| m[i][i]).sum();
        assert_eq!(trace as f64 / 7.0, accuracy(&pred, &truth).unwrap());
        let errs = per_class_error(&m);
        let weighted: f64 = (0..4).map(|c| errs[c] * m[c].iter().sum::<usize>() as f64).sum::<f64>() / 7.0;
        assert!((weighted - (1.0 - accuracy(&pred, &truth).unwrap())).abs() < 1e-15);
    }

    #[test]
    fn sample_sd() {
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
