use std::io::Write;

use serde::{Deserialize, Serialize};

use super::argmax_lowest;
use crate::matrix::BinaryMatrix;
use crate::{Error, Result};

/// Bernoulli naive Bayes over 0/1 indicators.
///
/// `θ[c][j] = (#{x_j = 1, y = c} + 1) / (#{y = c} + 2)` and priors are class
/// frequencies. Raw counts are kept so the unsmoothed estimates can be
/// reported as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub priors: Vec<f64>,
    /// `theta[c][j] = P(x_j = 1 | class c)`, Laplace smoothed.
    pub theta: Vec<Vec<f64>>,
    pub class_counts: Vec<usize>,
    pub one_counts: Vec<Vec<usize>>,
    #[serde(skip)]
    log_theta: Vec<Vec<f64>>,
    #[serde(skip)]
    log_not_theta: Vec<Vec<f64>>,
    #[serde(skip)]
    log_priors: Vec<f64>,
}

impl NaiveBayes {
    /// Fits on `x` with labels in `0..n_classes`. Every class needs at least
    /// one row.
    pub fn fit(x: &BinaryMatrix, y: &[usize], n_classes: usize) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::invalid(format!("{} rows but {} labels", x.rows(), y.len())));
        }
        let mut class_counts = vec![0usize; n_classes];
        let mut one_counts = vec![vec![0usize; x.cols()]; n_classes];
        for (i, &c) in y.iter().enumerate() {
            if c >= n_classes {
                return Err(Error::invalid(format!("label {c} outside 0..{n_classes}")));
            }
            class_counts[c] += 1;
            for (cnt, &b) in one_counts[c].iter_mut().zip(x.row(i)) {
                *cnt += b as usize;
            }
        }
        if let Some(c) = class_counts.iter().position(|&n| n == 0) {
            return Err(Error::invalid(format!("class {c} has no training rows")));
        }
        let n = y.len() as f64;
        let priors = class_counts.iter().map(|&k| k as f64 / n).collect();
        let theta = one_counts
            .iter()
            .zip(&class_counts)
            .map(|(ones, &nc)| ones.iter().map(|&k| (k as f64 + 1.0) / (nc as f64 + 2.0)).collect())
            .collect();
        Ok(Self::from_parts(priors, theta, class_counts, one_counts))
    }

    fn from_parts(
        priors: Vec<f64>,
        theta: Vec<Vec<f64>>,
        class_counts: Vec<usize>,
        one_counts: Vec<Vec<usize>>,
    ) -> Self {
        let mut m = NaiveBayes {
            priors,
            theta,
            class_counts,
            one_counts,
            log_theta: Vec::new(),
            log_not_theta: Vec::new(),
            log_priors: Vec::new(),
        };
        m.cache_logs();
        m
    }

    fn cache_logs(&mut self) {
        self.log_priors = self.priors.iter().map(|p| p.ln()).collect();
        self.log_theta = self.theta.iter().map(|r| r.iter().map(|t| t.ln()).collect()).collect();
        self.log_not_theta = self.theta.iter().map(|r| r.iter().map(|t| (1.0 - t).ln()).collect()).collect();
    }

    pub fn n_classes(&self) -> usize {
        self.priors.len()
    }

    pub fn n_features(&self) -> usize {
        self.theta.first().map_or(0, |r| r.len())
    }

    /// Plain frequency estimates `#{x_j = 1, y = c} / #{y = c}`.
    pub fn theta_unsmoothed(&self) -> Vec<Vec<f64>> {
        self.one_counts
            .iter()
            .zip(&self.class_counts)
            .map(|(ones, &nc)| ones.iter().map(|&k| k as f64 / nc as f64).collect())
            .collect()
    }

    /// Per-class `log prior + Σ_j log P(x_j | c)`.
    pub fn log_scores(&self, row: &[u8]) -> Result<Vec<f64>> {
        if row.len() != self.n_features() {
            return Err(Error::invalid(format!("row has {} cells, model expects {}", row.len(), self.n_features())));
        }
        Ok((0..self.n_classes())
            .map(|c| {
                let (lt, lnt) = (&self.log_theta[c], &self.log_not_theta[c]);
                self.log_priors[c]
                    + row.iter().enumerate().map(|(j, &b)| if b == 1 { lt[j] } else { lnt[j] }).sum::<f64>()
            })
            .collect())
    }

    /// Most probable class (lowest code on ties) and the log scores.
    pub fn predict(&self, row: &[u8]) -> Result<(usize, Vec<f64>)> {
        let scores = self.log_scores(row)?;
        Ok((argmax_lowest(&scores), scores))
    }

    pub fn predict_matrix(&self, x: &BinaryMatrix) -> Result<Vec<usize>> {
        (0..x.rows()).map(|i| self.predict(x.row(i)).map(|p| p.0)).collect()
    }

    pub fn save_json<W: Write>(&self, columns: &[String], out: W) -> Result<()> {
        let file =
            NbFile { format: NB_FORMAT.into(), version: MODEL_VERSION, columns: columns.to_vec(), model: self.clone() };
        serde_json::to_writer_pretty(out, &file)?;
        Ok(())
    }

    pub fn load_json<R: std::io::Read>(input: R) -> Result<(Self, Vec<String>)> {
        let file: NbFile = serde_json::from_reader(input)?;
        if file.format != NB_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::invalid(format!("unsupported model file {} v{}", file.format, file.version)));
        }
        let m = file.model;
        Ok((Self::from_parts(m.priors, m.theta, m.class_counts, m.one_counts), file.columns))
    }
}

const NB_FORMAT: &str = "anomind-naive-bayes";
pub(super) const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NbFile {
    format: String,
    version: u32,
    columns: Vec<String>,
    model: NaiveBayes,
}

/// Conditional firing probabilities of the selected indicators, one row per
/// indicator and one column per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationTable {
    pub class_names: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

/// Rows in model column order. With `smoothed = false` the plain frequency
/// estimates are shown instead of the Laplace-smoothed ones.
pub fn explain_table(
    model: &NaiveBayes,
    names: &[String],
    class_names: &[String],
    smoothed: bool,
) -> Result<ExplanationTable> {
    if names.len() != model.n_features() {
        return Err(Error::invalid(format!("{} names for {} model columns", names.len(), model.n_features())));
    }
    let theta = if smoothed { model.theta.clone() } else { model.theta_unsmoothed() };
    let rows = names.iter().enumerate().map(|(j, name)| (name.clone(), theta.iter().map(|r| r[j]).collect())).collect();
    Ok(ExplanationTable { class_names: class_names.to_vec(), rows })
}

impl ExplanationTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["indicator".to_string()];
        header.extend(self.class_names.iter().cloned());
        w.write_record(&header)?;
        for (name, probs) in &self.rows {
            let mut rec = vec![name.clone()];
            rec.extend(probs.iter().map(|p| format!("{p:.6}")));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(9);
        let mut s = format!("{:<width$}", "indicator");
        for c in &self.class_names {
            s.push_str(&format!("  {c:>10}"));
        }
        s.push('\n');
        for (name, probs) in &self.rows {
            s.push_str(&format!("{name:<width$}"));
            for p in probs {
                s.push_str(&format!("  {p:>10.6}"));
            }
            s.push('\n');
        }
        s
    }
}
