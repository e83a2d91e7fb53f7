use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{EvalReport, ForwardRun};
use crate::classify::ExplanationTable;
use crate::signal::AnomalyClass;
use crate::{Error, Result};

fn class_headers() -> Vec<String> {
    AnomalyClass::ALL.iter().map(|c| c.short_name().to_string()).collect()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::Writer::from_writer(out)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io("<csv>", e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Full-indicator accuracy table: one row per dataset.
pub fn write_table_full_csv<W: Write>(rows: &[(String, &EvalReport)], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["dataset", "classifier", "columns", "train_accuracy", "oob_accuracy", "test_mean", "test_sd"])?;
    for (name, r) in rows {
        w.write_record([
            name.clone(),
            r.classifier.tag().to_string(),
            r.columns.len().to_string(),
            r.train_accuracy.to_string(),
            opt(r.oob_accuracy),
            r.slice_mean.to_string(),
            r.slice_sd.to_string(),
        ])?;
    }
    finish(w)
}

/// Accuracy at the selected K: one row per dataset.
pub fn write_table_selected_csv<W: Write>(rows: &[(String, &ForwardRun)], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["dataset", "classifier", "train_accuracy", "test_mean", "test_sd", "k"])?;
    for (name, run) in rows {
        let r = run.best();
        w.write_record([
            name.clone(),
            run.classifier.tag().to_string(),
            r.train_accuracy.to_string(),
            r.slice_mean.to_string(),
            r.slice_sd.to_string(),
            run.k_star.to_string(),
        ])?;
    }
    finish(w)
}

/// Confusion matrix over the full test set, with row totals.
pub fn write_confusion_csv<W: Write>(r: &EvalReport, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    let mut header = vec!["true_class".to_string()];
    header.extend(class_headers());
    header.push("total".into());
    w.write_record(&header)?;
    for (c, row) in r.confusion.iter().enumerate() {
        let mut rec = vec![AnomalyClass::ALL[c].short_name().to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        rec.push(row.iter().sum::<usize>().to_string());
        w.write_record(&rec)?;
    }
    finish(w)
}

/// `classifier,k,train_accuracy,oob_accuracy,test_mean,test_sd,slice_1…`.
pub fn write_curves_csv<W: Write>(runs: &[&ForwardRun], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    let n_slices = runs.first().and_then(|r| r.curve.first()).map_or(0, |r| r.slice_accuracies.len());
    let mut header: Vec<String> =
        ["classifier", "k", "column", "train_accuracy", "oob_accuracy", "test_mean", "test_sd"]
            .map(String::from)
            .to_vec();
    header.extend((1..=n_slices).map(|i| format!("slice_{i}")));
    w.write_record(&header)?;
    for run in runs {
        for (i, r) in run.curve.iter().enumerate() {
            let mut rec = vec![
                run.classifier.tag().to_string(),
                (i + 1).to_string(),
                r.columns.last().map(|c| c.to_string()).unwrap_or_default(),
                r.train_accuracy.to_string(),
                opt(r.oob_accuracy),
                r.slice_mean.to_string(),
                r.slice_sd.to_string(),
            ];
            rec.extend(r.slice_accuracies.iter().map(|a| a.to_string()));
            w.write_record(&rec)?;
        }
    }
    finish(w)
}

/// Class-conditional error per K on the training and full test sets.
pub fn write_per_class_error_csv<W: Write>(runs: &[&ForwardRun], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    let mut header: Vec<String> = ["classifier", "k", "set"].map(String::from).to_vec();
    header.extend(class_headers());
    w.write_record(&header)?;
    for run in runs {
        for (i, r) in run.curve.iter().enumerate() {
            for (set, errs) in [("train", &r.train_class_error), ("test", &r.test_class_error)] {
                let mut rec = vec![run.classifier.tag().to_string(), (i + 1).to_string(), set.to_string()];
                rec.extend(errs.iter().map(|e| e.to_string()));
                w.write_record(&rec)?;
            }
        }
    }
    finish(w)
}

/// Per-slice accuracies of the full-indicator runs.
pub fn write_full_slices_csv<W: Write>(reports: &[&EvalReport], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["classifier", "slice", "accuracy"])?;
    for r in reports {
        for (i, a) in r.slice_accuracies.iter().enumerate() {
            w.write_record([r.classifier.tag().to_string(), (i + 1).to_string(), a.to_string()])?;
        }
    }
    finish(w)
}

/// All report artifacts of one dataset run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tables {
    pub dataset: String,
    pub rf_full: Option<EvalReport>,
    pub nb_full: Option<EvalReport>,
    pub rf_forward: Option<ForwardRun>,
    pub nb_forward: Option<ForwardRun>,
    pub explanation: Option<ExplanationTable>,
}

fn write_file(
    dir: &Path,
    name: &str,
    written: &mut Vec<PathBuf>,
    f: impl FnOnce(BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    f(BufWriter::new(file))?;
    written.push(path);
    Ok(())
}

impl Tables {
    /// Writes every available table; returns the paths written.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let name = self.dataset.clone();
        if let Some(r) = &self.rf_full {
            write_file(dir, "table2.csv", &mut written, |w| write_table_full_csv(&[(name.clone(), r)], w))?;
        }
        if let Some(r) = &self.nb_full {
            write_file(dir, "table3.csv", &mut written, |w| write_table_full_csv(&[(name.clone(), r)], w))?;
            write_file(dir, "table4.csv", &mut written, |w| write_confusion_csv(r, w))?;
        }
        if let Some(run) = &self.nb_forward {
            write_file(dir, "table5.csv", &mut written, |w| write_table_selected_csv(&[(name.clone(), run)], w))?;
        }
        if let Some(t) = &self.explanation {
            write_file(dir, "table6.csv", &mut written, |w| t.write_csv(w))?;
        }
        let runs: Vec<&ForwardRun> = [&self.rf_forward, &self.nb_forward].into_iter().flatten().collect();
        if !runs.is_empty() {
            write_file(dir, "curves.csv", &mut written, |w| write_curves_csv(&runs, w))?;
            write_file(dir, "per_class_error.csv", &mut written, |w| write_per_class_error_csv(&runs, w))?;
        }
        let full: Vec<&EvalReport> = [&self.rf_full, &self.nb_full].into_iter().flatten().collect();
        if !full.is_empty() {
            write_file(dir, "full_slices.csv", &mut written, |w| write_full_slices_csv(&full, w))?;
        }
        write_file(dir, "tables.txt", &mut written, |mut w| {
            w.write_all(self.to_text().as_bytes()).map_err(|e| Error::io(dir.join("tables.txt"), e))
        })?;
        Ok(written)
    }

    /// Plain-text rendering of the tables.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let d = &self.dataset;
        if let Some(r) = &self.rf_full {
            s.push_str(&format!("Random forest, all {} distinct indicators\n", r.columns.len()));
            s.push_str("dataset  train acc.  OOB acc.  test average acc.\n");
            s.push_str(&format!(
                "{d:<7}  {:>10.4}  {:>8.4}  {:.4} ({:.4})\n\n",
                r.train_accuracy,
                r.oob_accuracy.unwrap_or(f64::NAN),
                r.slice_mean,
                r.slice_sd
            ));
        }
        if let Some(r) = &self.nb_full {
            s.push_str(&format!("Naive Bayes, all {} distinct indicators\n", r.columns.len()));
            s.push_str("dataset  train acc.  test average acc.\n");
            s.push_str(&format!("{d:<7}  {:>10.4}  {:.4} ({:.4})\n\n", r.train_accuracy, r.slice_mean, r.slice_sd));
            s.push_str("Naive Bayes confusion matrix, full test set (rows: true class)\n");
            s.push_str(&format!("{:<10}", ""));
            for h in class_headers() {
                s.push_str(&format!("{h:>10}"));
            }
            s.push_str(&format!("{:>10}\n", "total"));
            for (c, row) in r.confusion.iter().enumerate() {
                s.push_str(&format!("{:<10}", AnomalyClass::ALL[c].short_name()));
                for v in row {
                    s.push_str(&format!("{v:>10}"));
                }
                s.push_str(&format!("{:>10}\n", row.iter().sum::<usize>()));
            }
            s.push('\n');
        }
        if let Some(run) = &self.nb_forward {
            let r = run.best();
            s.push_str("Naive Bayes, mRMR-selected indicators\n");
            s.push_str("dataset  train acc.  test average acc.  # of indicators\n");
            s.push_str(&format!(
                "{d:<7}  {:>10.4}  {:.4} ({:.4})   {:>15}\n\n",
                r.train_accuracy, r.slice_mean, r.slice_sd, run.k_star
            ));
        }
        if let Some(t) = &self.explanation {
            s.push_str("Probability of observing 1 conditionally on the class\n");
            s.push_str(&t.to_text());
            s.push('\n');
        }
        s
    }
}
