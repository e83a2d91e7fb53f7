//! Classifiers over binary indicator vectors.

mod forest;
mod naive_bayes;

pub use forest::{Forest, ForestParams, Node, Tree};
pub use naive_bayes::{explain_table, ExplanationTable, NaiveBayes};

use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::matrix::BinaryMatrix;
use crate::{Error, Result};

/// Index of the largest value; the lowest index wins ties.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "nb")]
    NaiveBayes,
    #[serde(rename = "rf")]
    RandomForest,
}

impl ClassifierKind {
    pub fn tag(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::RandomForest => "rf",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(ClassifierKind::NaiveBayes),
            "rf" => Ok(ClassifierKind::RandomForest),
            other => Err(Error::invalid(format!("unknown classifier {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    NaiveBayes(NaiveBayes),
    Forest(Forest),
}

impl Model {
    pub fn fit(
        kind: ClassifierKind,
        x: &BinaryMatrix,
        y: &[usize],
        n_classes: usize,
        forest: &ForestParams,
        exec: Exec,
    ) -> Result<Self> {
        Ok(match kind {
            ClassifierKind::NaiveBayes => Model::NaiveBayes(NaiveBayes::fit(x, y, n_classes)?),
            ClassifierKind::RandomForest => Model::Forest(Forest::fit(x, y, n_classes, forest, exec)?),
        })
    }

    pub fn predict_matrix(&self, x: &BinaryMatrix, exec: Exec) -> Result<Vec<usize>> {
        match self {
            Model::NaiveBayes(m) => m.predict_matrix(x),
            Model::Forest(f) => f.predict_matrix(x, exec),
        }
    }

    pub fn oob_accuracy(&self) -> Option<f64> {
        match self {
            Model::NaiveBayes(_) => None,
            Model::Forest(f) => f.oob_accuracy,
        }
    }
}
