//! Two-sample tests used on window halves.
//!
//! All three tests are two-sided and return the raw statistic with its
//! p-value. Inputs need at least two values per sample.

mod ftest;
mod ks;
mod mwu;

pub use ftest::{f_cdf, f_variance_test, sample_variance};
pub use ks::{kolmogorov_q, ks_statistic, ks_two_sample};
pub use mwu::{exact_u_counts, mann_whitney_u, midranks, EXACT_MAX_TOTAL};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestKind {
    /// Mann-Whitney-Wilcoxon U.
    #[serde(rename = "u")]
    Mwu,
    /// Two-sample Kolmogorov-Smirnov.
    #[serde(rename = "ks")]
    Ks2,
    /// F-test for equality of variances.
    #[serde(rename = "f")]
    FVar,
}

impl TestKind {
    pub const ALL: [TestKind; 3] = [TestKind::Mwu, TestKind::Ks2, TestKind::FVar];

    /// Letter used in indicator names: `u`, `ks`, `f`.
    pub fn tag(self) -> &'static str {
        match self {
            TestKind::Mwu => "u",
            TestKind::Ks2 => "ks",
            TestKind::FVar => "f",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }

    /// Runs the test. A degenerate input (zero variance for the F-test) is
    /// returned as an error; see [`TestKind::p_value_or_one`].
    pub fn run(self, s1: &[f64], s2: &[f64]) -> Result<TestResult> {
        match self {
            TestKind::Mwu => mann_whitney_u(s1, s2),
            TestKind::Ks2 => ks_two_sample(s1, s2),
            TestKind::FVar => f_variance_test(s1, s2),
        }
    }

    /// p-value with degenerate inputs mapped to 1 (no evidence of change).
    pub fn p_value_or_one(self, s1: &[f64], s2: &[f64]) -> Result<f64> {
        match self.run(s1, s2) {
            Ok(r) => Ok(r.p_value),
            Err(Error::Degenerate(_)) => Ok(1.0),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

pub(crate) fn check_sizes(s1: &[f64], s2: &[f64]) -> Result<()> {
    if s1.len() < 2 || s2.len() < 2 {
        return Err(Error::invalid(format!(
            "two-sample test needs at least 2 values per sample, got {} and {}",
            s1.len(),
            s2.len()
        )));
    }
    Ok(())
}
