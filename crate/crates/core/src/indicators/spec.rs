use serde::{Deserialize, Serialize};

use super::aggregate;
use crate::stats::TestKind;
use crate::{Error, Result};

/// How a bit series over windows becomes one indicator bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Aggregator {
    Simple,
    GlobalRatio { beta: f64, delta: usize },
    ConsecutiveRatio { beta: f64, delta: usize },
    LocalRatio { l: usize, k: usize, delta: usize },
}

impl Aggregator {
    pub fn tag(&self) -> &'static str {
        match self {
            Aggregator::Simple => "simple",
            Aggregator::GlobalRatio { .. } => "global",
            Aggregator::ConsecutiveRatio { .. } => "consecutive",
            Aggregator::LocalRatio { .. } => "local",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        match *self {
            Aggregator::Simple => Ok(()),
            Aggregator::GlobalRatio { beta, delta } | Aggregator::ConsecutiveRatio { beta, delta } => {
                if !(beta > 0.0 && beta < 1.0) {
                    return bad(format!("fraction {beta} outside (0, 1)"));
                }
                if delta == 0 {
                    return bad("jump must be at least 1".into());
                }
                Ok(())
            }
            Aggregator::LocalRatio { l, k, delta } => {
                if k == 0 || k > l {
                    return bad(format!("local ratio needs 1 ≤ k ≤ l, got k={k} l={l}"));
                }
                if delta == 0 {
                    return bad("jump must be at least 1".into());
                }
                Ok(())
            }
        }
    }

    /// Applies the aggregator to a stride-1 bit series. An empty series (no
    /// window fits the signal) gives 0.
    pub fn apply(&self, bits: &[bool]) -> bool {
        if bits.is_empty() {
            return false;
        }
        match *self {
            Aggregator::Simple => bits.iter().any(|&b| b),
            Aggregator::GlobalRatio { beta, delta } => aggregate::global_ratio(bits, beta, delta),
            Aggregator::ConsecutiveRatio { beta, delta } => aggregate::consecutive_ratio(bits, beta, delta),
            Aggregator::LocalRatio { l, k, delta } => aggregate::local_ratio(bits, l, k, delta),
        }
    }

    fn delta(&self) -> Option<usize> {
        match *self {
            Aggregator::Simple => None,
            Aggregator::GlobalRatio { delta, .. }
            | Aggregator::ConsecutiveRatio { delta, .. }
            | Aggregator::LocalRatio { delta, .. } => Some(delta),
        }
    }
}

/// Full recipe for one binary indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSpec {
    pub test: TestKind,
    pub tau: usize,
    pub level: f64,
    /// Moving-average width applied before testing; 1 means raw.
    pub smoothing: usize,
    pub aggregator: Aggregator,
}

impl IndicatorSpec {
    pub fn is_smoothed(&self) -> bool {
        self.smoothing > 1
    }

    /// Short label in the style of an explanation table: `u test`,
    /// `confu(2,3)`, `ratef(0.1)`, `lseqks(0.3)`.
    pub fn short_name(&self) -> String {
        let t = self.test.tag();
        match self.aggregator {
            Aggregator::Simple => format!("{t} test"),
            Aggregator::GlobalRatio { beta, .. } => format!("rate{t}({beta})"),
            Aggregator::ConsecutiveRatio { beta, .. } => format!("lseq{t}({beta})"),
            Aggregator::LocalRatio { l, k, .. } => format!("conf{t}({k},{l})"),
        }
    }

    /// Short label followed by the window, level, jump and smoothing fields,
    /// e.g. `confu(2,3)[tau=30,level=0.005,delta=1,ma=1]`.
    pub fn name(&self) -> String {
        let delta = self.aggregator.delta().map(|d| format!(",delta={d}")).unwrap_or_default();
        format!("{}[tau={},level={}{delta},ma={}]", self.short_name(), self.tau, self.level, self.smoothing)
    }
}

/// Parameter grid spanning the indicator bank. Defaults are the standard
/// 3 tests × 3 window lengths × 3 levels × 3 jumps × 3 fractions × 3 (l, k)
/// pairs, on raw and 5-point smoothed signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Grid {
    pub tests: Vec<TestKind>,
    pub taus: Vec<usize>,
    pub levels: Vec<f64>,
    pub deltas: Vec<usize>,
    pub betas: Vec<f64>,
    pub local_pairs: Vec<(usize, usize)>,
    /// Moving-average widths; 1 is the raw signal.
    pub smoothing: Vec<usize>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            tests: TestKind::ALL.to_vec(),
            taus: vec![30, 50, 100],
            levels: vec![0.005, 0.1, 0.5],
            deltas: vec![1, 5, 10],
            betas: vec![0.1, 0.3, 0.5],
            local_pairs: vec![(3, 2), (5, 3), (5, 4)],
            smoothing: vec![1, 5],
        }
    }
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        if self.tests.is_empty() || self.taus.is_empty() || self.levels.is_empty() || self.smoothing.is_empty() {
            return bad("grid needs at least one test, window length, level and smoothing width".into());
        }
        for &tau in &self.taus {
            if tau < 4 || tau % 2 != 0 {
                return bad(format!("window length {tau} must be even and ≥ 4"));
            }
        }
        for &level in &self.levels {
            if !(level > 0.0 && level < 1.0) {
                return bad(format!("level {level} outside (0, 1)"));
            }
        }
        for &w in &self.smoothing {
            if w == 0 || w % 2 == 0 {
                return bad(format!("smoothing width {w} must be odd"));
            }
        }
        for a in self.derived() {
            a.validate()?;
        }
        Ok(())
    }

    fn sorted<T: Copy + PartialOrd>(v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        out.sort_by(|a, b| a.partial_cmp(b).expect("grid values are comparable"));
        out.dedup();
        out
    }

    /// Derived aggregators for one bit series, ordered by kind then
    /// parameters.
    pub fn derived(&self) -> Vec<Aggregator> {
        let deltas = Self::sorted(&self.deltas);
        let betas = Self::sorted(&self.betas);
        let pairs = Self::sorted(&self.local_pairs);
        let mut out = Vec::new();
        for &beta in &betas {
            for &delta in &deltas {
                out.push(Aggregator::GlobalRatio { beta, delta });
            }
        }
        for &beta in &betas {
            for &delta in &deltas {
                out.push(Aggregator::ConsecutiveRatio { beta, delta });
            }
        }
        for &(l, k) in &pairs {
            for &delta in &deltas {
                out.push(Aggregator::LocalRatio { l, k, delta });
            }
        }
        out
    }

    /// All indicators, ordered by (smoothing, test, τ, level, aggregator).
    pub fn catalog(&self) -> Vec<IndicatorSpec> {
        let derived = self.derived();
        let mut out = Vec::new();
        for &smoothing in &Self::sorted(&self.smoothing) {
            for &test in &Self::sorted(&self.tests) {
                for &tau in &Self::sorted(&self.taus) {
                    for &level in &Self::sorted(&self.levels) {
                        let series = IndicatorSpec { test, tau, level, smoothing, aggregator: Aggregator::Simple };
                        out.push(series.clone());
                        out.extend(derived.iter().map(|&aggregator| IndicatorSpec { aggregator, ..series.clone() }));
                    }
                }
            }
        }
        out
    }

    /// Number of distinct (test, τ, level) bit series per smoothing width.
    pub fn series_per_smoothing(&self) -> usize {
        Self::sorted(&self.tests).len() * Self::sorted(&self.taus).len() * Self::sorted(&self.levels).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_counts() {
        let g = Grid::default();
        g.validate().unwrap();
        assert_eq!(g.derived().len(), 27);
        let cat = g.catalog();
        assert_eq!(cat.len(), 1512);
        let per_variant = cat.iter().filter(|s| !s.is_smoothed()).count();
        assert_eq!(per_variant, 756);
        let simple = cat.iter().filter(|s| !s.is_smoothed() && s.aggregator == Aggregator::Simple).count();
        assert_eq!(simple, 27);
    }

    #[test]
    fn names_are_unique() {
        let cat = Grid::default().catalog();
        let names: std::collections::HashSet<_> = cat.iter().map(|s| s.name()).collect();
        assert_eq!(names.len(), cat.len());
    }

    #[test]
    fn naming_scheme() {
        let base =
            IndicatorSpec { test: TestKind::Mwu, tau: 30, level: 0.005, smoothing: 1, aggregator: Aggregator::Simple };
        assert_eq!(base.name(), "u test[tau=30,level=0.005,ma=1]");
        let conf = IndicatorSpec { aggregator: Aggregator::LocalRatio { l: 3, k: 2, delta: 5 }, ..base.clone() };
        assert_eq!(conf.short_name(), "confu(2,3)");
        assert!(conf.name().starts_with("confu(2,3)[tau=30,level=0.005,delta=5"));
        let rate = IndicatorSpec {
            test: TestKind::FVar,
            aggregator: Aggregator::GlobalRatio { beta: 0.1, delta: 1 },
            ..base.clone()
        };
        assert!(rate.name().starts_with("ratef(0.1)"));
        let lseq = IndicatorSpec {
            test: TestKind::FVar,
            aggregator: Aggregator::ConsecutiveRatio { beta: 0.3, delta: 1 },
            ..base.clone()
        };
        assert!(lseq.name().starts_with("lseqf(0.3)"));
        let ks = IndicatorSpec { test: TestKind::Ks2, smoothing: 5, ..base };
        assert_eq!(ks.name(), "ks test[tau=30,level=0.005,ma=5]");
    }

    #[test]
    fn invalid_grids() {
        for g in [
            Grid { taus: vec![31], ..Grid::default() },
            Grid { local_pairs: vec![(3, 4)], ..Grid::default() },
            Grid { betas: vec![1.0], ..Grid::default() },
        ] {
            assert!(g.validate().is_err());
        }
    }
}
