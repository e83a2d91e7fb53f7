use std::path::{Path, PathBuf};

use anomind::classify::{ClassifierKind, ForestParams};
use anomind::eval::SplitConfig;
use anomind::indicators::Grid;
use anomind::{DatasetSpec, DatasetVariant};
use serde::{Deserialize, Serialize};

use crate::exit::{Failure, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierChoice {
    Nb,
    Rf,
    Both,
}

impl ClassifierChoice {
    pub fn kinds(self) -> Vec<ClassifierKind> {
        match self {
            ClassifierChoice::Nb => vec![ClassifierKind::NaiveBayes],
            ClassifierChoice::Rf => vec![ClassifierKind::RandomForest],
            ClassifierChoice::Both => vec![ClassifierKind::RandomForest, ClassifierKind::NaiveBayes],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub data: u64,
    pub split: u64,
    pub forest: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds { data: 1, split: 2, forest: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Counts {
    pub normal: usize,
    pub per_anomaly: usize,
}

impl Default for Counts {
    fn default() -> Self {
        Counts { normal: 3000, per_anomaly: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub mtry: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig { n_trees: 500, mtry: None }
    }
}

/// Everything that determines a run. Loaded from TOML, then overridden by
/// command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetVariant,
    pub classifier: ClassifierChoice,
    /// Upper bound on the selected number of indicators.
    pub max_k: usize,
    /// Length of the forward-selection curves.
    pub curve_k: usize,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub seeds: Seeds,
    pub counts: Counts,
    pub split: SplitConfig,
    pub forest: ForestConfig,
    pub grid: Grid,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: DatasetVariant::A,
            classifier: ClassifierChoice::Both,
            max_k: 30,
            curve_k: 100,
            out: PathBuf::from("run"),
            threads: None,
            seeds: Seeds::default(),
            counts: Counts::default(),
            split: SplitConfig::default(),
            forest: ForestConfig::default(),
            grid: Grid::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serialises")
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::new(Kind::Io, format!("reading config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| Failure::new(Kind::Validation, format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::new(Kind::Validation, m));
        self.grid.validate().map_err(|e| Failure::new(Kind::Validation, e.to_string()))?;
        if self.max_k == 0 {
            return bad("max_k must be at least 1".into());
        }
        if self.curve_k < self.max_k {
            return bad(format!("curve_k ({}) must be at least max_k ({})", self.curve_k, self.max_k));
        }
        if self.forest.n_trees == 0 {
            return bad("forest needs at least one tree".into());
        }
        if self.forest.mtry == Some(0) {
            return bad("mtry must be at least 1".into());
        }
        if self.counts.normal == 0 || self.counts.per_anomaly == 0 {
            return bad("every class needs at least one signal".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn dataset_spec(&self) -> DatasetSpec {
        DatasetSpec {
            variant: self.dataset,
            count_normal: self.counts.normal,
            count_per_anomaly: self.counts.per_anomaly,
            seed: self.seeds.data,
        }
    }

    pub fn forest_params(&self) -> ForestParams {
        ForestParams { n_trees: self.forest.n_trees, mtry: self.forest.mtry, seed: self.seeds.forest }
    }
}
