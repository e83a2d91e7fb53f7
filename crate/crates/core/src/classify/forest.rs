//! Random forest on 0/1 features.
//!
//! Each tree is grown on a bootstrap resample of the training rows. At every
//! node `mtry` candidate columns are drawn without replacement and the split
//! with the largest Gini decrease is kept; if none of them separates the
//! node, further columns are drawn until one does or all are exhausted.
//! Trees grow until nodes are pure or cannot be split.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::argmax_lowest;
use super::naive_bayes::MODEL_VERSION;
use crate::exec::Exec;
use crate::matrix::BinaryMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Candidate columns per split; `None` means `⌊√p⌋`.
    pub mtry: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 500, mtry: None, seed: 0 }
    }
}

impl ForestParams {
    pub fn mtry_for(&self, n_features: usize) -> usize {
        self.mtry.unwrap_or_else(|| (n_features as f64).sqrt().floor() as usize).clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Node {
    /// Rows with `x[column] = 0` go to `zero`, others to `one`.
    Split {
        column: usize,
        zero: usize,
        one: usize,
    },
    Leaf {
        class: usize,
    },
}

/// Flat node array; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, row: &[u8]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split { column, zero, one } => at = if row[column] == 1 { one } else { zero },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, at: usize) -> usize {
            match t.nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { zero, one, .. } => 1 + go(t, zero).max(go(t, one)),
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub n_classes: usize,
    pub n_features: usize,
    pub params: ForestParams,
    /// Out-of-bag accuracy; `None` when no row was ever out of bag.
    pub oob_accuracy: Option<f64>,
}

struct Grown {
    tree: Tree,
    in_bag: Vec<bool>,
}

fn class_counts(samples: &[usize], y: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &s in samples {
        counts[y[s]] += 1;
    }
    counts
}

/// `Σ_c n_c² / n`, larger for purer nodes. Maximising the sum over both
/// children is equivalent to maximising the Gini decrease.
fn purity(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    counts.iter().map(|&c| (c * c) as f64).sum::<f64>() / n as f64
}

fn grow_tree(x: &BinaryMatrix, y: &[usize], n_classes: usize, mtry: usize, rng: &mut ChaCha8Rng) -> Grown {
    let n = x.rows();
    let p = x.cols();
    let samples: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut in_bag = vec![false; n];
    for &s in &samples {
        in_bag[s] = true;
    }

    let mut nodes: Vec<Node> = vec![Node::Leaf { class: 0 }];
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, samples)];
    let mut perm: Vec<usize> = (0..p).collect();
    let mut ones = vec![0usize; n_classes];

    while let Some((at, rows)) = stack.pop() {
        let counts = class_counts(&rows, y, n_classes);
        let majority = argmax_lowest(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>());
        if counts.iter().filter(|&&c| c > 0).count() <= 1 {
            nodes[at] = Node::Leaf { class: majority };
            continue;
        }

        let mut best: Option<(usize, f64)> = None;
        let mut drawn = 0;
        while drawn < p && (drawn < mtry || best.is_none()) {
            let pick = rng.random_range(drawn..p);
            perm.swap(drawn, pick);
            let col = perm[drawn];
            drawn += 1;

            ones.iter_mut().for_each(|c| *c = 0);
            let mut n_one = 0;
            for &r in &rows {
                if x.get(r, col) == 1 {
                    ones[y[r]] += 1;
                    n_one += 1;
                }
            }
            let n_zero = rows.len() - n_one;
            if n_one == 0 || n_zero == 0 {
                continue;
            }
            let zeros: Vec<usize> = counts.iter().zip(&ones).map(|(a, b)| a - b).collect();
            let score = purity(&ones, n_one) + purity(&zeros, n_zero);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((col, score));
            }
        }

        let Some((column, _)) = best else {
            nodes[at] = Node::Leaf { class: majority };
            continue;
        };
        let (one_rows, zero_rows): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| x.get(r, column) == 1);
        let zero = nodes.len();
        let one = zero + 1;
        nodes.push(Node::Leaf { class: 0 });
        nodes.push(Node::Leaf { class: 0 });
        nodes[at] = Node::Split { column, zero, one };
        stack.push((one, one_rows));
        stack.push((zero, zero_rows));
    }
    Grown { tree: Tree { nodes }, in_bag }
}

impl Forest {
    pub fn fit(x: &BinaryMatrix, y: &[usize], n_classes: usize, params: &ForestParams, exec: Exec) -> Result<Self> {
        if x.rows() != y.len() || x.rows() == 0 {
            return Err(Error::invalid(format!("{} rows but {} labels", x.rows(), y.len())));
        }
        if x.cols() == 0 {
            return Err(Error::invalid("forest needs at least one feature"));
        }
        if params.n_trees == 0 {
            return Err(Error::invalid("forest needs at least one tree"));
        }
        if let Some(&c) = y.iter().find(|&&c| c >= n_classes) {
            return Err(Error::invalid(format!("label {c} outside 0..{n_classes}")));
        }
        let mtry = params.mtry_for(x.cols());
        let grown = exec.map_range(params.n_trees, |t| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(t as u64);
            grow_tree(x, y, n_classes, mtry, &mut rng)
        });

        let mut votes = vec![vec![0usize; n_classes]; x.rows()];
        for g in &grown {
            for (i, v) in votes.iter_mut().enumerate() {
                if !g.in_bag[i] {
                    v[g.tree.predict(x.row(i))] += 1;
                }
            }
        }
        let mut seen = 0;
        let mut correct = 0;
        for (v, &truth) in votes.iter().zip(y) {
            if v.iter().any(|&c| c > 0) {
                seen += 1;
                correct += (vote_winner(v) == truth) as usize;
            }
        }
        let oob_accuracy = (seen > 0).then(|| correct as f64 / seen as f64);

        Ok(Forest {
            trees: grown.into_iter().map(|g| g.tree).collect(),
            n_classes,
            n_features: x.cols(),
            params: params.clone(),
            oob_accuracy,
        })
    }

    /// Plurality vote over trees, lowest class code on ties.
    pub fn predict(&self, row: &[u8]) -> Result<usize> {
        if row.len() != self.n_features {
            return Err(Error::invalid(format!("row has {} cells, forest expects {}", row.len(), self.n_features)));
        }
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict(row)] += 1;
        }
        Ok(vote_winner(&votes))
    }

    pub fn predict_matrix(&self, x: &BinaryMatrix, exec: Exec) -> Result<Vec<usize>> {
        exec.map_range(x.rows(), |i| self.predict(x.row(i))).into_iter().collect()
    }

    pub fn save_json<W: Write>(&self, columns: &[String], out: W) -> Result<()> {
        let file =
            RfFile { format: RF_FORMAT.into(), version: MODEL_VERSION, columns: columns.to_vec(), model: self.clone() };
        serde_json::to_writer(out, &file)?;
        Ok(())
    }

    pub fn load_json<R: std::io::Read>(input: R) -> Result<(Self, Vec<String>)> {
        let file: RfFile = serde_json::from_reader(input)?;
        if file.format != RF_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::invalid(format!("unsupported model file {} v{}", file.format, file.version)));
        }
        for t in &file.model.trees {
            for node in &t.nodes {
                if let Node::Split { column, zero, one } = *node {
                    if column >= file.model.n_features || zero >= t.nodes.len() || one >= t.nodes.len() {
                        return Err(Error::invalid("tree node out of range"));
                    }
                }
            }
        }
        Ok((file.model, file.columns))
    }
}

fn vote_winner(votes: &[usize]) -> usize {
    let mut best = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = c;
        }
    }
    best
}

const RF_FORMAT: &str = "anomind-random-forest";

#[derive(Serialize, Deserialize)]
struct RfFile {
    format: String,
    version: u32,
    columns: Vec<String>,
    model: Forest,
}
