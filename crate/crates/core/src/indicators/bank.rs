use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::spec::{Aggregator, Grid, IndicatorSpec};
use crate::exec::Exec;
use crate::matrix::BinaryMatrix;
use crate::signal::{AnomalyClass, Signal};
use crate::stats::TestKind;
use crate::window::{binarize_p, moving_average, p_value_series};
use crate::{Error, Result};

/// Observations × indicator columns, with the recipe of every column.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix {
    pub matrix: BinaryMatrix,
    pub catalog: Vec<IndicatorSpec>,
    pub observation_ids: Vec<u64>,
    pub labels: Vec<AnomalyClass>,
}

/// Result of removing identical columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dedup {
    pub matrix: IndicatorMatrix,
    /// For each kept column (in output order): its index before dedup and
    /// the pre-dedup indices of the columns merged into it.
    pub groups: Vec<DuplicateGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateGroup {
    pub kept: usize,
    pub merged: Vec<usize>,
}

type SeriesKey = (usize, TestKind, usize);

/// Indicator row of one signal, cell `j` following `catalog[j]`.
///
/// When the (possibly smoothed) signal is shorter than a window length, no
/// window exists and every indicator of that series is 0.
pub fn indicator_row(signal: &[f64], catalog: &[IndicatorSpec]) -> Result<Vec<u8>> {
    let mut smoothed: HashMap<usize, Option<Vec<f64>>> = HashMap::new();
    let mut series: HashMap<SeriesKey, Vec<f64>> = HashMap::new();
    let mut bits: HashMap<(SeriesKey, u64), Vec<bool>> = HashMap::new();
    let mut row = Vec::with_capacity(catalog.len());
    for spec in catalog {
        let values = smoothed.entry(spec.smoothing).or_insert_with(|| {
            if spec.smoothing <= 1 {
                Some(signal.to_vec())
            } else {
                moving_average(signal, spec.smoothing).ok()
            }
        });
        let Some(values) = values.as_deref() else {
            row.push(0);
            continue;
        };
        let key = (spec.smoothing, spec.test, spec.tau);
        if let std::collections::hash_map::Entry::Vacant(e) = series.entry(key) {
            let p = if spec.tau <= values.len() {
                p_value_series(values, spec.test, spec.tau, spec.is_smoothed())?.p_values
            } else {
                Vec::new()
            };
            e.insert(p);
        }
        let b = match bits.entry((key, spec.level.to_bits())) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(binarize_p(&series[&key], spec.level)?),
        };
        row.push(spec.aggregator.apply(b) as u8);
    }
    Ok(row)
}

/// Builds the full (pre-dedup) indicator matrix, one row per signal in input
/// order.
pub fn build_matrix(signals: &[Signal], grid: &Grid) -> Result<IndicatorMatrix> {
    build_matrix_with(signals, grid, Exec::default())
}

pub fn build_matrix_with(signals: &[Signal], grid: &Grid, exec: Exec) -> Result<IndicatorMatrix> {
    if signals.is_empty() {
        return Err(Error::invalid("no signals to build indicators from"));
    }
    grid.validate()?;
    let catalog = grid.catalog();
    let rows = exec.map_slice(signals, |s| indicator_row(&s.values, &catalog));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(IndicatorMatrix {
        matrix: BinaryMatrix::from_rows(rows, catalog.len())?,
        catalog,
        observation_ids: signals.iter().map(|s| s.id).collect(),
        labels: signals.iter().map(|s| s.label).collect(),
    })
}

/// Keeps the first column of every group of identical columns.
pub fn dedup_columns(m: &IndicatorMatrix) -> Dedup {
    let columns = m.matrix.columns();
    let mut first: HashMap<&[u8], usize> = HashMap::new();
    let mut groups: Vec<DuplicateGroup> = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        match first.get(col.as_slice()) {
            Some(&g) => groups[g].merged.push(j),
            None => {
                first.insert(col, groups.len());
                groups.push(DuplicateGroup { kept: j, merged: Vec::new() });
            }
        }
    }
    let kept: Vec<usize> = groups.iter().map(|g| g.kept).collect();
    let matrix = IndicatorMatrix {
        matrix: m.matrix.select_cols(&kept),
        catalog: kept.iter().map(|&j| m.catalog[j].clone()).collect(),
        observation_ids: m.observation_ids.clone(),
        labels: m.labels.clone(),
    };
    Dedup { matrix, groups }
}

impl IndicatorMatrix {
    pub fn label_codes(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.index()).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.catalog.iter().map(|s| s.name()).collect()
    }
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

const MATRIX_MAGIC: &[u8; 4] = b"ANIM";
const MATRIX_VERSION: u32 = 1;
const CATALOG_HEADER: &str = "index\tname\ttest\ttau\tlevel\tsmoothing\taggregator\tbeta\tdelta\tl\tk";

pub const CATALOG_FILE: &str = "catalog.tsv";
pub const MATRIX_FILE: &str = "matrix.bin";
pub const LABELS_FILE: &str = "labels.csv";
pub const DUPLICATES_FILE: &str = "duplicates.tsv";
pub const MATRIX_CSV_FILE: &str = "matrix.csv";

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?))
}

pub fn write_catalog<W: Write>(catalog: &[IndicatorSpec], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CATALOG_HEADER}")?;
    for (i, s) in catalog.iter().enumerate() {
        let (beta, delta, l, k) = match s.aggregator {
            Aggregator::Simple => (String::new(), String::new(), String::new(), String::new()),
            Aggregator::GlobalRatio { beta, delta } | Aggregator::ConsecutiveRatio { beta, delta } => {
                (beta.to_string(), delta.to_string(), String::new(), String::new())
            }
            Aggregator::LocalRatio { l, k, delta } => (String::new(), delta.to_string(), l.to_string(), k.to_string()),
        };
        writeln!(
            out,
            "{i}\t{}\t{}\t{}\t{}\t{}\t{}\t{beta}\t{delta}\t{l}\t{k}",
            s.name(),
            s.test.tag(),
            s.tau,
            s.level,
            s.smoothing,
            s.aggregator.tag()
        )?;
    }
    out.flush()
}

pub fn read_catalog<R: Read>(input: R, path: &Path) -> Result<Vec<IndicatorSpec>> {
    let mut text = String::new();
    BufReader::new(input).read_to_string(&mut text).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(CATALOG_HEADER) {
        return Err(Error::format(path, "missing catalog header"));
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let bad = |what: &str| Error::format(path, format!("line {}: {what}", n + 2));
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 11 {
            return Err(bad("expected 11 fields"));
        }
        let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| bad(what));
        let float = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
        let test = TestKind::from_tag(f[2]).ok_or_else(|| bad("test"))?;
        let aggregator = match f[6] {
            "simple" => Aggregator::Simple,
            "global" => Aggregator::GlobalRatio { beta: float(f[7], "beta")?, delta: num(f[8], "delta")? },
            "consecutive" => Aggregator::ConsecutiveRatio { beta: float(f[7], "beta")?, delta: num(f[8], "delta")? },
            "local" => Aggregator::LocalRatio { l: num(f[9], "l")?, k: num(f[10], "k")?, delta: num(f[8], "delta")? },
            _ => return Err(bad("aggregator")),
        };
        let spec = IndicatorSpec {
            test,
            tau: num(f[3], "tau")?,
            level: float(f[4], "level")?,
            smoothing: num(f[5], "smoothing")?,
            aggregator,
        };
        if spec.name() != f[1] {
            return Err(bad("name does not match parameters"));
        }
        out.push(spec);
    }
    Ok(out)
}

pub fn write_matrix_bin<W: Write>(m: &BinaryMatrix, mut out: W) -> std::io::Result<()> {
    out.write_all(MATRIX_MAGIC)?;
    out.write_all(&MATRIX_VERSION.to_le_bytes())?;
    out.write_all(&(m.rows() as u64).to_le_bytes())?;
    out.write_all(&(m.cols() as u64).to_le_bytes())?;
    out.write_all(m.as_raw())?;
    out.flush()
}

pub fn read_matrix_bin<R: Read>(mut input: R, path: &Path) -> Result<BinaryMatrix> {
    let mut head = [0u8; 24];
    input.read_exact(&mut head).map_err(|e| Error::io(path, e))?;
    if &head[..4] != MATRIX_MAGIC {
        return Err(Error::format(path, "bad magic"));
    }
    if u32::from_le_bytes(head[4..8].try_into().unwrap()) != MATRIX_VERSION {
        return Err(Error::format(path, "unsupported version"));
    }
    let rows = u64::from_le_bytes(head[8..16].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(head[16..24].try_into().unwrap()) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    input.read_to_end(&mut data).map_err(|e| Error::io(path, e))?;
    BinaryMatrix::from_raw(rows, cols, data).map_err(|e| Error::format(path, e.to_string()))
}

impl IndicatorMatrix {
    /// Writes catalog, binary matrix, labels and a named CSV export into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let p = dir.join(CATALOG_FILE);
        write_catalog(&self.catalog, create(&p)?).map_err(|e| Error::io(&p, e))?;
        let p = dir.join(MATRIX_FILE);
        write_matrix_bin(&self.matrix, create(&p)?).map_err(|e| Error::io(&p, e))?;

        let mut w = csv::Writer::from_writer(create(&dir.join(LABELS_FILE))?);
        w.write_record(["id", "label"])?;
        for (id, l) in self.observation_ids.iter().zip(&self.labels) {
            w.write_record([id.to_string(), l.code().to_string()])?;
        }
        w.flush().map_err(|e| Error::io(dir.join(LABELS_FILE), e))?;

        let mut w = csv::Writer::from_writer(create(&dir.join(MATRIX_CSV_FILE))?);
        let mut header = vec!["id".to_string(), "label".to_string()];
        header.extend(self.names());
        w.write_record(&header)?;
        for i in 0..self.matrix.rows() {
            let mut rec = vec![self.observation_ids[i].to_string(), self.labels[i].code().to_string()];
            rec.extend(self.matrix.row(i).iter().map(|b| b.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(dir.join(MATRIX_CSV_FILE), e))?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let p = dir.join(CATALOG_FILE);
        let catalog = read_catalog(open(&p)?, &p)?;
        let p = dir.join(MATRIX_FILE);
        let matrix = read_matrix_bin(open(&p)?, &p)?;
        let p = dir.join(LABELS_FILE);
        let mut r = csv::Reader::from_reader(open(&p)?);
        let mut observation_ids = Vec::new();
        let mut labels = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let id = rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| Error::format(&p, "id"))?;
            let label = rec
                .get(1)
                .and_then(|s| s.parse().ok())
                .and_then(AnomalyClass::from_code)
                .ok_or_else(|| Error::format(&p, "label"))?;
            observation_ids.push(id);
            labels.push(label);
        }
        if matrix.cols() != catalog.len() || matrix.rows() != labels.len() {
            return Err(Error::format(dir, "catalog, matrix and labels disagree in shape"));
        }
        Ok(IndicatorMatrix { matrix, catalog, observation_ids, labels })
    }
}

/// Writes `kept_name <TAB> merged names…` per group that absorbed duplicates.
pub fn write_duplicates<W: Write>(
    groups: &[DuplicateGroup],
    catalog: &[IndicatorSpec],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "kept\tmerged")?;
    for g in groups.iter().filter(|g| !g.merged.is_empty()) {
        let merged: Vec<String> = g.merged.iter().map(|&j| catalog[j].name()).collect();
        writeln!(out, "{}\t{}", catalog[g.kept].name(), merged.join("\t"))?;
    }
    out.flush()
}
