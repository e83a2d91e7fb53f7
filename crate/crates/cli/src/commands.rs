use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anomind::classify::{explain_table, ClassifierKind, Model};
use anomind::eval::{make_split, Experiment, SplitPlan, Tables};
use anomind::indicators::{build_matrix_with, dedup_columns, write_catalog, write_duplicates, IndicatorMatrix};
use anomind::select::Selection;
use anomind::signal::gen_dataset_with;
use anomind::{dataset_io, AnomalyClass, Exec};
use anyhow::Context as _;
use log::info;
use serde::Serialize;

use crate::config::RunConfig;
use crate::exit::{Failure, Kind};

pub const DATASET_FILE: &str = "dataset.csv";
pub const INDICATOR_DIR: &str = "indicators";
pub const FULL_CATALOG_FILE: &str = "catalog_full.tsv";
pub const SELECTION_DIR: &str = "selection";
pub const MODEL_DIR: &str = "models";
pub const REPORT_DIR: &str = "reports";
pub const RESULTS_FILE: &str = "results.json";
pub const SPLIT_FILE: &str = "split.json";

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    counts: &'a BTreeMap<String, serde_json::Value>,
    timings_seconds: &'a BTreeMap<String, f64>,
    outputs: Vec<String>,
}

/// State shared by the stages of one invocation.
pub struct Context {
    pub cfg: RunConfig,
    command: &'static str,
    exec: Exec,
    counts: BTreeMap<String, serde_json::Value>,
    timings: BTreeMap<String, f64>,
    outputs: Vec<PathBuf>,
}

impl Context {
    pub fn new(cfg: RunConfig, command: &'static str) -> anyhow::Result<Self> {
        fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
        Ok(Context {
            cfg,
            command,
            exec: Exec::default(),
            counts: BTreeMap::new(),
            timings: BTreeMap::new(),
            outputs: Vec::new(),
        })
    }

    fn path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.cfg.out.join(rel)
    }

    fn dir(&self, rel: &str) -> anyhow::Result<PathBuf> {
        let d = self.path(rel);
        fs::create_dir_all(&d).with_context(|| format!("creating {}", d.display()))?;
        Ok(d)
    }

    fn count(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.counts.insert(key.to_string(), value.into());
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> anyhow::Result<T>) -> anyhow::Result<T> {
        let t = Instant::now();
        let out = f(self)?;
        let secs = t.elapsed().as_secs_f64();
        info!("{stage}: {secs:.2}s");
        self.timings.insert(stage.to_string(), secs);
        Ok(out)
    }

    fn wrote(&mut self, p: PathBuf) {
        self.outputs.push(p);
    }

    /// Writes the effective configuration and the run manifest.
    pub fn finish(mut self) -> anyhow::Result<()> {
        let cfg_path = self.path("config.toml");
        fs::write(&cfg_path, self.cfg.to_toml()).map_err(|e| io_fail(&cfg_path, e))?;
        self.wrote(cfg_path);
        let path = self.path(format!("manifest-{}.json", self.command));
        let outputs =
            self.outputs.iter().map(|p| p.strip_prefix(&self.cfg.out).unwrap_or(p).display().to_string()).collect();
        let manifest = Manifest {
            tool: "anomind",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            config: &self.cfg,
            counts: &self.counts,
            timings_seconds: &self.timings,
            outputs,
        };
        let mut w = create(&path)?;
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w).map_err(|e| io_fail(&path, e))?;
        w.flush().map_err(|e| io_fail(&path, e))?;
        info!("manifest written to {}", path.display());
        Ok(())
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(Kind::Io, format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| io_fail(path, e))
}

fn require(path: &Path, what: &str, stage: &str) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::new(Kind::Io, format!("{what} not found at {} (run `anomind {stage}` first)", path.display())))
    }
}

pub fn generate(ctx: &mut Context) -> anyhow::Result<()> {
    let spec = ctx.cfg.dataset_spec();
    let exec = ctx.exec;
    let signals = ctx.timed("generate", |_| Ok(gen_dataset_with(&spec, exec)))?;
    let path = ctx.path(DATASET_FILE);
    dataset_io::save(&signals, &path)?;
    info!("{} signals of data set {} written to {}", signals.len(), spec.variant, path.display());
    ctx.count("signals", signals.len());
    ctx.wrote(path);
    Ok(())
}

pub fn indicators(ctx: &mut Context) -> anyhow::Result<()> {
    let path = ctx.path(DATASET_FILE);
    require(&path, "dataset", "generate")?;
    let signals = dataset_io::load(&path)?;
    let grid = ctx.cfg.grid.clone();
    let exec = ctx.exec;
    let full = ctx.timed("indicators", |_| Ok(build_matrix_with(&signals, &grid, exec)?))?;
    info!("{} columns before dedup", full.matrix.cols());
    let dedup = ctx.timed("dedup", |_| Ok(dedup_columns(&full)))?;
    info!("{} columns after dedup", dedup.matrix.matrix.cols());
    ctx.count("columns_before_dedup", full.matrix.cols());
    ctx.count("columns_after_dedup", dedup.matrix.matrix.cols());

    let dir = ctx.dir(INDICATOR_DIR)?;
    dedup.matrix.save(&dir)?;
    let p = dir.join(FULL_CATALOG_FILE);
    write_catalog(&full.catalog, create(&p)?).map_err(|e| io_fail(&p, e))?;
    let p = dir.join(anomind::indicators::DUPLICATES_FILE);
    write_duplicates(&dedup.groups, &full.catalog, create(&p)?).map_err(|e| io_fail(&p, e))?;
    ctx.wrote(dir);
    Ok(())
}

fn load_matrix(ctx: &Context) -> anyhow::Result<IndicatorMatrix> {
    let dir = ctx.path(INDICATOR_DIR);
    require(&dir.join(anomind::indicators::MATRIX_FILE), "indicator matrix", "indicators")?;
    Ok(IndicatorMatrix::load(&dir)?)
}

fn split(ctx: &mut Context, data: &IndicatorMatrix) -> anyhow::Result<SplitPlan> {
    let plan = make_split(&data.labels, &ctx.cfg.split, ctx.cfg.seeds.split)?;
    ctx.count("train_rows", plan.train.len());
    ctx.count("test_rows", plan.test.len());
    let p = ctx.path(SPLIT_FILE);
    serde_json::to_writer(create(&p)?, &plan)?;
    ctx.wrote(p);
    Ok(plan)
}

fn rank(ctx: &mut Context, exp: &Experiment) -> anyhow::Result<Selection> {
    let k = ctx.cfg.curve_k.min(exp.n_columns());
    let ranking = ctx.timed("mrmr", |_| Ok(exp.rank(k)?))?;
    let dir = ctx.dir(SELECTION_DIR)?;
    let p = dir.join("mrmr.csv");
    ranking.write_trace(&exp.data.names(), create(&p)?)?;
    info!("mRMR ranked {} of {} columns on {} training rows", ranking.len(), exp.n_columns(), exp.split.train.len());
    ctx.count("ranked_columns", ranking.len());
    ctx.wrote(p);
    Ok(ranking)
}

pub fn select(ctx: &mut Context) -> anyhow::Result<()> {
    let data = load_matrix(ctx)?;
    let plan = split(ctx, &data)?;
    let exp = Experiment::new(&data, plan, ctx.cfg.forest_params(), ctx.exec)?;
    rank(ctx, &exp)?;
    Ok(())
}

fn save_model(ctx: &mut Context, model: &Model, names: &[String], file: &str) -> anyhow::Result<()> {
    let dir = ctx.dir(MODEL_DIR)?;
    let p = dir.join(file);
    let mut w = create(&p)?;
    match model {
        Model::NaiveBayes(m) => m.save_json(names, &mut w)?,
        Model::Forest(m) => m.save_json(names, &mut w)?,
    }
    w.flush().map_err(|e| io_fail(&p, e))?;
    ctx.wrote(p);
    Ok(())
}

pub fn evaluate(ctx: &mut Context) -> anyhow::Result<()> {
    let data = load_matrix(ctx)?;
    let plan = split(ctx, &data)?;
    let exp = Experiment::new(&data, plan, ctx.cfg.forest_params(), ctx.exec)?;
    let names = data.names();
    let ranking = rank(ctx, &exp)?;
    let curve_k = ranking.len();
    let max_k = ctx.cfg.max_k.min(curve_k);

    let mut tables = Tables { dataset: ctx.cfg.dataset.to_string(), ..Default::default() };
    for kind in ctx.cfg.classifier.kinds() {
        let tag = kind.tag();
        let full = ctx.timed(&format!("{tag}_full"), |_| Ok(exp.run_full(kind)?))?;
        info!("{tag}, all {} columns: test mean {:.4} (sd {:.4})", full.columns.len(), full.slice_mean, full.slice_sd);
        let model = exp.fit(kind, &full.columns)?;
        save_model(ctx, &model, &names, &format!("{tag}_full.json"))?;

        let run = ctx.timed(&format!("{tag}_forward"), |_| Ok(exp.run_forward(kind, &ranking, curve_k, max_k)?))?;
        let best = run.best();
        info!("{tag}, K*={}: test mean {:.4} (sd {:.4})", run.k_star, best.slice_mean, best.slice_sd);
        let selected: Vec<String> = best.columns.iter().map(|&j| names[j].clone()).collect();
        let model = exp.fit(kind, &best.columns)?;
        save_model(ctx, &model, &selected, &format!("{tag}_selected.json"))?;
        ctx.count(&format!("{tag}_k_star"), run.k_star);

        match kind {
            ClassifierKind::RandomForest => {
                tables.rf_full = Some(full);
                tables.rf_forward = Some(run);
            }
            ClassifierKind::NaiveBayes => {
                let nb = exp.naive_bayes(&best.columns)?;
                let class_names: Vec<String> = AnomalyClass::ALL.iter().map(|c| c.short_name().to_string()).collect();
                tables.explanation = Some(explain_table(&nb, &selected, &class_names, true)?);
                tables.nb_full = Some(full);
                tables.nb_forward = Some(run);
            }
        }
    }
    write_reports(ctx, &tables)?;
    Ok(())
}

fn write_reports(ctx: &mut Context, tables: &Tables) -> anyhow::Result<()> {
    let dir = ctx.dir(REPORT_DIR)?;
    let p = dir.join(RESULTS_FILE);
    let mut w = create(&p)?;
    serde_json::to_writer(&mut w, tables)?;
    w.flush().map_err(|e| io_fail(&p, e))?;
    ctx.wrote(p);
    for p in tables.write_dir(&dir)? {
        ctx.wrote(p);
    }
    print!("{}", tables.to_text());
    Ok(())
}

pub fn report(ctx: &mut Context) -> anyhow::Result<()> {
    let p = ctx.path(REPORT_DIR).join(RESULTS_FILE);
    require(&p, "evaluation results", "evaluate")?;
    let text = fs::read_to_string(&p).map_err(|e| io_fail(&p, e))?;
    let tables: Tables =
        serde_json::from_str(&text).map_err(|e| Failure::new(Kind::Validation, format!("{}: {e}", p.display())))?;
    write_reports(ctx, &tables)
}
