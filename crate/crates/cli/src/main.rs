//! Command-line driver: simulate signals, build indicators, select, evaluate.

mod commands;
mod config;
mod exit;

use std::path::PathBuf;

use anomind::DatasetVariant;
use clap::{Parser, Subcommand};

use config::{ClassifierChoice, RunConfig};
use exit::Failure;

#[derive(Parser, Debug)]
#[command(name = "anomind", version, about = "Change-point indicators and classifiers for simulated engine signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the simulated signals.
    #[arg(long, global = true)]
    seed_data: Option<u64>,
    /// Seed for the train/test split.
    #[arg(long, global = true)]
    seed_split: Option<u64>,
    #[arg(long, global = true)]
    seed_forest: Option<u64>,
    /// Output directory shared by all commands.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    classifier: Option<ClassifierChoice>,
    /// Data set variant, A or B.
    #[arg(long, global = true, value_parser = parse_variant)]
    dataset: Option<DatasetVariant>,
    /// Largest number of selected indicators considered for K*.
    #[arg(long, global = true)]
    max_k: Option<usize>,
    /// Length of the forward-selection curves.
    #[arg(long, global = true)]
    curve_k: Option<usize>,
    /// Equal class counts in the training set.
    #[arg(long, global = true)]
    balanced_train: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Simulate the signal dataset.
    Generate,
    /// Build and deduplicate the indicator matrix.
    Indicators,
    /// Split the data and rank indicators by mRMR on the training rows.
    Select,
    /// Fit classifiers on all and on selected indicators and write reports.
    Evaluate,
    /// Re-render the tables of a finished evaluation.
    Report,
    /// generate, indicators, select and evaluate in one go.
    Run,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Indicators => "indicators",
            Command::Select => "select",
            Command::Evaluate => "evaluate",
            Command::Report => "report",
            Command::Run => "run",
        }
    }
}

fn parse_variant(s: &str) -> Result<DatasetVariant, String> {
    s.parse().map_err(|e: anomind::Error| e.to_string())
}

impl Cli {
    fn run_config(&self) -> Result<RunConfig, Failure> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.seed_data {
            c.seeds.data = v;
        }
        if let Some(v) = self.seed_split {
            c.seeds.split = v;
        }
        if let Some(v) = self.seed_forest {
            c.seeds.forest = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if let Some(v) = self.classifier {
            c.classifier = v;
        }
        if let Some(v) = self.dataset {
            c.dataset = v;
        }
        if let Some(v) = self.max_k {
            c.max_k = v;
        }
        if let Some(v) = self.curve_k {
            c.curve_k = v;
        }
        if self.balanced_train {
            c.split.balanced_train = true;
        }
        c.validate()?;
        Ok(c)
    }
}

fn init_threads(threads: Option<usize>) -> Result<(), Failure> {
    let Some(n) = threads else { return Ok(()) };
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(exit::Kind::Usage, format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    if n > 1 {
        log::warn!("built without the parallel feature; running on one thread");
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = cli.run_config()?;
    init_threads(cfg.threads)?;
    let mut ctx = commands::Context::new(cfg, cli.command.name())?;
    match cli.command {
        Command::Generate => commands::generate(&mut ctx)?,
        Command::Indicators => commands::indicators(&mut ctx)?,
        Command::Select => commands::select(&mut ctx)?,
        Command::Evaluate => commands::evaluate(&mut ctx)?,
        Command::Report => commands::report(&mut ctx)?,
        Command::Run => {
            commands::generate(&mut ctx)?;
            commands::indicators(&mut ctx)?;
            commands::evaluate(&mut ctx)?;
        }
    }
    ctx.finish()?;
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(exit::code_for(&e));
    }
}
