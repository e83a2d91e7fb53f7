//! Runs the whole pipeline on one simulated dataset and prints the tables.
//!
//! cargo run --release -p anomind --example pipeline -- A

use std::time::Instant;

use anomind::classify::{explain_table, ClassifierKind, ForestParams};
use anomind::eval::{make_split, Experiment, SplitConfig, Tables};
use anomind::indicators::{build_matrix, dedup_columns, Grid};
use anomind::signal::gen_dataset;
use anomind::{DatasetSpec, DatasetVariant, Exec};

fn main() -> anomind::Result<()> {
    let variant: DatasetVariant = std::env::args().nth(1).as_deref().unwrap_or("A").parse()?;
    let t = Instant::now();
    let signals = gen_dataset(&DatasetSpec::new(variant, 1));
    let full = build_matrix(&signals, &Grid::default())?;
    let dedup = dedup_columns(&full);
    eprintln!(
        "indicators: {} columns, {} distinct ({:.1?})",
        full.matrix.cols(),
        dedup.matrix.matrix.cols(),
        t.elapsed()
    );

    let data = &dedup.matrix;
    let split = make_split(&data.labels, &SplitConfig::default(), 2)?;
    let forest = ForestParams { seed: 3, ..Default::default() };
    let exp = Experiment::new(data, split, forest, Exec::default())?;

    let t = Instant::now();
    let rf_full = exp.run_full(ClassifierKind::RandomForest)?;
    let nb_full = exp.run_full(ClassifierKind::NaiveBayes)?;
    eprintln!("full-indicator runs ({:.1?})", t.elapsed());

    let t = Instant::now();
    let ranking = exp.rank(100)?;
    let nb_forward = exp.run_forward(ClassifierKind::NaiveBayes, &ranking, 100, 30)?;
    eprintln!("mRMR + naive Bayes curve ({:.1?})", t.elapsed());

    let names: Vec<String> = nb_forward.best().columns.iter().map(|&j| data.catalog[j].short_name()).collect();
    let class_names: Vec<String> = anomind::AnomalyClass::ALL.iter().map(|c| c.short_name().to_string()).collect();
    let model = exp.naive_bayes(&nb_forward.best().columns)?;
    let explanation = explain_table(&model, &names, &class_names, true)?;

    let tables = Tables {
        dataset: variant.to_string(),
        rf_full: Some(rf_full),
        nb_full: Some(nb_full),
        rf_forward: None,
        nb_forward: Some(nb_forward),
        explanation: Some(explanation),
    };
    print!("{}", tables.to_text());
    Ok(())
}
