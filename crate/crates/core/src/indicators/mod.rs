//! The indicator bank: every (smoothing, test, window length, level) bit
//! series is folded by a simple "any window" rule and by 27 confirmatory
//! aggregators, then identical columns are merged.

pub mod aggregate;
mod bank;
mod spec;

pub use bank::{
    build_matrix, build_matrix_with, dedup_columns, indicator_row, read_catalog, read_matrix_bin, write_catalog,
    write_duplicates, write_matrix_bin, Dedup, DuplicateGroup, IndicatorMatrix, CATALOG_FILE, DUPLICATES_FILE,
    LABELS_FILE, MATRIX_CSV_FILE, MATRIX_FILE,
};
pub use spec::{Aggregator, Grid, IndicatorSpec};
