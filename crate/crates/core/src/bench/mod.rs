//! Suite runner, aggregation and table output.

mod aggregate;
mod suite;
mod table;

pub use aggregate::{aggregate, AggregateRow, Stat};
pub use suite::{load_manifest, run_entries, run_suite, SuiteEntry, SuiteError};
pub use table::{
    emit_table, fixed2, latex_row, metrics_csv, parse_csv_table, parse_metrics_csv, thousands, trimmed, TableError,
    TableFormat,
};
