//! CSV datasets in, CSV records and JSON summaries out.

mod dataset;
mod results;

pub use dataset::{read_csv, write_dataset_csv, ColumnSpec};
pub use results::{read_records, write_results, write_selection, write_timing_table, ResultPaths};
