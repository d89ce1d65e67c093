use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{MetricsRecord, RunOutput, RunSummary, TimingRow};
use crate::error::{Result, SubdataError};
use crate::selectors::SelectionResult;

/// Files written for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultPaths {
    pub records: PathBuf,
    pub timings: PathBuf,
    pub summary: PathBuf,
}

impl ResultPaths {
    /// `out.csv` gives `out.csv`, `out.timings.csv` and `out.summary.json`.
    pub fn for_records(path: &Path) -> Self {
        let stem = path.with_extension("");
        let with = |suffix: &str| {
            let mut s = stem.clone().into_os_string();
            s.push(suffix);
            PathBuf::from(s)
        };
        Self {
            records: path.to_path_buf(),
            timings: with(".timings.csv"),
            summary: with(".summary.json"),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TimingEntry {
    repetition: usize,
    selector: String,
    n: usize,
    k: usize,
    elapsed_select: f64,
    elapsed_fit: f64,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| SubdataError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>, header: &[&str]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut any = false;
    for r in rows {
        w.serialize(r)?;
        any = true;
    }
    if !any {
        w.write_record(header)?;
    }
    w.flush().map_err(|e| SubdataError::io(path, e))?;
    Ok(())
}

const RECORD_HEADER: &[&str] = &[
    "repetition",
    "selector",
    "n",
    "k",
    "k_star",
    "mse_intercept",
    "mse_slopes",
    "mse_main",
    "mse_interaction",
    "logdet",
];
const TIMING_HEADER: &[&str] = &["repetition", "selector", "n", "k", "elapsed_select", "elapsed_fit"];

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| SubdataError::io(path, e))?;
    serde_json::to_writer_pretty(file, value)?;
    Ok(())
}

/// Overwrites the three files. The records file holds no wall-clock values
/// and is identical across runs with the same configuration.
pub fn write_results(output: &RunOutput, summary: &RunSummary, path: &Path) -> Result<ResultPaths> {
    let paths = ResultPaths::for_records(path);
    write_rows(&paths.records, &output.records, RECORD_HEADER)?;
    write_rows(
        &paths.timings,
        output.records.iter().map(|r| TimingEntry {
            repetition: r.repetition,
            selector: r.selector.clone(),
            n: r.n,
            k: r.k,
            elapsed_select: r.elapsed_select,
            elapsed_fit: r.elapsed_fit,
        }),
        TIMING_HEADER,
    )?;
    write_json(&paths.summary, summary)?;
    Ok(paths)
}

/// Reads a records file back, restoring wall-clock fields from the timings
/// file next to it when that exists.
pub fn read_records(path: &Path) -> Result<Vec<MetricsRecord>> {
    let paths = ResultPaths::for_records(path);
    let file = File::open(path).map_err(|e| SubdataError::io(path, e))?;
    let mut records: Vec<MetricsRecord> = csv::Reader::from_reader(file)
        .deserialize()
        .collect::<std::result::Result<_, _>>()?;
    if let Ok(file) = File::open(&paths.timings) {
        let timings: Vec<TimingEntry> = csv::Reader::from_reader(file)
            .deserialize()
            .collect::<std::result::Result<_, _>>()?;
        if timings.len() != records.len() {
            return Err(SubdataError::InvalidData(format!(
                "{} timing rows for {} records",
                timings.len(),
                records.len()
            )));
        }
        for (r, t) in records.iter_mut().zip(timings) {
            r.elapsed_select = t.elapsed_select;
            r.elapsed_fit = t.elapsed_fit;
        }
    }
    Ok(records)
}

pub fn write_timing_table(rows: &[TimingRow], path: &Path) -> Result<()> {
    write_rows(path, rows, &["n", "p", "k", "selector", "reps", "seconds", "min_seconds"])
}

#[derive(Serialize)]
struct SelectedRow {
    rank: usize,
    row: usize,
}

#[derive(Serialize)]
struct SelectionMeta<'a> {
    method: &'a str,
    k: usize,
    k_star: usize,
    elapsed_seconds: f64,
    condition_trace: Vec<Option<f64>>,
    config: &'a serde_json::Value,
}

/// Selected rows (0-based, in selection order) as CSV plus a JSON sidecar
/// `<stem>.summary.json`. Infinite condition numbers are written as `null`.
pub fn write_selection(result: &SelectionResult, method: &str, config: &serde_json::Value, path: &Path) -> Result<ResultPaths> {
    let paths = ResultPaths::for_records(path);
    write_rows(
        &paths.records,
        result.indices.iter().enumerate().map(|(rank, &row)| SelectedRow { rank, row }),
        &["rank", "row"],
    )?;
    write_json(
        &paths.summary,
        &SelectionMeta {
            method,
            k: result.indices.len(),
            k_star: result.pre_downselect_count,
            elapsed_seconds: result.elapsed.as_secs_f64(),
            condition_trace: result.condition_trace.iter().map(|&c| c.is_finite().then_some(c)).collect(),
            config,
        },
    )?;
    Ok(paths)
}
