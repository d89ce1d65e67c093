//! Experiment drivers: repeated simulation, selection timing and bootstrap
//! evaluation on a given dataset.
//!
//! Repetitions run on the rayon pool. Each one derives every random draw from
//! its own seed, so the records do not depend on scheduling.

mod bootstrap;
mod simulation;
mod summary;
mod timing;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use bootstrap::{run_bootstrap, BootstrapPlan, REFERENCE_NOTE};
pub use simulation::{run_simulation, IbossDesign, SimulationPlan};
pub use summary::{GroupSummary, InterceptSpread, RunSummary, Stats};
pub use timing::{loglog_slope, median_of_means, run_timing, TimingPlan, TimingRow};

use crate::error::Result;
use crate::linalg::{logdet_info, DataMatrix};
use crate::regression::{adjusted_intercept, fit_ols};
use crate::selectors::SelectorSpec;

/// One selector applied once. Wall-clock fields are not serialized with the
/// record; they travel in a separate timings table so that record files are
/// reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub repetition: usize,
    pub selector: String,
    pub n: usize,
    pub k: usize,
    pub k_star: usize,
    pub mse_intercept: f64,
    pub mse_slopes: f64,
    pub mse_main: Option<f64>,
    pub mse_interaction: Option<f64>,
    pub logdet: f64,
    #[serde(skip)]
    pub elapsed_select: f64,
    #[serde(skip)]
    pub elapsed_fit: f64,
}

/// A selection or fit that did not produce a record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub repetition: usize,
    pub selector: String,
    pub n: usize,
    pub k: usize,
    pub error: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOutput {
    pub records: Vec<MetricsRecord>,
    pub failures: Vec<FailureRecord>,
}

impl RunOutput {
    fn extend(&mut self, other: RunOutput) {
        self.records.extend(other.records);
        self.failures.extend(other.failures);
    }
}

/// Seed handed to a selector in a repetition whose data used `rep_seed`.
/// Offset so that uniform sampling never replays the covariate stream.
pub(crate) fn selector_seed(rep_seed: u64) -> u64 {
    rep_seed ^ 0x9e37_79b9_7f4a_7c15
}

/// What an evaluated selection is compared against.
pub(crate) struct Truth<'a> {
    pub intercept: f64,
    pub slopes: &'a [f64],
    /// Number of leading main-effect slopes when the slopes are split into
    /// main and interaction parts.
    pub main_split: Option<usize>,
}

pub(crate) struct Evaluation<'a> {
    /// Regression design with the response attached.
    pub design: &'a DataMatrix,
    /// Matrix the selector sees; usually the base covariates.
    pub select_on: &'a DataMatrix,
    pub design_means: &'a [f64],
    pub y_mean: f64,
    pub sigma2: f64,
    pub truth: Truth<'a>,
}

fn squared_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Evaluation<'_> {
    pub(crate) fn run(&self, spec: &SelectorSpec, k: usize, seed: u64, repetition: usize) -> std::result::Result<MetricsRecord, FailureRecord> {
        let n = self.design.nrows();
        self.try_run(spec, k, seed, repetition).map_err(|e| FailureRecord {
            repetition,
            selector: spec.label(),
            n,
            k,
            error: e.to_string(),
        })
    }

    fn try_run(&self, spec: &SelectorSpec, k: usize, seed: u64, repetition: usize) -> Result<MetricsRecord> {
        let sel = spec.select(self.select_on, k, seed)?;
        let fit_start = Instant::now();
        let sub = self.design.select_rows(&sel.indices)?;
        let y = sub.response().expect("design carries the response");
        let fit = adjusted_intercept(&fit_ols(&sub, y)?, self.design_means, self.y_mean)?;
        let elapsed_fit = fit_start.elapsed().as_secs_f64();
        let logdet = logdet_info(sub.augmented().as_ref(), self.sigma2)?;

        let t = &self.truth;
        let (mse_main, mse_interaction) = match t.main_split {
            Some(m) => (
                Some(squared_error(&fit.slopes[..m], &t.slopes[..m])),
                Some(squared_error(&fit.slopes[m..], &t.slopes[m..])),
            ),
            None => (None, None),
        };
        Ok(MetricsRecord {
            repetition,
            selector: spec.label(),
            n: self.design.nrows(),
            k,
            k_star: sel.pre_downselect_count,
            mse_intercept: (fit.intercept - t.intercept).powi(2),
            mse_slopes: squared_error(&fit.slopes, t.slopes),
            mse_main,
            mse_interaction,
            logdet,
            elapsed_select: sel.elapsed.as_secs_f64(),
            elapsed_fit,
        })
    }
}
