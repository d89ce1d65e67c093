//! Subdata selectors.
//!
//! Every selector takes the covariate matrix (responses are never looked at)
//! and returns the indices of `k` distinct rows.

mod iboss;
mod levss;
mod oss;
mod uniform;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use iboss::select_iboss;
pub use levss::{select_levss, LevssConfig, TraceMode};
pub use oss::{oss_discrepancy, select_oss};
pub use uniform::select_uniform;

use crate::error::Result;
use crate::linalg::DataMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    /// Distinct row indices into the full data, in selection order.
    pub indices: Vec<usize>,
    /// Number of rows accepted before random thinning (`k*`); equals
    /// `indices.len()` unless a LEVSS threshold kept the loop running.
    pub pre_downselect_count: usize,
    /// Condition numbers recorded by LEVSS; empty for other selectors.
    pub condition_trace: Vec<f64>,
    pub elapsed: Duration,
}

impl SelectionResult {
    pub(crate) fn new(indices: Vec<usize>, elapsed: Duration) -> Self {
        let k = indices.len();
        Self {
            indices,
            pre_downselect_count: k,
            condition_trace: Vec::new(),
            elapsed,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Inclusion indicator over `n` rows.
    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut delta = vec![false; n];
        for &i in &self.indices {
            delta[i] = true;
        }
        delta
    }
}

/// A selector plus its tuning parameters, minus the subdata size and seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum SelectorSpec {
    /// `threshold: None` disables the condition-number stopping rule.
    Levss { threshold: Option<f64> },
    Iboss,
    Oss,
    Uniform,
}

impl SelectorSpec {
    pub fn levss() -> Self {
        SelectorSpec::Levss { threshold: None }
    }

    pub fn levss_with_threshold(t: f64) -> Self {
        SelectorSpec::Levss { threshold: Some(t) }
    }

    /// Short name used in result tables, e.g. `levss`, `levss_T20`.
    pub fn label(&self) -> String {
        match self {
            SelectorSpec::Levss { threshold: None } => "levss".into(),
            SelectorSpec::Levss { threshold: Some(t) } => format!("levss_T{t}"),
            SelectorSpec::Iboss => "iboss".into(),
            SelectorSpec::Oss => "oss".into(),
            SelectorSpec::Uniform => "uniform".into(),
        }
    }

    pub fn uses_threshold(&self) -> bool {
        matches!(self, SelectorSpec::Levss { threshold: Some(_) })
    }

    pub fn select(&self, x: &DataMatrix, k: usize, seed: u64) -> Result<SelectionResult> {
        match *self {
            SelectorSpec::Levss { threshold } => select_levss(
                x,
                &LevssConfig {
                    k,
                    threshold,
                    seed,
                    ..LevssConfig::default()
                },
            ),
            SelectorSpec::Iboss => select_iboss(x, k),
            SelectorSpec::Oss => select_oss(x, k, seed),
            SelectorSpec::Uniform => select_uniform(x, k, seed),
        }
    }
}

impl fmt::Display for SelectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(SelectorSpec::levss().label(), "levss");
        assert_eq!(SelectorSpec::levss_with_threshold(20.0).label(), "levss_T20");
        assert_eq!(SelectorSpec::levss_with_threshold(2.5).label(), "levss_T2.5");
        assert_eq!(SelectorSpec::Oss.to_string(), "oss");
    }

    #[test]
    fn indicator_marks_selected_rows() {
        let r = SelectionResult::new(vec![3, 0], Duration::ZERO);
        assert_eq!(r.indicator(4), vec![true, false, false, true]);
    }
}
