use serde::{Deserialize, Serialize};

use super::{FailureRecord, MetricsRecord, RunOutput};
use crate::datagen::RNG_NAME;

/// Location summary of a sample. Quartiles interpolate linearly between
/// order statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |f: f64| {
            let pos = f * (v.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            if lo == hi {
                v[lo]
            } else {
                v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
            }
        };
        Some(Self {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub selector: String,
    pub n: usize,
    pub k: usize,
    pub count: usize,
    pub mean_k_star: f64,
    pub mse_intercept: Stats,
    pub mse_slopes: Stats,
    pub log10_mse_slopes: Stats,
    pub mse_main: Option<Stats>,
    pub mse_interaction: Option<Stats>,
    pub logdet: Stats,
}

/// Spread of mean intercept MSE across selectors at one `(n, k)`; the
/// intercept is expected to be estimated about equally well by all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterceptSpread {
    pub n: usize,
    pub k: usize,
    pub max_over_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub command: String,
    pub config: serde_json::Value,
    pub rng: String,
    pub notes: Vec<String>,
    pub record_count: usize,
    pub excluded_count: usize,
    pub failures: Vec<FailureRecord>,
    pub groups: Vec<GroupSummary>,
    pub intercept_spread: Vec<InterceptSpread>,
}

impl RunSummary {
    /// Groups appear in the order their first record does.
    pub fn build(command: &str, config: serde_json::Value, output: &RunOutput) -> Self {
        let mut keys: Vec<(String, usize, usize)> = Vec::new();
        for r in &output.records {
            let key = (r.selector.clone(), r.n, r.k);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let groups: Vec<GroupSummary> = keys
            .into_iter()
            .map(|(selector, n, k)| {
                let rs: Vec<&MetricsRecord> = output
                    .records
                    .iter()
                    .filter(|r| r.selector == selector && r.n == n && r.k == k)
                    .collect();
                let col = |f: &dyn Fn(&MetricsRecord) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<_>>();
                let opt = |f: &dyn Fn(&MetricsRecord) -> Option<f64>| {
                    let v: Option<Vec<f64>> = rs.iter().map(|r| f(r)).collect();
                    v.and_then(|v| Stats::of(&v))
                };
                GroupSummary {
                    count: rs.len(),
                    mean_k_star: rs.iter().map(|r| r.k_star as f64).sum::<f64>() / rs.len() as f64,
                    mse_intercept: Stats::of(&col(&|r| r.mse_intercept)).expect("nonempty group"),
                    mse_slopes: Stats::of(&col(&|r| r.mse_slopes)).expect("nonempty group"),
                    log10_mse_slopes: Stats::of(&col(&|r| r.mse_slopes.log10())).expect("nonempty group"),
                    mse_main: opt(&|r| r.mse_main),
                    mse_interaction: opt(&|r| r.mse_interaction),
                    logdet: Stats::of(&col(&|r| r.logdet)).expect("nonempty group"),
                    selector,
                    n,
                    k,
                }
            })
            .collect();

        let mut spread = Vec::new();
        for g in &groups {
            if spread.iter().any(|s: &InterceptSpread| s.n == g.n && s.k == g.k) {
                continue;
            }
            let means: Vec<f64> = groups
                .iter()
                .filter(|h| h.n == g.n && h.k == g.k)
                .map(|h| h.mse_intercept.mean)
                .collect();
            let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
            spread.push(InterceptSpread {
                n: g.n,
                k: g.k,
                max_over_min: hi / lo,
            });
        }

        Self {
            command: command.to_string(),
            config,
            rng: RNG_NAME.to_string(),
            notes: Vec::new(),
            record_count: output.records.len(),
            excluded_count: output.failures.len(),
            failures: output.failures.clone(),
            groups,
            intercept_spread: spread,
        }
    }

    pub fn group(&self, selector: &str, n: usize, k: usize) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.selector == selector && g.n == n && g.k == k)
    }
}
