use serde::{Deserialize, Serialize};

use super::selector_seed;
use crate::datagen::{gen_covariates, CovariateCase, ScenarioConfig};
use crate::error::{Result, SubdataError};
use crate::selectors::SelectorSpec;

/// Timed runs are split into this many groups for the median of means.
const MOM_GROUPS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingPlan {
    pub ns: Vec<usize>,
    pub p: usize,
    pub k: usize,
    pub case: CovariateCase,
    pub selectors: Vec<SelectorSpec>,
    /// Timed runs per selector and `n`, after one discarded warm-up.
    pub reps: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub selector: String,
    pub reps: usize,
    /// Median of means of the selection wall-clock time.
    pub seconds: f64,
    pub min_seconds: f64,
}

/// Median of the means of `MOM_GROUPS` contiguous, near-equal chunks.
pub fn median_of_means(samples: &[f64]) -> f64 {
    let g = MOM_GROUPS.min(samples.len()).max(1);
    let mut means: Vec<f64> = (0..g)
        .map(|c| {
            let lo = c * samples.len() / g;
            let hi = (c + 1) * samples.len() / g;
            samples[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    if g % 2 == 1 {
        means[g / 2]
    } else {
        0.5 * (means[g / 2 - 1] + means[g / 2])
    }
}

/// Times selection only, on the calling thread. One dataset per `n`, shared
/// by all selectors.
pub fn run_timing(plan: &TimingPlan) -> Result<Vec<TimingRow>> {
    if plan.reps < MOM_GROUPS {
        return Err(SubdataError::Config(format!("timing needs reps >= {MOM_GROUPS}, got {}", plan.reps)));
    }
    let mut rows = Vec::new();
    for &n in &plan.ns {
        let cfg = ScenarioConfig::with_unit_coefficients(plan.case, n, plan.p, plan.k, false, plan.seed);
        cfg.validate()?;
        let x = gen_covariates(&cfg)?;
        for spec in &plan.selectors {
            spec.select(&x, plan.k, selector_seed(plan.seed))?;
            let mut samples = Vec::with_capacity(plan.reps);
            for _ in 0..plan.reps {
                samples.push(spec.select(&x, plan.k, selector_seed(plan.seed))?.elapsed.as_secs_f64());
            }
            rows.push(TimingRow {
                n,
                p: plan.p,
                k: plan.k,
                selector: spec.label(),
                reps: plan.reps,
                seconds: median_of_means(&samples),
                min_seconds: samples.iter().copied().fold(f64::INFINITY, f64::min),
            });
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln t` against `ln n`.
pub fn loglog_slope(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_means_groups() {
        assert_eq!(median_of_means(&[5.0, 1.0, 3.0, 2.0, 4.0]), 3.0);
        // Groups of two: means 1.5, 3.5, 5.5, 7.5, 100.
        let s = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 0.0, 200.0];
        assert_eq!(median_of_means(&s), 5.5);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(usize, f64)> = [100, 1000, 10_000].iter().map(|&n| (n, 3e-4 * (n as f64).powf(1.2))).collect();
        assert!((loglog_slope(&pts) - 1.2).abs() < 1e-12);
    }

    #[test]
    fn small_plan_runs() {
        let plan = TimingPlan {
            ns: vec![200, 400],
            p: 3,
            k: 20,
            case: CovariateCase::Mvnormal,
            selectors: vec![SelectorSpec::levss(), SelectorSpec::Iboss],
            reps: 5,
            seed: 1,
        };
        let rows = run_timing(&plan).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.seconds >= r.min_seconds && r.min_seconds >= 0.0));
        assert!(run_timing(&TimingPlan { reps: 4, ..plan }).is_err());
    }
}
