use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{selector_seed, Evaluation, RunOutput, Truth};
use crate::error::{Result, SubdataError};
use crate::linalg::DataMatrix;
use crate::regression::fit_ols;
use crate::selectors::SelectorSpec;

const RESAMPLE_STREAM: u64 = 2;

/// Bootstrap errors are measured against the full-data least-squares fit;
/// this note is copied into run metadata.
pub const REFERENCE_NOTE: &str = "bootstrap MSE is measured against the full-data OLS fit of the input dataset";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapPlan {
    pub n_boot: usize,
    pub k_values: Vec<usize>,
    pub selectors: Vec<SelectorSpec>,
    pub seed: u64,
    /// `false` uses the data itself as every replicate; for testing.
    pub resample: bool,
}

impl BootstrapPlan {
    /// `k = m·p` for every multiple `m`.
    pub fn from_multiples(p: usize, multiples: &[usize], n_boot: usize, selectors: Vec<SelectorSpec>, seed: u64) -> Self {
        Self {
            n_boot,
            k_values: multiples.iter().map(|m| m * p).collect(),
            selectors,
            seed,
            resample: true,
        }
    }

    /// LEVSS with `T ∈ {25, 20, 15}` and without a threshold, then IBOSS and
    /// OSS.
    pub fn standard_selectors() -> Vec<SelectorSpec> {
        vec![
            SelectorSpec::levss_with_threshold(25.0),
            SelectorSpec::levss_with_threshold(20.0),
            SelectorSpec::levss_with_threshold(15.0),
            SelectorSpec::levss(),
            SelectorSpec::Iboss,
            SelectorSpec::Oss,
        ]
    }

    fn validate(&self, n: usize, p: usize) -> Result<()> {
        if self.n_boot == 0 {
            return Err(SubdataError::Config("n_boot must be at least 1".into()));
        }
        if self.k_values.is_empty() || self.selectors.is_empty() {
            return Err(SubdataError::Config("empty k grid or selector list".into()));
        }
        for &k in &self.k_values {
            if k <= p {
                return Err(SubdataError::Config(format!("every k must exceed p = {p}, got {k}")));
            }
            if k > n {
                return Err(SubdataError::Config(format!("k = {k} exceeds the {n} available rows")));
            }
        }
        Ok(())
    }
}

/// Records are ordered by replicate, then k, then selector.
pub fn run_bootstrap(data: &DataMatrix, plan: &BootstrapPlan) -> Result<RunOutput> {
    let y = data
        .response()
        .ok_or_else(|| SubdataError::InvalidData("bootstrap needs a response column".into()))?;
    let (n, p) = (data.nrows(), data.ncols());
    plan.validate(n, p)?;
    let reference = fit_ols(data, y)?;

    let outputs: Vec<Result<RunOutput>> = (0..plan.n_boot)
        .into_par_iter()
        .map(|b| {
            let rep_seed = plan.seed.wrapping_add(b as u64);
            let owned;
            let sample = if plan.resample {
                let mut rng = ChaCha20Rng::seed_from_u64(rep_seed);
                rng.set_stream(RESAMPLE_STREAM);
                let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                owned = data.select_rows(&rows)?;
                &owned
            } else {
                data
            };
            let ys = sample.response().expect("rows keep the response");
            let y_mean = ys.iter().sum::<f64>() / n as f64;
            let means = sample.column_means();
            let eval = Evaluation {
                design: sample,
                select_on: sample,
                design_means: &means,
                y_mean,
                sigma2: 1.0,
                truth: Truth {
                    intercept: reference.intercept,
                    slopes: &reference.slopes,
                    main_split: None,
                },
            };
            let mut out = RunOutput::default();
            for &k in &plan.k_values {
                for spec in &plan.selectors {
                    match eval.run(spec, k, selector_seed(rep_seed), b) {
                        Ok(r) => out.records.push(r),
                        Err(f) => out.failures.push(f),
                    }
                }
            }
            Ok(out)
        })
        .collect();

    let mut out = RunOutput::default();
    for o in outputs {
        out.extend(o?);
    }
    if !out.failures.is_empty() {
        warn!("{} bootstrap selections failed and are excluded from aggregates", out.failures.len());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, CovariateCase, ScenarioConfig};

    fn data() -> DataMatrix {
        generate(&ScenarioConfig::with_unit_coefficients(CovariateCase::Mvnormal, 300, 3, 30, false, 4)).unwrap()
    }

    #[test]
    fn identity_replicate_with_all_rows_has_zero_error() {
        let plan = BootstrapPlan {
            n_boot: 1,
            k_values: vec![300],
            selectors: vec![SelectorSpec::Uniform],
            seed: 0,
            resample: false,
        };
        let out = run_bootstrap(&data(), &plan).unwrap();
        assert_eq!(out.records[0].mse_slopes, 0.0);
    }

    #[test]
    fn resampled_full_draw_is_close() {
        let plan = BootstrapPlan {
            n_boot: 1,
            k_values: vec![300],
            selectors: vec![SelectorSpec::Uniform],
            seed: 0,
            resample: true,
        };
        let out = run_bootstrap(&data(), &plan).unwrap();
        let mse = out.records[0].mse_slopes;
        assert!(mse > 0.0 && mse < 1.0, "mse {mse}");
    }

    #[test]
    fn grid_and_variants_present() {
        let plan = BootstrapPlan::from_multiples(3, &[5, 10, 20, 30], 2, BootstrapPlan::standard_selectors(), 8);
        assert_eq!(plan.k_values, vec![15, 30, 60, 90]);
        let out = run_bootstrap(&data(), &plan).unwrap();
        assert!(out.failures.is_empty(), "{:?}", out.failures);
        assert_eq!(out.records.len(), 2 * 4 * 6);
        for label in ["levss_T25", "levss_T20", "levss_T15", "levss", "iboss", "oss"] {
            for k in &plan.k_values {
                assert!(out.records.iter().any(|r| r.selector == label && r.k == *k));
            }
        }
        assert_eq!(out, run_bootstrap(&data(), &plan).map(|mut o| {
            for (r, s) in o.records.iter_mut().zip(&out.records) {
                r.elapsed_fit = s.elapsed_fit;
                r.elapsed_select = s.elapsed_select;
            }
            o
        }).unwrap());
    }

    #[test]
    fn plan_errors() {
        let d = data();
        let mut plan = BootstrapPlan::from_multiples(3, &[1], 1, vec![SelectorSpec::Uniform], 0);
        assert!(run_bootstrap(&d, &plan).is_err());
        plan.k_values = vec![10];
        plan.n_boot = 0;
        assert!(run_bootstrap(&d, &plan).is_err());
        plan.n_boot = 1;
        assert!(run_bootstrap(&d.clone().without_response(), &plan).is_err());
    }
}
