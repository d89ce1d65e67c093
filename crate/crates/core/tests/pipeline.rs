mod common;

use proptest::prelude::*;
use subdata::bench::{run_bootstrap, run_simulation, BootstrapPlan, SimulationPlan};
use subdata::datagen::{gen_covariates, generate, CovariateCase, ScenarioConfig};
use subdata::regression::{adjusted_intercept, fit_ols};
use subdata::selectors::SelectorSpec;
use subdata::DataMatrix;

use common::{gaussian_matrix, normal_equations};

#[test]
fn ols_matches_normal_equations() {
    let x = gaussian_matrix(50, 3, 12);
    let y: Vec<f64> = (0..50).map(|i| (i as f64 * 0.7).sin() * 4.0 + x.get(i, 1)).collect();
    let fit = fit_ols(&x, &y).unwrap();
    let want = normal_equations(&x, &y);
    assert!((fit.intercept - want[0]).abs() < 1e-8);
    for (b, w) in fit.slopes.iter().zip(&want[1..]) {
        assert!((b - w).abs() < 1e-8);
    }
}

#[test]
fn adjusted_intercept_scalar_loop() {
    let x = gaussian_matrix(40, 4, 2);
    let y: Vec<f64> = (0..40).map(|i| i as f64 / 7.0).collect();
    let fit = fit_ols(&x, &y).unwrap();
    let means = [0.3, -1.2, 2.0, 0.0];
    let ybar = 1.75;
    let adj = adjusted_intercept(&fit, &means, ybar).unwrap();
    let mut want = ybar;
    for j in 0..4 {
        want -= means[j] * fit.slopes[j];
    }
    assert!((adj.intercept - want).abs() < 1e-12);
    assert_eq!(adj.slopes, fit.slopes);
}

#[test]
fn full_subdata_fit_is_full_fit() {
    let cfg = ScenarioConfig::with_unit_coefficients(CovariateCase::Uniform01, 200, 3, 200, false, 4);
    let d = generate(&cfg).unwrap();
    let all: Vec<usize> = (0..200).collect();
    let sub = d.select_rows(&all).unwrap();
    assert_eq!(fit_ols(&d, d.response().unwrap()).unwrap(), fit_ols(&sub, sub.response().unwrap()).unwrap());
}

fn regression_input() -> impl Strategy<Value = (DataMatrix, Vec<f64>)> {
    (1usize..5)
        .prop_flat_map(|p| (Just(p), (p + 3)..60usize))
        .prop_flat_map(|(p, n)| {
            (
                prop::collection::vec(-10.0f64..10.0, n * p).prop_map(move |v| DataMatrix::from_col_major(n, p, v).unwrap()),
                prop::collection::vec(-100.0f64..100.0, n),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residuals_orthogonal_to_design((x, y) in regression_input()) {
        let fit = match fit_ols(&x, &y) {
            Ok(f) => f,
            Err(_) => return Ok(()),
        };
        let n = x.nrows();
        let resid: Vec<f64> = (0..n)
            .map(|i| y[i] - fit.intercept - (0..x.ncols()).map(|j| fit.slopes[j] * x.get(i, j)).sum::<f64>())
            .collect();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(resid.iter().sum::<f64>().abs() < 1e-6 * ynorm.max(1.0));
        for j in 0..x.ncols() {
            let dot: f64 = resid.iter().zip(x.column(j)).map(|(r, v)| r * v).sum();
            prop_assert!(dot.abs() < 1e-6 * ynorm.max(1.0));
        }
    }

    #[test]
    fn adjusted_intercept_keeps_slopes((x, y) in regression_input(), shift in -5.0f64..5.0) {
        if let Ok(fit) = fit_ols(&x, &y) {
            let means = vec![shift; x.ncols()];
            prop_assert_eq!(adjusted_intercept(&fit, &means, shift).unwrap().slopes, fit.slopes);
        }
    }
}

#[test]
fn truncated_case_variance_not_above_normal() {
    let n = 100_000;
    let a = gen_covariates(&ScenarioConfig::with_unit_coefficients(CovariateCase::Mvnormal, n, 3, 10, false, 5)).unwrap();
    let b = gen_covariates(&ScenarioConfig::with_unit_coefficients(CovariateCase::TruncatedMvnormal, n, 3, 10, false, 6)).unwrap();
    let var = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    // The truncation removes essentially nothing at ±5σ; allow sampling noise
    // of a few standard errors of a variance estimate.
    let se = (2.0 / n as f64).sqrt();
    for j in 0..3 {
        assert!(var(b.column(j)) <= var(a.column(j)) + 4.0 * se);
    }
}

fn strip(out: &subdata::bench::RunOutput) -> Vec<(usize, String, usize, f64, f64, f64)> {
    out.records
        .iter()
        .map(|r| (r.repetition, r.selector.clone(), r.k_star, r.mse_slopes, r.mse_intercept, r.logdet))
        .collect()
}

#[test]
fn parallel_and_serial_simulations_agree() {
    let cfg = ScenarioConfig::with_unit_coefficients(CovariateCase::Mvnormal, 800, 4, 40, false, 30);
    let plan = SimulationPlan::new(
        cfg,
        vec![SelectorSpec::levss_with_threshold(20.0), SelectorSpec::Iboss, SelectorSpec::Oss, SelectorSpec::Uniform],
        6,
    );
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run_simulation(&plan)).unwrap();
    let parallel = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| run_simulation(&plan)).unwrap();
    assert_eq!(strip(&serial), strip(&parallel));
    assert!(serial.failures.is_empty());
}

#[test]
fn levss_logdet_finite_whenever_selected() {
    let cfg = ScenarioConfig::with_unit_coefficients(CovariateCase::TruncatedMvnormal, 600, 5, 30, false, 3);
    let plan = SimulationPlan::new(cfg, vec![SelectorSpec::levss(), SelectorSpec::levss_with_threshold(15.0)], 10);
    let out = run_simulation(&plan).unwrap();
    assert!(out.failures.is_empty());
    assert!(out.records.iter().all(|r| r.logdet.is_finite()));
}

#[test]
fn bootstrap_parallel_and_serial_agree() {
    let d = generate(&ScenarioConfig::with_unit_coefficients(CovariateCase::Mvnormal, 500, 3, 30, false, 1)).unwrap();
    let plan = BootstrapPlan::from_multiples(3, &[5, 10], 4, BootstrapPlan::standard_selectors(), 17);
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run_bootstrap(&d, &plan)).unwrap();
    let parallel = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| run_bootstrap(&d, &plan)).unwrap();
    assert_eq!(strip(&serial), strip(&parallel));
}
