//! Seeded synthetic scenarios.
//!
//! Covariates and noise come from two independent streams of one
//! `ChaCha20Rng` seeded with `cfg.seed`: stream 0 for the covariates, stream 1
//! for the response noise. Repetition `r` of a study uses seed `base + r`.

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SubdataError};
use crate::linalg::DataMatrix;
use crate::regression::{expand_interactions, InteractionSpec};

/// Human-readable generator name recorded in run metadata.
pub const RNG_NAME: &str = "ChaCha20Rng (rand_chacha 0.9), covariates on stream 0, noise on stream 1";

pub const TRUNCATION_BOUND: f64 = 5.0;
/// Draws allowed per row before the truncated sampler gives up.
pub const MAX_DRAWS_PER_ROW: usize = 1_000_000;

const COVARIATE_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovariateCase {
    /// Independent uniform `[0, 1]` covariates.
    Uniform01,
    /// `N(0, Σ)` with unit variances and all correlations `0.5`.
    Mvnormal,
    /// The same normal restricted to `[-5, 5]^p`.
    TruncatedMvnormal,
}

impl CovariateCase {
    pub fn name(&self) -> &'static str {
        match self {
            CovariateCase::Uniform01 => "uniform01",
            CovariateCase::Mvnormal => "mvnormal",
            CovariateCase::TruncatedMvnormal => "truncated-mvnormal",
        }
    }
}

impl std::str::FromStr for CovariateCase {
    type Err = SubdataError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform01" => Ok(CovariateCase::Uniform01),
            "mvnormal" => Ok(CovariateCase::Mvnormal),
            "truncated-mvnormal" => Ok(CovariateCase::TruncatedMvnormal),
            other => Err(SubdataError::Config(format!(
                "unknown case {other:?}; expected uniform01, mvnormal or truncated-mvnormal"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub case: CovariateCase,
    pub n: usize,
    /// Number of base covariates.
    pub p: usize,
    pub k: usize,
    pub beta0: f64,
    /// Length `p`, or `p + p(p-1)/2` with `interaction`.
    pub beta_slopes: Vec<f64>,
    pub sigma2: f64,
    pub interaction: bool,
    pub seed: u64,
}

impl ScenarioConfig {
    /// All coefficients (intercept included) equal to one and `σ² = 9`.
    pub fn with_unit_coefficients(case: CovariateCase, n: usize, p: usize, k: usize, interaction: bool, seed: u64) -> Self {
        let q = if interaction { p + p * (p - 1) / 2 } else { p };
        Self {
            case,
            n,
            p,
            k,
            beta0: 1.0,
            beta_slopes: vec![1.0; q],
            sigma2: 9.0,
            interaction,
            seed,
        }
    }

    /// Columns of the regression design: `p`, plus the pairwise products
    /// with `interaction`.
    pub fn design_p(&self) -> usize {
        if self.interaction {
            self.p + self.p * (self.p.saturating_sub(1)) / 2
        } else {
            self.p
        }
    }

    /// `k = n` is allowed so that uniform selection can return the full data.
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(SubdataError::Config("p must be at least 1".into()));
        }
        if self.k <= self.design_p() {
            return Err(SubdataError::Config(format!(
                "k must exceed the {} design columns, got k = {}",
                self.design_p(),
                self.k
            )));
        }
        if self.n < self.k {
            return Err(SubdataError::Config(format!("n must be at least k, got n = {} with k = {}", self.n, self.k)));
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(SubdataError::Config(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if self.beta_slopes.len() != self.design_p() {
            return Err(SubdataError::Dimension(format!(
                "{} slope coefficients for {} design columns",
                self.beta_slopes.len(),
                self.design_p()
            )));
        }
        if !self.beta0.is_finite() || self.beta_slopes.iter().any(|b| !b.is_finite()) {
            return Err(SubdataError::Config("coefficients must be finite".into()));
        }
        Ok(())
    }

    pub fn for_repetition(&self, rep: usize) -> Self {
        Self {
            seed: self.seed.wrapping_add(rep as u64),
            ..self.clone()
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Lower Cholesky factor of the equicorrelation-0.5 covariance, row-major.
fn equicorrelation_factor(p: usize) -> Result<Vec<f64>> {
    let sigma = Mat::from_fn(p, p, |i, j| if i == j { 1.0 } else { 0.5 });
    let llt = sigma
        .llt(Side::Lower)
        .map_err(|e| SubdataError::NumericFailure(format!("Cholesky of covariance: {e:?}")))?;
    let l = llt.L();
    let mut out = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            out[i * p + j] = l[(i, j)];
        }
    }
    Ok(out)
}

fn correlated_row(rng: &mut ChaCha20Rng, l: &[f64], z: &mut [f64], row: &mut [f64]) {
    let p = row.len();
    for v in z.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    for i in 0..p {
        row[i] = l[i * p..i * p + i + 1].iter().zip(&z[..=i]).map(|(a, b)| a * b).sum();
    }
}

pub fn gen_covariates(cfg: &ScenarioConfig) -> Result<DataMatrix> {
    let (n, p) = (cfg.n, cfg.p);
    if n == 0 || p == 0 {
        return Err(SubdataError::Config(format!("cannot generate an {n}x{p} matrix")));
    }
    let mut rng = stream(cfg.seed, COVARIATE_STREAM);
    let mut values = vec![0.0; n * p];
    let mut row = vec![0.0; p];
    match cfg.case {
        CovariateCase::Uniform01 => {
            for i in 0..n {
                for j in 0..p {
                    values[j * n + i] = rng.random::<f64>();
                }
            }
        }
        CovariateCase::Mvnormal | CovariateCase::TruncatedMvnormal => {
            let l = equicorrelation_factor(p)?;
            let truncate = cfg.case == CovariateCase::TruncatedMvnormal;
            let mut z = vec![0.0; p];
            for i in 0..n {
                let mut draws = 0;
                loop {
                    correlated_row(&mut rng, &l, &mut z, &mut row);
                    draws += 1;
                    if !truncate || row.iter().all(|v| v.abs() <= TRUNCATION_BOUND) {
                        break;
                    }
                    if draws == MAX_DRAWS_PER_ROW {
                        return Err(SubdataError::NumericFailure(format!(
                            "row {i}: no draw inside [-5, 5]^{p} after {MAX_DRAWS_PER_ROW} attempts"
                        )));
                    }
                }
                for j in 0..p {
                    values[j * n + i] = row[j];
                }
            }
        }
    }
    DataMatrix::from_col_major(n, p, values)
}

/// `y = β₀ + Dβ + ε` where `D` is `x` or its interaction expansion and
/// `ε ~ N(0, σ²)`.
pub fn gen_response(x: &DataMatrix, cfg: &ScenarioConfig) -> Result<Vec<f64>> {
    if x.ncols() != cfg.p {
        return Err(SubdataError::Dimension(format!(
            "scenario has p = {}, matrix has {} columns",
            cfg.p,
            x.ncols()
        )));
    }
    let expanded;
    let design = if cfg.interaction {
        expanded = expand_interactions(x, &InteractionSpec::all_pairs(cfg.p))?;
        &expanded
    } else {
        x
    };
    if cfg.beta_slopes.len() != design.ncols() {
        return Err(SubdataError::Dimension(format!(
            "{} slope coefficients for {} design columns",
            cfg.beta_slopes.len(),
            design.ncols()
        )));
    }
    let n = x.nrows();
    let mut y = vec![cfg.beta0; n];
    for (j, &b) in cfg.beta_slopes.iter().enumerate() {
        for (yi, &v) in y.iter_mut().zip(design.column(j)) {
            *yi += b * v;
        }
    }
    let sd = cfg.sigma2.sqrt();
    let mut rng = stream(cfg.seed, NOISE_STREAM);
    for yi in y.iter_mut() {
        let e: f64 = rng.sample(StandardNormal);
        *yi += sd * e;
    }
    Ok(y)
}

/// Covariates with their response attached.
pub fn generate(cfg: &ScenarioConfig) -> Result<DataMatrix> {
    let x = gen_covariates(cfg)?;
    let y = gen_response(&x, cfg)?;
    x.with_response(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(case: CovariateCase, n: usize, p: usize) -> ScenarioConfig {
        ScenarioConfig::with_unit_coefficients(case, n, p, p + 1, false, 11)
    }

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn var(v: &[f64]) -> f64 {
        let m = mean(v);
        v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
    }

    #[test]
    fn uniform_support() {
        let x = gen_covariates(&cfg(CovariateCase::Uniform01, 2000, 4)).unwrap();
        assert!(x.as_col_major().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn normal_off_diagonal_covariance() {
        let n = 40_000;
        let x = gen_covariates(&cfg(CovariateCase::Mvnormal, n, 3)).unwrap();
        let (a, b) = (x.column(0), x.column(1));
        let (ma, mb) = (mean(a), mean(b));
        let cov = a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum::<f64>() / (n - 1) as f64;
        assert!((cov - 0.5).abs() < 4.0 / (n as f64).sqrt(), "cov {cov}");
        assert!((var(a) - 1.0).abs() < 0.05);
    }

    #[test]
    fn truncated_support_and_mean() {
        let n = 40_000;
        let x = gen_covariates(&cfg(CovariateCase::TruncatedMvnormal, n, 3)).unwrap();
        assert!(x.as_col_major().iter().all(|v| v.abs() <= 5.0));
        for j in 0..3 {
            assert!(mean(x.column(j)).abs() < 4.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn same_seed_same_bits() {
        let c = ScenarioConfig::with_unit_coefficients(CovariateCase::TruncatedMvnormal, 300, 4, 20, true, 3);
        let a = generate(&c).unwrap();
        let b = generate(&c).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate(&c.for_repetition(1)).unwrap());
    }

    #[test]
    fn noiseless_limit_reproduces_linear_form() {
        let mut c = cfg(CovariateCase::Uniform01, 200, 3);
        c.sigma2 = 1e-18;
        c.beta_slopes = vec![2.0, -1.0, 0.5];
        let x = gen_covariates(&c).unwrap();
        let y = gen_response(&x, &c).unwrap();
        for i in 0..200 {
            let want = 1.0 + 2.0 * x.get(i, 0) - x.get(i, 1) + 0.5 * x.get(i, 2);
            assert!((y[i] - want).abs() < 1e-8);
        }
    }

    #[test]
    fn pure_noise_variance() {
        let mut c = cfg(CovariateCase::Mvnormal, 100_000, 2);
        c.beta0 = 0.0;
        c.beta_slopes = vec![0.0, 0.0];
        let x = gen_covariates(&c).unwrap();
        let y = gen_response(&x, &c).unwrap();
        assert!((var(&y) / 9.0 - 1.0).abs() < 0.1);
    }

    #[test]
    fn unit_coefficient_default() {
        let c = ScenarioConfig::with_unit_coefficients(CovariateCase::Mvnormal, 10_000, 50, 1000, false, 0);
        assert_eq!(c.beta_slopes.len() + 1, 51);
        assert!(c.beta_slopes.iter().all(|&b| b == 1.0) && c.beta0 == 1.0);
        assert_eq!(c.sigma2, 9.0);
        let i = ScenarioConfig::with_unit_coefficients(CovariateCase::Mvnormal, 10_000, 10, 500, true, 0);
        assert_eq!(i.design_p(), 55);
        i.validate().unwrap();
    }

    #[test]
    fn response_shape_errors() {
        let mut c = cfg(CovariateCase::Uniform01, 50, 3);
        let x = gen_covariates(&c).unwrap();
        c.beta_slopes.pop();
        assert!(gen_response(&x, &c).is_err());
        assert!(c.validate().is_err());
    }

    #[test]
    fn validation() {
        let mut c = cfg(CovariateCase::Uniform01, 50, 3);
        c.validate().unwrap();
        c.k = 3;
        assert!(c.validate().is_err());
        c.k = 50;
        c.validate().unwrap();
        c.k = 51;
        assert!(c.validate().is_err());
        c.k = 10;
        c.sigma2 = 0.0;
        assert!(c.validate().is_err());
    }
}
