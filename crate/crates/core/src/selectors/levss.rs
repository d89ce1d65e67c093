//! Deterministic leverage-score subdata selection.
//!
//! Rows are ranked by leverage (the hat-matrix diagonal of the column-centered
//! covariates, which orders rows exactly as the hat diagonal of the design
//! with an intercept). The top `k` are always accepted; with a threshold `T`
//! the loop keeps accepting the next-ranked row while the condition number of
//! `U_Γᵀ U_Γ` is at least `T`. If that produces `k* > k` rows, `k` of them are
//! kept by simple random sampling.

use std::time::Instant;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::SelectionResult;
use crate::error::{Result, SubdataError};
use crate::linalg::{ratio_of_extremes, DataMatrix, TallSvd};

/// Which condition numbers end up in [`SelectionResult::condition_trace`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TraceMode {
    /// Only the values the stopping rule looks at: one per check once `k`
    /// rows are in, or the single value for the final `k` rows when there is
    /// no threshold.
    #[default]
    Decisions,
    /// One value after every accepted row.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevssConfig {
    pub k: usize,
    /// Condition-number threshold `T ≥ 1`; `None` disables the rule.
    pub threshold: Option<f64>,
    /// Seed for the `k`-of-`k*` thinning. Unused when `k* = k`.
    pub seed: u64,
    /// Center columns before the decomposition (default). Without centering
    /// the scores are those of the raw matrix `X`.
    pub centered: bool,
    pub trace: TraceMode,
}

impl Default for LevssConfig {
    fn default() -> Self {
        Self {
            k: 0,
            threshold: None,
            seed: 0,
            centered: true,
            trace: TraceMode::Decisions,
        }
    }
}

impl LevssConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn with_threshold(mut self, threshold: Option<f64>) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trace(mut self, trace: TraceMode) -> Self {
        self.trace = trace;
        self
    }

    pub fn uncentered(mut self) -> Self {
        self.centered = false;
        self
    }

    fn validate(&self, n: usize, p: usize) -> Result<()> {
        if self.k <= p {
            return Err(SubdataError::Config(format!(
                "LEVSS needs k > p, got k = {} with p = {p}",
                self.k
            )));
        }
        if n <= self.k {
            return Err(SubdataError::Config(format!(
                "LEVSS needs n > k, got n = {n} with k = {}",
                self.k
            )));
        }
        if let Some(t) = self.threshold {
            if !(t >= 1.0) {
                return Err(SubdataError::Config(format!("threshold must be >= 1, got {t}")));
            }
        }
        Ok(())
    }
}

/// Running Gram matrix `U_Γᵀ U_Γ` of the accepted rows.
struct SelectedGram {
    gram: Mat<f64>,
    count: usize,
}

impl SelectedGram {
    fn new(p: usize) -> Self {
        Self {
            gram: Mat::zeros(p, p),
            count: 0,
        }
    }

    fn add(&mut self, u: &[f64]) {
        let p = u.len();
        for j in 0..p {
            let uj = u[j];
            for i in j..p {
                self.gram[(i, j)] += u[i] * uj;
            }
        }
        self.count += 1;
    }

    fn add_block(&mut self, u: MatRef<'_, f64>) {
        matmul(self.gram.as_mut(), Accum::Add, u.transpose(), u, 1.0, Par::Seq);
        self.count += u.nrows();
    }

    fn condition(&self) -> Result<f64> {
        let p = self.gram.nrows();
        if self.count < p {
            return Ok(f64::INFINITY);
        }
        let eig = self
            .gram
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| SubdataError::NumericFailure(format!("eigenvalues: {e:?}")))?;
        Ok(ratio_of_extremes(&eig))
    }
}

pub fn select_levss(x: &DataMatrix, cfg: &LevssConfig) -> Result<SelectionResult> {
    let start = Instant::now();
    let (n, p, k) = (x.nrows(), x.ncols(), cfg.k);
    cfg.validate(n, p)?;

    let svd = TallSvd::compute(x, cfg.centered)?;
    let scores = svd.leverage(x).into_scores();

    // Nonincreasing leverage, ties by ascending row index. Only the top k are
    // ordered up front; the tail is sorted if the threshold rule reaches it.
    let by_rank = |a: &usize, b: &usize| scores[*b].total_cmp(&scores[*a]).then(a.cmp(b));
    let mut order: Vec<usize> = (0..n).collect();
    order.select_nth_unstable_by(k - 1, by_rank);
    order[..k].sort_unstable_by(by_rank);

    let mut gram = SelectedGram::new(p);
    let mut trace = Vec::new();
    let mut urow = vec![0.0; p];
    let mut accept = |i: usize, gram: &mut SelectedGram, trace: &mut Vec<f64>| -> Result<()> {
        svd.u_row(x, i, &mut urow);
        gram.add(&urow);
        if cfg.trace == TraceMode::Full {
            trace.push(gram.condition()?);
        }
        Ok(())
    };

    if cfg.trace == TraceMode::Full {
        for &i in &order[..k] {
            accept(i, &mut gram, &mut trace)?;
        }
    } else {
        gram.add_block(svd.u_rows(x, &order[..k]).as_ref());
    }
    let mut accepted = k;
    match cfg.threshold {
        None => {
            if cfg.trace == TraceMode::Decisions {
                trace.push(gram.condition()?);
            }
        }
        Some(t) => {
            order[k..].sort_unstable_by(by_rank);
            loop {
                let kappa = match cfg.trace {
                    TraceMode::Full => *trace.last().expect("k > 0 rows accepted"),
                    TraceMode::Decisions => {
                        let kappa = gram.condition()?;
                        trace.push(kappa);
                        kappa
                    }
                };
                if kappa < t || accepted == n {
                    break;
                }
                accept(order[accepted], &mut gram, &mut trace)?;
                accepted += 1;
            }
        }
    }

    let mut indices: Vec<usize> = order[..accepted].to_vec();
    if accepted > k {
        indices = thin(&indices, k, cfg.seed);
    }
    Ok(SelectionResult {
        indices,
        pre_downselect_count: accepted,
        condition_trace: trace,
        elapsed: start.elapsed(),
    })
}

/// Keeps `k` of `pool` by a seeded partial Fisher–Yates shuffle, preserving
/// the pool's order among the survivors.
fn thin(pool: &[usize], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut positions: Vec<usize> = (0..pool.len()).collect();
    for i in 0..k {
        let j = rng.random_range(i..pool.len());
        positions.swap(i, j);
    }
    let mut kept = positions[..k].to_vec();
    kept.sort_unstable();
    kept.into_iter().map(|pos| pool[pos]).collect()
}
