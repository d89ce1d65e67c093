//! Least-squares fits on subdata, the full-data-mean intercept adjustment,
//! and pairwise interaction expansion.

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SubdataError};
use crate::linalg::DataMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterceptVariant {
    /// Intercept estimated jointly with the slopes.
    JointOls,
    /// `ȳ - x̄ᵀ β̂₁` using full-data means.
    Adjusted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slopes: Vec<f64>,
    pub intercept_variant: InterceptVariant,
}

/// `y` regressed on `[1, X]`.
///
/// Solved through a column-pivoted QR factorization of the augmented design;
/// a rank-deficient design is reported with its numerical rank rather than
/// solved.
pub fn fit_ols(x_sub: &DataMatrix, y_sub: &[f64]) -> Result<LinearFit> {
    let (k, p) = (x_sub.nrows(), x_sub.ncols());
    if y_sub.len() != k {
        return Err(SubdataError::Dimension(format!(
            "response has length {}, expected {k}",
            y_sub.len()
        )));
    }
    let q = p + 1;
    if k < q {
        return Err(SubdataError::InsufficientRows {
            required: q,
            actual: k,
        });
    }
    let z = x_sub.augmented();
    let qr = z.col_piv_qr();
    let r = qr.thin_R();
    let rmax = (0..q).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    let tol = k.max(q) as f64 * f64::EPSILON * rmax;
    let rank = (0..q).filter(|&j| r[(j, j)].abs() > tol).count();
    if rank < q {
        return Err(SubdataError::SingularDesign { rank, cols: q });
    }
    let rhs = Mat::from_fn(k, 1, |i, _| y_sub[i]);
    let beta = qr.solve_lstsq(&rhs);
    Ok(LinearFit {
        intercept: beta[(0, 0)],
        slopes: (1..q).map(|j| beta[(j, 0)]).collect(),
        intercept_variant: InterceptVariant::JointOls,
    })
}

/// Replaces the intercept by `ȳ - x̄ᵀ β̂₁`, with `x̄` and `ȳ` taken over the
/// full data. Slopes are left untouched.
pub fn adjusted_intercept(fit: &LinearFit, full_x_means: &[f64], full_y_mean: f64) -> Result<LinearFit> {
    if full_x_means.len() != fit.slopes.len() {
        return Err(SubdataError::Dimension(format!(
            "{} covariate means for {} slopes",
            full_x_means.len(),
            fit.slopes.len()
        )));
    }
    let shift: f64 = full_x_means.iter().zip(&fit.slopes).map(|(m, b)| m * b).sum();
    Ok(LinearFit {
        intercept: full_y_mean - shift,
        slopes: fit.slopes.clone(),
        intercept_variant: InterceptVariant::Adjusted,
    })
}

/// Ordered column pairs `(j, l)`, `j < l`, whose products form the
/// interaction block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionSpec {
    base_p: usize,
    pairs: Vec<(usize, usize)>,
}

impl InteractionSpec {
    /// All pairs in lexicographic order.
    pub fn all_pairs(base_p: usize) -> Self {
        let pairs = (0..base_p)
            .flat_map(|j| (j + 1..base_p).map(move |l| (j, l)))
            .collect();
        Self { base_p, pairs }
    }

    pub fn base_p(&self) -> usize {
        self.base_p
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Columns of the expanded design.
    pub fn expanded_p(&self) -> usize {
        self.base_p + self.pairs.len()
    }
}

/// `[X, x_j ∘ x_l for (j, l) in spec.pairs()]`.
pub fn expand_interactions(x: &DataMatrix, spec: &InteractionSpec) -> Result<DataMatrix> {
    if x.ncols() != spec.base_p {
        return Err(SubdataError::Dimension(format!(
            "interaction spec expects {} columns, matrix has {}",
            spec.base_p,
            x.ncols()
        )));
    }
    let n = x.nrows();
    let mut values = Vec::with_capacity(n * spec.expanded_p());
    values.extend_from_slice(x.as_col_major());
    for &(j, l) in &spec.pairs {
        values.extend(x.column(j).iter().zip(x.column(l)).map(|(a, b)| a * b));
    }
    let out = DataMatrix::from_col_major(n, spec.expanded_p(), values)?;
    match x.response() {
        Some(y) => out.with_response(y.to_vec()),
        None => Ok(out),
    }
}
