//! Thin singular value decomposition for tall matrices and the leverage
//! scores derived from it.
//!
//! The fast path forms the `p × p` Gram matrix in row blocks, takes its
//! symmetric eigendecomposition and re-orthogonalizes once (a CholeskyQR2
//! style refinement built on eigendecompositions instead of Cholesky
//! factors). The left factor is kept implicitly as `U = (X - 1 μᵀ) W` with a
//! `p × p` transform `W`, so leverage scores and individual rows of `U` are
//! available without materializing an `n × p` matrix. Inputs whose Gram
//! matrix is too ill-conditioned for that route fall back to faer's
//! Householder-based thin SVD.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par, Side};

use super::matrix::DataMatrix;
use crate::error::{Result, SubdataError};

/// Rows per block when streaming over the data.
const BLOCK_ROWS: usize = 2048;

/// Largest Gram-matrix condition number handled by the eigen route.
const GRAM_ROUTE_MAX_CONDITION: f64 = 1e8;

/// `X = U · diag(singular_values) · Vᵀ` with `U` of size `n × p`.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    u: Mat<f64>,
    singular_values: Vec<f64>,
    v: Mat<f64>,
}

impl SvdFactors {
    pub fn u(&self) -> MatRef<'_, f64> {
        self.u.as_ref()
    }

    /// Nonincreasing and nonnegative.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn v(&self) -> MatRef<'_, f64> {
        self.v.as_ref()
    }

    /// Numerical rank with the usual `max(n, p) · ε · σ_max` cutoff.
    pub fn rank(&self) -> usize {
        numerical_rank(&self.singular_values, self.u.nrows().max(self.u.ncols()))
    }

    /// `U · diag(σ) · Vᵀ`.
    pub fn reconstruct(&self) -> Mat<f64> {
        let mut us = self.u.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            for x in us.col_mut(j).iter_mut() {
                *x *= s;
            }
        }
        let mut out = Mat::zeros(self.u.nrows(), self.v.nrows());
        matmul(
            out.as_mut(),
            Accum::Replace,
            us.as_ref(),
            self.v.transpose(),
            1.0,
            Par::Seq,
        );
        out
    }
}

/// Diagonal of the hat matrix, one score per row of the decomposed matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LeverageVector {
    scores: Vec<f64>,
    rank: usize,
}

impl LeverageVector {
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn into_scores(self) -> Vec<f64> {
        self.scores
    }
}

/// Thin SVD of `x`.
pub fn thin_svd(x: &DataMatrix) -> Result<SvdFactors> {
    TallSvd::compute(x, false)?.into_factors(x)
}

/// `h_ii = ‖U_i·‖²`, summed over the columns of `U` that belong to nonzero
/// singular values.
pub fn leverage_scores(factors: &SvdFactors) -> LeverageVector {
    let rank = factors.rank();
    let u = factors.u();
    let scores = (0..u.nrows())
        .map(|i| (0..rank).map(|j| u[(i, j)] * u[(i, j)]).sum())
        .collect();
    LeverageVector { scores, rank }
}

fn numerical_rank(singular_values: &[f64], dim: usize) -> usize {
    let smax = singular_values.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    let tol = dim as f64 * f64::EPSILON * smax;
    singular_values.iter().take_while(|&&s| s > tol).count()
}

#[derive(Clone, Debug)]
enum LeftFactor {
    /// `U = (X - 1 μᵀ) W`.
    Transform(Mat<f64>),
    Explicit(Mat<f64>),
}

/// Thin SVD of an optionally column-centered tall matrix, with the left
/// factor held implicitly where possible.
#[derive(Clone, Debug)]
pub struct TallSvd {
    center: Vec<f64>,
    singular_values: Vec<f64>,
    v: Mat<f64>,
    left: LeftFactor,
    nrows: usize,
}

impl TallSvd {
    /// Decomposes `x`, or `x` with its column means subtracted when
    /// `centered` is set.
    pub fn compute(x: &DataMatrix, centered: bool) -> Result<Self> {
        let (n, p) = (x.nrows(), x.ncols());
        if n < p {
            return Err(SubdataError::Dimension(format!(
                "thin SVD needs at least as many rows as columns, got {n}x{p}"
            )));
        }
        let center = if centered {
            x.column_means()
        } else {
            vec![0.0; p]
        };
        match gram_route(x, &center)? {
            Some(svd) => Ok(svd),
            None => householder_route(x, center),
        }
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn v(&self) -> MatRef<'_, f64> {
        self.v.as_ref()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn rank(&self) -> usize {
        numerical_rank(&self.singular_values, self.nrows.max(self.center.len()))
    }

    /// Writes row `i` of `U` into `out` (length `p`).
    pub fn u_row(&self, x: &DataMatrix, i: usize, out: &mut [f64]) {
        match &self.left {
            LeftFactor::Explicit(u) => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = u[(i, j)];
                }
            }
            LeftFactor::Transform(w) => {
                out.fill(0.0);
                for l in 0..x.ncols() {
                    let xc = x.get(i, l) - self.center[l];
                    if xc == 0.0 {
                        continue;
                    }
                    let wl = w.row(l);
                    for (j, o) in out.iter_mut().enumerate() {
                        *o += xc * wl[j];
                    }
                }
            }
        }
    }

    /// Rows `rows` of `U`, in the given order.
    pub fn u_rows(&self, x: &DataMatrix, rows: &[usize]) -> Mat<f64> {
        let p = x.ncols();
        match &self.left {
            LeftFactor::Explicit(u) => Mat::from_fn(rows.len(), p, |r, j| u[(rows[r], j)]),
            LeftFactor::Transform(w) => {
                let xc = Mat::from_fn(rows.len(), p, |r, j| x.get(rows[r], j) - self.center[j]);
                let mut out = Mat::zeros(rows.len(), p);
                matmul(out.as_mut(), Accum::Replace, xc.as_ref(), w.as_ref(), 1.0, Par::Seq);
                out
            }
        }
    }

    pub fn leverage(&self, x: &DataMatrix) -> LeverageVector {
        let rank = self.rank();
        let scores = match &self.left {
            LeftFactor::Explicit(u) => (0..u.nrows())
                .map(|i| (0..rank).map(|j| u[(i, j)] * u[(i, j)]).sum())
                .collect(),
            LeftFactor::Transform(w) => {
                let mut scores = Vec::with_capacity(x.nrows());
                let w = w.as_ref().subcols(0, rank);
                for_each_block(x, &self.center, w, |ublock| {
                    let m = ublock.nrows();
                    let start = scores.len();
                    scores.resize(start + m, 0.0);
                    for j in 0..ublock.ncols() {
                        let col = ublock.col(j);
                        for (i, s) in scores[start..].iter_mut().enumerate() {
                            *s += col[i] * col[i];
                        }
                    }
                });
                scores
            }
        };
        LeverageVector { scores, rank }
    }

    pub fn into_factors(self, x: &DataMatrix) -> Result<SvdFactors> {
        let u = match self.left {
            LeftFactor::Explicit(u) => u,
            LeftFactor::Transform(w) => {
                let mut u = Mat::zeros(x.nrows(), x.ncols());
                let mut row = 0;
                for_each_block(x, &self.center, w.as_ref(), |ublock| {
                    let m = ublock.nrows();
                    u.as_mut().subrows_mut(row, m).copy_from(ublock);
                    row += m;
                });
                u
            }
        };
        Ok(SvdFactors {
            u,
            singular_values: self.singular_values,
            v: self.v,
        })
    }
}

/// Copies rows `start..start + m` of `x - 1 μᵀ` into the top of `buf`.
fn fill_centered_block(x: &DataMatrix, center: &[f64], start: usize, buf: &mut Mat<f64>) -> usize {
    let m = BLOCK_ROWS.min(x.nrows() - start);
    for (j, &mu) in center.iter().enumerate() {
        let src = &x.column(j)[start..start + m];
        let dst = buf.col_mut(j).try_as_col_major_mut().expect("owned column is contiguous");
        for (d, &s) in dst.as_slice_mut()[..m].iter_mut().zip(src) {
            *d = s - mu;
        }
    }
    m
}

/// Streams `(X - 1 μᵀ) · transform` over row blocks.
fn for_each_block(
    x: &DataMatrix,
    center: &[f64],
    transform: MatRef<'_, f64>,
    mut f: impl FnMut(MatRef<'_, f64>),
) {
    let p = x.ncols();
    let block = BLOCK_ROWS.min(x.nrows());
    let mut buf = Mat::<f64>::zeros(block, p);
    let mut out = Mat::<f64>::zeros(block, transform.ncols());
    let mut start = 0;
    while start < x.nrows() {
        let m = fill_centered_block(x, center, start, &mut buf);
        matmul(
            out.as_mut().subrows_mut(0, m),
            Accum::Replace,
            buf.as_ref().subrows(0, m),
            transform,
            1.0,
            Par::Seq,
        );
        f(out.as_ref().subrows(0, m));
        start += m;
    }
}

/// Eigenpairs sorted by nonincreasing eigenvalue.
fn sym_eigen_desc(g: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = g
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| SubdataError::NumericFailure(format!("symmetric eigendecomposition: {e:?}")))?;
    let p = g.nrows();
    let s = evd.S().column_vector();
    let u = evd.U();
    let vals = (0..p).rev().map(|j| s[j]).collect();
    let vecs = Mat::from_fn(p, p, |i, j| u[(i, p - 1 - j)]);
    Ok((vals, vecs))
}

/// `V · diag(λ^{-1/2})`.
fn inverse_sqrt_scaled(vals: &[f64], vecs: &Mat<f64>) -> Mat<f64> {
    Mat::from_fn(vecs.nrows(), vecs.ncols(), |i, j| vecs[(i, j)] / vals[j].sqrt())
}

fn gram_route(x: &DataMatrix, center: &[f64]) -> Result<Option<TallSvd>> {
    let p = x.ncols();
    let block = BLOCK_ROWS.min(x.nrows());
    let mut buf = Mat::<f64>::zeros(block, p);
    let mut gram = Mat::<f64>::zeros(p, p);
    let mut start = 0;
    while start < x.nrows() {
        let m = fill_centered_block(x, center, start, &mut buf);
        let b = buf.as_ref().subrows(0, m);
        matmul(gram.as_mut(), Accum::Add, b.transpose(), b, 1.0, Par::Seq);
        start += m;
    }
    let (vals, vecs) = sym_eigen_desc(gram.as_ref())?;
    let (lmax, lmin) = (vals[0], vals[p - 1]);
    if !(lmax > 0.0) || !(lmin > lmax / GRAM_ROUTE_MAX_CONDITION) {
        return Ok(None);
    }
    let w1 = inverse_sqrt_scaled(&vals, &vecs);

    // Second pass: Gram matrix of the first-pass left factor, ideally I.
    let mut gram2 = Mat::<f64>::zeros(p, p);
    for_each_block(x, center, w1.as_ref(), |u1| {
        matmul(gram2.as_mut(), Accum::Add, u1.transpose(), u1, 1.0, Par::Seq);
    });
    let (vals2, vecs2) = sym_eigen_desc(gram2.as_ref())?;
    if !(vals2[p - 1] > 0.0) {
        return Ok(None);
    }
    let w2 = inverse_sqrt_scaled(&vals2, &vecs2);
    let mut w = Mat::<f64>::zeros(p, p);
    matmul(w.as_mut(), Accum::Replace, w1.as_ref(), w2.as_ref(), 1.0, Par::Seq);

    // X_c = U C with C = W⁻¹ = Λ₂^{1/2} V₂ᵀ Λ^{1/2} Vᵀ; rotate U by the SVD of C.
    let a = Mat::from_fn(p, p, |i, j| vals2[i].sqrt() * vecs2[(j, i)]);
    let b = Mat::from_fn(p, p, |i, j| vals[i].sqrt() * vecs[(j, i)]);
    let mut c = Mat::<f64>::zeros(p, p);
    matmul(c.as_mut(), Accum::Replace, a.as_ref(), b.as_ref(), 1.0, Par::Seq);
    let svd = c
        .svd()
        .map_err(|e| SubdataError::NumericFailure(format!("small SVD did not converge: {e:?}")))?;
    let mut wf = Mat::<f64>::zeros(p, p);
    matmul(wf.as_mut(), Accum::Replace, w.as_ref(), svd.U(), 1.0, Par::Seq);
    let s = svd.S().column_vector();
    let singular_values = (0..p).map(|j| s[j]).collect();

    Ok(Some(TallSvd {
        center: center.to_vec(),
        singular_values,
        v: svd.V().to_owned(),
        left: LeftFactor::Transform(wf),
        nrows: x.nrows(),
    }))
}

fn householder_route(x: &DataMatrix, center: Vec<f64>) -> Result<TallSvd> {
    let xc = Mat::from_fn(x.nrows(), x.ncols(), |i, j| x.get(i, j) - center[j]);
    let svd = xc
        .thin_svd()
        .map_err(|e| SubdataError::NumericFailure(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    Ok(TallSvd {
        singular_values: (0..x.ncols()).map(|j| s[j].max(0.0)).collect(),
        v: svd.V().to_owned(),
        left: LeftFactor::Explicit(svd.U().to_owned()),
        nrows: x.nrows(),
        center,
    })
}
