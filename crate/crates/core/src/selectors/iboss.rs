//! Information-based optimal subdata selection.
//!
//! Covariates are visited in column order. For each one the rows with the
//! smallest and the largest values among the rows not yet taken are added.
//! With `r = ⌊k / 2p⌋` rows per side and remainder `k - 2pr`, the leading
//! covariates each get one extra min/max pair, and an odd leftover row goes
//! to the max side of the next covariate.

use std::cmp::Ordering;
use std::time::Instant;

use super::SelectionResult;
use crate::error::{Result, SubdataError};
use crate::linalg::DataMatrix;

/// Per-covariate `(min count, max count)`.
pub(crate) fn side_counts(k: usize, p: usize) -> Vec<(usize, usize)> {
    let r = k / (2 * p);
    let rem = k - 2 * p * r;
    let extra_pairs = rem / 2;
    (0..p)
        .map(|j| {
            let lo = r + usize::from(j < extra_pairs);
            let hi = lo + usize::from(rem % 2 == 1 && j == extra_pairs);
            (lo, hi)
        })
        .collect()
}

fn by_value(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

pub fn select_iboss(x: &DataMatrix, k: usize) -> Result<SelectionResult> {
    let start = Instant::now();
    let (n, p) = (x.nrows(), x.ncols());
    if k < 2 * p {
        return Err(SubdataError::Config(format!(
            "IBOSS needs k >= 2p to take one min and one max per covariate, got k = {k} with p = {p}"
        )));
    }
    if n < k {
        return Err(SubdataError::Config(format!("IBOSS needs n >= k, got n = {n} with k = {k}")));
    }

    let mut taken = vec![false; n];
    let mut indices = Vec::with_capacity(k);
    let mut pool: Vec<(f64, usize)> = Vec::with_capacity(n);
    for (j, (lo, hi)) in side_counts(k, p).into_iter().enumerate() {
        pool.clear();
        pool.extend(
            x.column(j)
                .iter()
                .enumerate()
                .filter(|&(i, _)| !taken[i])
                .map(|(i, &v)| (v, i)),
        );
        if lo > 0 {
            pool.select_nth_unstable_by(lo - 1, by_value);
            let smallest = &mut pool[..lo];
            smallest.sort_unstable_by(by_value);
            for &(_, i) in smallest.iter() {
                taken[i] = true;
                indices.push(i);
            }
        }
        if hi > 0 {
            let rest = &mut pool[lo..];
            let m = rest.len();
            rest.select_nth_unstable_by(m - hi, by_value);
            let largest = &mut rest[m - hi..];
            largest.sort_unstable_by(|a, b| by_value(b, a));
            for &(_, i) in largest.iter() {
                taken[i] = true;
                indices.push(i);
            }
        }
    }
    Ok(SelectionResult::new(indices, start.elapsed()))
}
