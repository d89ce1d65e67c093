//! Orthogonal subsampling.
//!
//! After scaling every column to `[-1, 1]`, rows are added greedily. The
//! discrepancy between a candidate `z` and a selected row `x` is
//!
//! ```text
//! ℓ(z, x) = (p - ‖z‖²/2 - ‖x‖²/2 + δ(z, x))²
//! ```
//!
//! where `δ` counts the coordinates on which both rows have the same strict
//! sign. Small losses favour rows far from the center and rows whose sign
//! pattern differs from what is already chosen. The first row is the one with
//! the largest norm; each later row minimizes the summed loss against the
//! selected set (ties to the lower row index).
//!
//! Each candidate's summed loss is kept up to date by adding its loss against
//! the newest selected row, so a round costs one loss evaluation per
//! remaining candidate.

use std::time::Instant;

use super::SelectionResult;
use crate::error::{Result, SubdataError};
use crate::linalg::DataMatrix;

/// Scaled rows reduced to what the loss needs: half squared norms and
/// strict-sign bitmasks.
pub(crate) struct SignedRows {
    p: usize,
    words: usize,
    half_norm: Vec<f64>,
    /// Per row: `words` positive-sign words followed by `words` negative ones.
    masks: Vec<u64>,
}

impl SignedRows {
    pub(crate) fn from_data(x: &DataMatrix) -> Result<Self> {
        let (n, p) = (x.nrows(), x.ncols());
        let words = p.div_ceil(64);
        let mut half_norm = vec![0.0; n];
        let mut masks = vec![0u64; n * 2 * words];
        for j in 0..p {
            let col = x.column(j);
            let (lo, hi) = col
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if hi <= lo {
                return Err(SubdataError::ConstantColumn { column: j, value: lo });
            }
            let (word, bit) = (j / 64, 1u64 << (j % 64));
            let span = hi - lo;
            for (i, &v) in col.iter().enumerate() {
                let z = 2.0 * (v - lo) / span - 1.0;
                half_norm[i] += 0.5 * z * z;
                let base = i * 2 * words;
                if z > 0.0 {
                    masks[base + word] |= bit;
                } else if z < 0.0 {
                    masks[base + words + word] |= bit;
                }
            }
        }
        Ok(Self {
            p,
            words,
            half_norm,
            masks,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.half_norm.len()
    }

    #[inline]
    fn shared_signs(&self, a: usize, b: usize) -> u32 {
        let w = self.words;
        let ma = &self.masks[a * 2 * w..(a + 1) * 2 * w];
        let mb = &self.masks[b * 2 * w..(b + 1) * 2 * w];
        (0..w)
            .map(|t| ((ma[t] & mb[t]) | (ma[w + t] & mb[w + t])).count_ones())
            .sum()
    }

    #[inline]
    pub(crate) fn loss(&self, a: usize, b: usize) -> f64 {
        let d = self.p as f64 - self.half_norm[a] - self.half_norm[b] + self.shared_signs(a, b) as f64;
        d * d
    }

    pub(crate) fn first_row(&self) -> usize {
        // Largest norm, lowest index on ties.
        let mut best = 0;
        for i in 1..self.len() {
            if self.half_norm[i] > self.half_norm[best] {
                best = i;
            }
        }
        best
    }
}

/// Summed discrepancy `Σ_{i<j} ℓ(z_i, z_j)` of a subset of rows, after scaling
/// over the full data.
pub fn oss_discrepancy(x: &DataMatrix, subset: &[usize]) -> Result<f64> {
    let rows = SignedRows::from_data(x)?;
    let mut total = 0.0;
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            total += rows.loss(i, j);
        }
    }
    Ok(total)
}

/// The seed is accepted for interface uniformity; the greedy is
/// deterministic and does not consume it.
pub fn select_oss(x: &DataMatrix, k: usize, _seed: u64) -> Result<SelectionResult> {
    let start = Instant::now();
    let n = x.nrows();
    if k < 2 {
        return Err(SubdataError::Config(format!("OSS needs k >= 2, got {k}")));
    }
    if n <= k {
        return Err(SubdataError::Config(format!("OSS needs n > k, got n = {n} with k = {k}")));
    }
    let rows = SignedRows::from_data(x)?;

    let mut last = rows.first_row();
    let mut selected = Vec::with_capacity(k);
    selected.push(last);
    let mut alive = vec![true; n];
    alive[last] = false;
    let mut score = vec![0.0; n];
    while selected.len() < k {
        let mut best = usize::MAX;
        let mut best_score = f64::INFINITY;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            score[i] += rows.loss(i, last);
            if score[i] < best_score {
                best = i;
                best_score = score[i];
            }
        }
        alive[best] = false;
        selected.push(best);
        last = best;
    }
    Ok(SelectionResult::new(selected, start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opposite_extremes_in_one_dimension() {
        let x = DataMatrix::from_rows(&[[-1.0], [-0.9], [0.9], [1.0]]).unwrap();
        let r = select_oss(&x, 2, 0).unwrap();
        let mut idx = r.indices.clone();
        idx.sort_unstable();
        assert_eq!(idx, vec![0, 3]);
    }

    #[test]
    fn constant_column_is_named() {
        let x = DataMatrix::from_rows(&[[1.0, 2.0], [3.0, 2.0], [0.0, 2.0]]).unwrap();
        match select_oss(&x, 2, 0) {
            Err(SubdataError::ConstantColumn { column, .. }) => assert_eq!(column, 1),
            other => panic!("expected constant-column error, got {other:?}"),
        }
    }

    #[test]
    fn sign_agreement_counts_strict_signs() {
        // Scaled rows: (-1, -1), (1, 1), (0, 1); the middle value of column 0
        // scales to exactly zero.
        let x = DataMatrix::from_rows(&[[0.0, 0.0], [2.0, 4.0], [1.0, 4.0]]).unwrap();
        let rows = SignedRows::from_data(&x).unwrap();
        assert_eq!(rows.shared_signs(0, 1), 0);
        assert_eq!(rows.shared_signs(1, 2), 1);
        assert_eq!(rows.shared_signs(1, 1), 2);
        // p - 1 - 1 + 0 = 0 for the opposite corners.
        assert_eq!(rows.loss(0, 1), 0.0);
    }

    #[test]
    fn wide_data_uses_multiple_mask_words() {
        let x = DataMatrix::from_fn(12, 70, |i, j| ((i * 31 + j * 17) % 11) as f64).unwrap();
        let rows = SignedRows::from_data(&x).unwrap();
        assert_eq!(rows.words, 2);
        let r = select_oss(&x, 5, 0).unwrap();
        assert_eq!(r.indices.len(), 5);
    }

    #[test]
    fn budget_errors() {
        let x = DataMatrix::from_fn(5, 2, |i, j| (i * (j + 1)) as f64).unwrap();
        assert!(select_oss(&x, 1, 0).is_err());
        assert!(select_oss(&x, 5, 0).is_err());
    }
}
