use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::SelectionResult;
use crate::error::{Result, SubdataError};
use crate::linalg::DataMatrix;

/// `k` rows drawn uniformly without replacement, returned in ascending order.
pub fn select_uniform(x: &DataMatrix, k: usize, seed: u64) -> Result<SelectionResult> {
    let start = Instant::now();
    let n = x.nrows();
    if k > n {
        return Err(SubdataError::Config(format!(
            "uniform sampling needs k <= n, got k = {k} with n = {n}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut indices = rand::seq::index::sample(&mut rng, n, k).into_vec();
    indices.sort_unstable();
    Ok(SelectionResult::new(indices, start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: usize) -> DataMatrix {
        DataMatrix::from_fn(n, 1, |i, _| i as f64).unwrap()
    }

    #[test]
    fn full_draw_returns_every_row() {
        let r = select_uniform(&data(9), 9, 3).unwrap();
        assert_eq!(r.indices, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn seeded_draws_repeat() {
        let x = data(100);
        assert_eq!(
            select_uniform(&x, 10, 5).unwrap().indices,
            select_uniform(&x, 10, 5).unwrap().indices
        );
        assert_ne!(
            select_uniform(&x, 10, 5).unwrap().indices,
            select_uniform(&x, 10, 6).unwrap().indices
        );
    }

    #[test]
    fn single_draw_frequencies_are_binomial() {
        let x = data(4);
        let draws = 10_000;
        let mut counts = [0usize; 4];
        for seed in 0..draws {
            counts[select_uniform(&x, 1, seed).unwrap().indices[0]] += 1;
        }
        let expected = draws as f64 / 4.0;
        let sd = (draws as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - expected).abs() <= 3.0 * sd, "count {c}");
        }
    }

    #[test]
    fn oversized_request_rejected() {
        assert!(matches!(select_uniform(&data(3), 4, 0), Err(SubdataError::Config(_))));
    }
}
