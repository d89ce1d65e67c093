//! Brute-force reference computations shared by the integration tests. None
//! of these go through the library's linear algebra.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subdata::DataMatrix;

/// Rows of `x`, optionally with a leading 1.
pub fn rows(x: &DataMatrix, intercept: bool) -> Vec<Vec<f64>> {
    (0..x.nrows())
        .map(|i| {
            let mut r = Vec::with_capacity(x.ncols() + 1);
            if intercept {
                r.push(1.0);
            }
            r.extend(x.row(i));
            r
        })
        .collect()
}

pub fn gram(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let q = rows[0].len();
    let mut g = vec![vec![0.0; q]; q];
    for r in rows {
        for a in 0..q {
            for b in 0..q {
                g[a][b] += r[a] * r[b];
            }
        }
    }
    g
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let q = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..q).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..q {
        let piv = (c..q).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        let d = a[c][c];
        for v in a[c].iter_mut() {
            *v /= d;
        }
        for r in 0..q {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    for j in 0..2 * q {
                        a[r][j] -= f * a[c][j];
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[q..].to_vec()).collect())
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &[Vec<f64>]) -> f64 {
    let q = m.len();
    let mut a = m.to_vec();
    let mut d = 1.0;
    for c in 0..q {
        let piv = (c..q).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(c, piv);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..q {
            let f = a[r][c] / a[c][c];
            for j in c..q {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    d
}

/// `diag(X (XᵀX)⁻¹ Xᵀ)` formed explicitly.
pub fn hat_diagonal(x: &DataMatrix, intercept: bool) -> Vec<f64> {
    let r = rows(x, intercept);
    let inv = invert(&gram(&r)).expect("full column rank");
    r.iter()
        .map(|xi| {
            let mut h = 0.0;
            for a in 0..xi.len() {
                for b in 0..xi.len() {
                    h += xi[a] * inv[a][b] * xi[b];
                }
            }
            h
        })
        .collect()
}

pub fn gaussian_matrix(n: usize, p: usize, seed: u64) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DataMatrix::from_fn(n, p, |_, _| rng.random_range(-3.0..3.0)).unwrap()
}

/// Indices of the `k` largest values, ties to the lower index.
pub fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

pub fn all_distinct(v: &[f64], tol: f64) -> bool {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).all(|w| w[1] - w[0] > tol)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Least-squares coefficients of `y` on `[1, X]` through the normal equations.
pub fn normal_equations(x: &DataMatrix, y: &[f64]) -> Vec<f64> {
    let r = rows(x, true);
    let inv = invert(&gram(&r)).expect("full column rank");
    let q = r[0].len();
    let mut zty = vec![0.0; q];
    for (zi, yi) in r.iter().zip(y) {
        for a in 0..q {
            zty[a] += zi[a] * yi;
        }
    }
    (0..q).map(|a| (0..q).map(|b| inv[a][b] * zty[b]).sum()).collect()
}
