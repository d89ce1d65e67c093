use faer::{MatRef, Side};

use crate::error::{Result, SubdataError};

/// Eigenvalues at or below this fraction of the largest one count as zero.
pub const RANK_EPS: f64 = 1e-12;

/// Tolerated asymmetry, relative to the largest absolute entry.
const SYMMETRY_TOL: f64 = 1e-8;

/// `λ_max / λ_min` of a symmetric positive semidefinite matrix, or `+∞` when
/// the matrix is numerically singular (`λ_min ≤ RANK_EPS · λ_max`).
pub fn condition_number(b: MatRef<'_, f64>) -> Result<f64> {
    let p = b.nrows();
    if p != b.ncols() {
        return Err(SubdataError::Dimension(format!(
            "condition number needs a square matrix, got {}x{}",
            p,
            b.ncols()
        )));
    }
    if p == 0 {
        return Err(SubdataError::Dimension("empty matrix".into()));
    }
    let mut scale: f64 = 0.0;
    let mut asym: f64 = 0.0;
    for j in 0..p {
        for i in 0..p {
            let v = b[(i, j)];
            if !v.is_finite() {
                return Err(SubdataError::InvalidData(format!("non-finite entry at ({i}, {j})")));
            }
            scale = scale.max(v.abs());
            asym = asym.max((v - b[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale.max(1.0) {
        return Err(SubdataError::ContractViolation(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let eig = b
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| SubdataError::NumericFailure(format!("eigenvalues: {e:?}")))?;
    Ok(ratio_of_extremes(&eig))
}

/// Condition number from eigenvalues sorted in nondecreasing order.
pub(crate) fn ratio_of_extremes(eig: &[f64]) -> f64 {
    let lmin = eig[0];
    let lmax = eig[eig.len() - 1];
    if lmax <= 0.0 || lmin <= RANK_EPS * lmax {
        f64::INFINITY
    } else {
        lmax / lmin
    }
}

/// `log det((1/σ²) ZᵀZ)` for a `k × q` design `Z`; `-∞` when `ZᵀZ` is
/// singular.
///
/// Computed from the diagonal of a column-pivoted QR factor of `Z`, so the
/// Gram matrix is never formed.
pub fn logdet_info(z: MatRef<'_, f64>, sigma2: f64) -> Result<f64> {
    let (k, q) = (z.nrows(), z.ncols());
    if q == 0 {
        return Err(SubdataError::Dimension("design has no columns".into()));
    }
    if k < q {
        return Err(SubdataError::InsufficientRows {
            required: q,
            actual: k,
        });
    }
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(SubdataError::Config(format!(
            "noise variance must be positive and finite, got {sigma2}"
        )));
    }
    let qr = z.col_piv_qr();
    let r = qr.thin_R();
    let diag: Vec<f64> = (0..q).map(|j| r[(j, j)].abs()).collect();
    let rmax = diag.iter().copied().fold(0.0, f64::max);
    let tol = k.max(q) as f64 * f64::EPSILON * rmax;
    if rmax == 0.0 || diag.iter().any(|&d| d <= tol) {
        return Ok(f64::NEG_INFINITY);
    }
    let logdet_gram: f64 = 2.0 * diag.iter().map(|d| d.ln()).sum::<f64>();
    Ok(logdet_gram - q as f64 * sigma2.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::Mat;

    #[test]
    fn identity_has_unit_condition() {
        for p in 1..5 {
            let id = Mat::<f64>::identity(p, p);
            assert_eq!(condition_number(id.as_ref()).unwrap(), 1.0);
        }
    }

    #[test]
    fn diagonal_condition() {
        let b = Mat::from_fn(2, 2, |i, j| if i == j { [4.0, 1.0][i] } else { 0.0 });
        assert!((condition_number(b.as_ref()).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn singular_is_infinite() {
        let b = Mat::from_fn(2, 2, |_, _| 1.0);
        assert_eq!(condition_number(b.as_ref()).unwrap(), f64::INFINITY);
        let zero = Mat::<f64>::zeros(3, 3);
        assert_eq!(condition_number(zero.as_ref()).unwrap(), f64::INFINITY);
    }

    #[test]
    fn asymmetric_rejected() {
        let b = Mat::from_fn(2, 2, |i, j| if i == 0 && j == 1 { 1.0 } else { 2.0 });
        assert!(matches!(
            condition_number(b.as_ref()),
            Err(SubdataError::ContractViolation(_))
        ));
    }

    #[test]
    fn logdet_identity_and_scaled() {
        let id = Mat::<f64>::identity(3, 3);
        assert!(logdet_info(id.as_ref(), 1.0).unwrap().abs() < 1e-14);
        let two = Mat::from_fn(2, 2, |i, j| if i == j { 2.0 } else { 0.0 });
        assert!((logdet_info(two.as_ref(), 1.0).unwrap() - 16f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn logdet_errors_and_singular() {
        let z = Mat::<f64>::zeros(2, 3);
        assert!(matches!(
            logdet_info(z.as_ref(), 1.0),
            Err(SubdataError::InsufficientRows { required: 3, actual: 2 })
        ));
        let z = Mat::from_fn(4, 2, |i, _| i as f64);
        assert_eq!(logdet_info(z.as_ref(), 1.0).unwrap(), f64::NEG_INFINITY);
        let id = Mat::<f64>::identity(2, 2);
        assert!(logdet_info(id.as_ref(), 0.0).is_err());
    }
}
