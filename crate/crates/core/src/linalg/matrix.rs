use faer::{Mat, MatRef};

use crate::error::{Result, SubdataError};

/// Dense `n × p` covariate matrix with an optional response vector.
///
/// Values are stored column-major in a single contiguous buffer so that a
/// covariate column is a plain slice and the whole matrix can be handed to
/// faer as a zero-copy view.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    nrows: usize,
    ncols: usize,
    values: Vec<f64>,
    response: Option<Vec<f64>>,
}

impl DataMatrix {
    /// Builds a matrix from a column-major buffer of length `nrows * ncols`.
    pub fn from_col_major(nrows: usize, ncols: usize, values: Vec<f64>) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(SubdataError::Dimension(format!(
                "matrix must be at least 1x1, got {nrows}x{ncols}"
            )));
        }
        if values.len() != nrows * ncols {
            return Err(SubdataError::Dimension(format!(
                "buffer of length {} cannot hold a {nrows}x{ncols} matrix",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SubdataError::InvalidData(format!(
                "non-finite entry {} at row {}, column {}",
                values[pos],
                pos % nrows,
                pos / nrows
            )));
        }
        Ok(Self {
            nrows,
            ncols,
            values,
            response: None,
        })
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                values.push(f(i, j));
            }
        }
        Self::from_col_major(nrows, ncols, values)
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != ncols) {
            return Err(SubdataError::Dimension(format!(
                "row {bad} has {} entries, expected {ncols}",
                rows[bad].as_ref().len()
            )));
        }
        Self::from_fn(nrows, ncols, |i, j| rows[i].as_ref()[j])
    }

    pub fn from_mat(m: MatRef<'_, f64>) -> Result<Self> {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Attaches a response vector, which must have exactly one entry per row.
    pub fn with_response(mut self, response: Vec<f64>) -> Result<Self> {
        if response.len() != self.nrows {
            return Err(SubdataError::Dimension(format!(
                "response has length {}, expected {}",
                response.len(),
                self.nrows
            )));
        }
        if let Some(pos) = response.iter().position(|v| !v.is_finite()) {
            return Err(SubdataError::InvalidData(format!(
                "non-finite response {} at row {pos}",
                response[pos]
            )));
        }
        self.response = Some(response);
        Ok(self)
    }

    pub fn without_response(mut self) -> Self {
        self.response = None;
        self
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nrows + i]
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.ncols).map(|j| self.get(i, j)).collect()
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.values
    }

    pub fn view(&self) -> MatRef<'_, f64> {
        MatRef::from_column_major_slice(&self.values, self.nrows, self.ncols)
    }

    pub fn to_mat(&self) -> Mat<f64> {
        self.view().to_owned()
    }

    pub fn response(&self) -> Option<&[f64]> {
        self.response.as_deref()
    }

    pub fn column_means(&self) -> Vec<f64> {
        (0..self.ncols)
            .map(|j| self.column(j).iter().sum::<f64>() / self.nrows as f64)
            .collect()
    }

    /// Copies the listed rows (and their responses) into a new matrix, in the
    /// given order. Indices may repeat.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.nrows) {
            return Err(SubdataError::Dimension(format!(
                "row index {bad} out of range for {} rows",
                self.nrows
            )));
        }
        let k = indices.len();
        let mut values = Vec::with_capacity(k * self.ncols);
        for j in 0..self.ncols {
            let col = self.column(j);
            values.extend(indices.iter().map(|&i| col[i]));
        }
        let mut out = Self::from_col_major(k, self.ncols, values)?;
        if let Some(y) = &self.response {
            out.response = Some(indices.iter().map(|&i| y[i]).collect());
        }
        Ok(out)
    }

    /// Returns a copy with the columns listed in `cols`, in that order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&j| j >= self.ncols) {
            return Err(SubdataError::Dimension(format!(
                "column index {bad} out of range for {} columns",
                self.ncols
            )));
        }
        let mut values = Vec::with_capacity(self.nrows * cols.len());
        for &j in cols {
            values.extend_from_slice(self.column(j));
        }
        let mut out = Self::from_col_major(self.nrows, cols.len(), values)?;
        out.response = self.response.clone();
        Ok(out)
    }

    /// `k × (p + 1)` design with a leading column of ones.
    pub fn augmented(&self) -> Mat<f64> {
        Mat::from_fn(self.nrows, self.ncols + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                self.get(i, j - 1)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(DataMatrix::from_col_major(0, 2, vec![]).is_err());
        assert!(DataMatrix::from_col_major(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DataMatrix::from_col_major(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn response_length_must_match() {
        let x = DataMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert!(x.clone().with_response(vec![1.0]).is_err());
        let x = x.with_response(vec![5.0, 6.0]).unwrap();
        assert_eq!(x.response(), Some(&[5.0, 6.0][..]));
    }

    #[test]
    fn rows_and_columns() {
        let x = DataMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
            .unwrap()
            .with_response(vec![7.0, 8.0, 9.0])
            .unwrap();
        assert_eq!(x.column(1), &[2.0, 4.0, 6.0]);
        assert_eq!(x.row(2), vec![5.0, 6.0]);
        let sub = x.select_rows(&[2, 0]).unwrap();
        assert_eq!(sub.row(0), vec![5.0, 6.0]);
        assert_eq!(sub.response(), Some(&[9.0, 7.0][..]));
        assert_eq!(x.column_means(), vec![3.0, 4.0]);
        let z = x.augmented();
        assert_eq!((z[(1, 0)], z[(1, 1)], z[(1, 2)]), (1.0, 3.0, 4.0));
    }
}
