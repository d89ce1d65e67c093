use std::fs::File;
use std::path::Path;

use crate::error::{Result, SubdataError};
use crate::linalg::DataMatrix;

/// Which header columns become covariates and which one is the response.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ColumnSpec {
    /// `None` takes every column other than the response, in file order.
    pub covariates: Option<Vec<String>>,
    pub response: Option<String>,
    /// Replace the response by its natural logarithm.
    pub log_response: bool,
}

fn find(header: &csv::StringRecord, name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| SubdataError::MissingColumn(name.to_string()))
}

/// Parse errors report the offending cell as `(data row, column)`, both
/// counted from 1 with the header excluded from the row count.
pub fn read_csv(path: &Path, columns: &ColumnSpec) -> Result<DataMatrix> {
    let file = File::open(path).map_err(|e| SubdataError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let header = reader.headers()?.clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(SubdataError::EmptyInput(format!("{} has no header", path.display())));
    }
    let response_col = columns.response.as_deref().map(|r| find(&header, r)).transpose()?;
    let covariate_cols: Vec<usize> = match &columns.covariates {
        Some(names) => names.iter().map(|c| find(&header, c)).collect::<Result<_>>()?,
        None => (0..header.len()).filter(|&c| Some(c) != response_col).collect(),
    };
    if covariate_cols.is_empty() {
        return Err(SubdataError::EmptyInput("no covariate columns".into()));
    }

    let parse = |rec: &csv::StringRecord, row: usize, col: usize| -> Result<f64> {
        let cell = rec.get(col).unwrap_or("");
        cell.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| SubdataError::ParseCell {
                row,
                column: col + 1,
                value: cell.to_string(),
            })
    };

    let p = covariate_cols.len();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); p];
    let mut y = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = r + 1;
        for (dst, &c) in cols.iter_mut().zip(&covariate_cols) {
            dst.push(parse(&rec, row, c)?);
        }
        if let Some(c) = response_col {
            let mut v = parse(&rec, row, c)?;
            if columns.log_response {
                if v <= 0.0 {
                    return Err(SubdataError::InvalidData(format!(
                        "row {row}: cannot take the logarithm of response {v}"
                    )));
                }
                v = v.ln();
            }
            y.push(v);
        }
    }
    let n = y.len().max(cols[0].len());
    if n == 0 {
        return Err(SubdataError::EmptyInput(format!("{} has no data rows", path.display())));
    }
    let x = DataMatrix::from_col_major(n, p, cols.concat())?;
    if response_col.is_some() {
        x.with_response(y)
    } else {
        Ok(x)
    }
}

/// Header `x1, …, xp` and, when present, `y` last.
pub fn write_dataset_csv(path: &Path, data: &DataMatrix) -> Result<()> {
    let file = File::create(path).map_err(|e| SubdataError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header: Vec<String> = (1..=data.ncols()).map(|j| format!("x{j}")).collect();
    if data.response().is_some() {
        header.push("y".into());
    }
    w.write_record(&header)?;
    let mut fields = Vec::with_capacity(header.len());
    for i in 0..data.nrows() {
        fields.clear();
        fields.extend((0..data.ncols()).map(|j| data.get(i, j).to_string()));
        if let Some(y) = data.response() {
            fields.push(y[i].to_string());
        }
        w.write_record(&fields)?;
    }
    w.flush().map_err(|e| SubdataError::io(path, e))?;
    Ok(())
}
