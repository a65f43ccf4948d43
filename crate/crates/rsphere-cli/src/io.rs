//! JSON matrix documents and CSV sweep tables.
//!
//! Matrices travel as JSON objects with fields `rows`, `cols`, `data`, where
//! `data` is the row-major list of `[re, im]` pairs. serde_json prints f64
//! values with the shortest representation that round-trips, so written
//! documents reproduce their entries bit-exactly when read back. Sweep
//! tables are plain CSV: header row, comma separators, LF line endings,
//! 12 significant digits.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rsphere::CMat;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &CMat) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        MatrixDocument { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_matrix(&self) -> Result<CMat, CliError> {
        if self.data.len() != self.rows * self.cols {
            return Err(CliError::Parse(format!(
                "matrix document has {} entries, expected rows*cols = {}",
                self.data.len(),
                self.rows * self.cols
            )));
        }
        if self.data.iter().any(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(CliError::Parse("matrix document contains non-finite entries".into()));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            Complex64::new(re, im)
        }))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string(self).expect("matrix document serializes");
        std::fs::write(path, text)
            .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn read_matrix(path: &Path) -> Result<CMat, CliError> {
    MatrixDocument::read(path)?.to_matrix()
}

/// Column-oriented table of aligned real series.
#[derive(Debug, Clone, Default)]
pub struct SweepTable {
    columns: Vec<(String, Vec<f64>)>,
}

impl SweepTable {
    pub fn new(names: &[&str]) -> Self {
        SweepTable { columns: names.iter().map(|n| (n.to_string(), Vec::new())).collect() }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        for (col, &v) in self.columns.iter_mut().zip(row.iter()) {
            col.1.push(v);
        }
    }

    /// CSV with 12 significant digits, LF line endings.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let header: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        out.write_all(header.join(",").as_bytes())?;
        out.write_all(b"\n")?;
        let rows = self.columns.first().map(|(_, v)| v.len()).unwrap_or(0);
        for i in 0..rows {
            let line: Vec<String> =
                self.columns.iter().map(|(_, v)| format_sig(v[i])).collect();
            out.write_all(line.join(",").as_bytes())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// 12 significant digits, scientific notation, locale-free.
pub fn format_sig(x: f64) -> String {
    format!("{x:.11e}")
}
