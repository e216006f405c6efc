//! Dense row-major matrices over `f64`.

use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{EntryLocation, Error, Result};

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from nested rows. Rows must be non-empty, equally long
    /// and finite.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(Error::DimMismatch {
                context: "matrix with no rows".into(),
                left: (0, 0),
                right: (1, 1),
            });
        }
        let ncols = rows[0].as_ref().len();
        if ncols == 0 {
            return Err(Error::DimMismatch {
                context: "matrix with empty rows".into(),
                left: (nrows, 0),
                right: (nrows, 1),
            });
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::RaggedRows {
                    row_set: 0,
                    row: i,
                    len: row.len(),
                    expected: ncols,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        at: EntryLocation {
                            member: 0,
                            row: i,
                            col: j,
                        },
                    });
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dims(), other.dims(), "matrix sum dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self::from_raw(self.rows, self.cols, data)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let dst = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (d, b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Self::from_raw(self.rows, other.cols, out)
    }

    pub fn scale(&self, t: f64) -> Matrix {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * t).collect(),
        )
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(self.cols, x.len(), "matrix-vector dimension mismatch");
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    pub fn pow(&self, k: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = self.mul(&acc);
        }
        acc
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::One => (0..self.cols)
                .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
                .fold(0.0, f64::max),
            NormKind::Inf => (0..self.rows)
                .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            NormKind::Frobenius => self.data.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    /// Bit pattern used for exact duplicate detection; `-0.0` folds into `0.0`.
    pub(crate) fn bit_key(&self) -> Vec<u64> {
        self.data.iter().map(|v| (v + 0.0).to_bits()).collect()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

/// Matrix norms available for product bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Maximum column sum.
    One,
    /// Maximum row sum.
    #[default]
    Inf,
    Frobenius,
}

impl std::str::FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "one" | "l1" => Ok(NormKind::One),
            "inf" | "infinity" | "linf" => Ok(NormKind::Inf),
            "fro" | "frobenius" => Ok(NormKind::Frobenius),
            other => Err(format!("unknown norm `{other}` (expected one, inf or frobenius)")),
        }
    }
}
