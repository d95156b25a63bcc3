//! Minimal row-major matrices. Datasets here are small and dense; these two
//! types avoid pulling a linear-algebra crate into every signature.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major Boolean matrix (the attribute vectors x⁽ʲ⁾).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMat {
    data: Vec<bool>,
    rows: usize,
    cols: usize,
}

impl BoolMat {
    pub fn from_vec(data: Vec<bool>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::parameter(format!(
                "boolean matrix: {} values for {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(BoolMat { data, rows, cols })
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::parameter("boolean matrix: ragged rows"));
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(BoolMat {
            data,
            rows: rows.len(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[bool]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    /// Keep the rows whose indices are listed, in list order.
    pub fn select_rows(&self, idx: &[usize]) -> BoolMat {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        BoolMat {
            data,
            rows: idx.len(),
            cols: self.cols,
        }
    }
}

/// Row-major real matrix (the regression vectors y⁽ʲ⁾).
#[derive(Debug, Clone, PartialEq)]
pub struct RealMat<T> {
    data: Vec<T>,
    rows: usize,
    cols: usize,
}

impl<T: Scalar> RealMat<T> {
    pub fn from_vec(data: Vec<T>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::parameter(format!(
                "real matrix: {} values for {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(RealMat { data, rows, cols })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::parameter("real matrix: ragged rows"));
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(RealMat {
            data,
            rows: rows.len(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn select_rows(&self, idx: &[usize]) -> RealMat<T> {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        RealMat {
            data,
            rows: idx.len(),
            cols: self.cols,
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> RealMat<T> {
        RealMat {
            data: self.data.iter().map(|&v| f(v)).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    /// Euclidean norm of row `i`.
    pub fn row_norm_l2(&self, i: usize) -> T {
        self.row(i)
            .iter()
            .map(|&v| v * v)
            .fold(T::zero(), |acc, v| acc + v)
            .sqrt()
    }
}
