//! Dense 0/1 matrix, row-major, one byte per cell.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinaryMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<u8>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::invalid(format!("row {i} has {} cells, expected {cols}", r.len())));
            }
            if r.iter().any(|&b| b > 1) {
                return Err(Error::invalid(format!("row {i} has a non-binary cell")));
            }
            data.extend(r);
        }
        Ok(BinaryMatrix { rows: n, cols, data })
    }

    pub fn from_raw(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!("{} cells for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|&b| b > 1) {
            return Err(Error::invalid("non-binary cell"));
        }
        Ok(BinaryMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row * self.cols + col] = value as u8;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Columns laid out contiguously, `out[j]` holding column `j`.
    pub fn columns(&self) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::with_capacity(self.rows); self.cols];
        for i in 0..self.rows {
            for (col, &b) in out.iter_mut().zip(self.row(i)) {
                col.push(b);
            }
        }
        out
    }

    /// Submatrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> BinaryMatrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            let r = self.row(i);
            data.extend(cols.iter().map(|&j| r[j]));
        }
        BinaryMatrix { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> BinaryMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        BinaryMatrix { rows: rows.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, cols: &[usize]) -> BinaryMatrix {
        let all: Vec<usize> = (0..self.rows).collect();
        self.select(&all, cols)
    }
}
