use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Square or rectangular matrix in compressed sparse row form. Column
/// indices within a row are sorted and unique.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Clone, Debug)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    rows: Vec<BTreeMap<usize, f64>>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletBuilder {
            nrows,
            ncols,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.nrows && j < self.ncols, "entry ({i},{j}) out of bounds");
        *self.rows[i].entry(j).or_insert(0.0) += v;
    }

    /// Overwrites an entry instead of accumulating.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.nrows && j < self.ncols, "entry ({i},{j}) out of bounds");
        self.rows[i].insert(j, v);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.rows[i].get(&j).copied()
    }

    pub fn build(self) -> SparseMatrix {
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in self.rows {
            for (j, v) in row {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl SparseMatrix {
    pub fn identity(n: usize) -> Self {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.add(i, i, 1.0);
        }
        b.build()
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut b = TripletBuilder::new(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    b.add(i, j, m[(i, j)]);
                }
            }
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut b = TripletBuilder::new(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                b.add(j, i, v);
            }
        }
        b.build()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `‖A − Aᵀ‖_F / ‖A‖_F`.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut diff = 0.0;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                let d = v - self.get(j, i);
                diff += d * d;
            }
        }
        // Entries present only in the transpose are counted from their own row.
        diff.sqrt() / norm
    }

    pub fn check_symmetric(&self, rel_tol: f64) -> Result<()> {
        let a = self.asymmetry();
        if a > rel_tol {
            Err(Error::NotSymmetric(a))
        } else {
            Ok(())
        }
    }

    /// Sub-matrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (k, &j) in cols.iter().enumerate() {
            col_map[j] = k;
        }
        let mut b = TripletBuilder::new(rows.len(), cols.len());
        for (ri, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                let cj = col_map[j];
                if cj != usize::MAX {
                    b.add(ri, cj, v);
                }
            }
        }
        b.build()
    }

    /// `a·self + b·other` for matrices of equal shape.
    pub fn add_scaled(&self, a: f64, other: &SparseMatrix, b: f64) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = TripletBuilder::new(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                t.add(i, j, a * v);
            }
            for (j, v) in other.row(i) {
                t.add(i, j, b * v);
            }
        }
        t.build()
    }

    pub fn scale(&self, s: f64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Block matrix `[[a, b], [bᵀ, c]]`; `c` may be absent (zero block).
    pub fn saddle(a: &SparseMatrix, b: &SparseMatrix, c: Option<&SparseMatrix>) -> SparseMatrix {
        assert_eq!(a.nrows, a.ncols);
        assert_eq!(b.nrows, a.nrows);
        let n = a.nrows;
        let m = b.ncols;
        let mut t = TripletBuilder::new(n + m, n + m);
        for i in 0..n {
            for (j, v) in a.row(i) {
                t.add(i, j, v);
            }
            for (j, v) in b.row(i) {
                t.add(i, n + j, v);
                t.add(n + j, i, v);
            }
        }
        if let Some(c) = c {
            assert_eq!((c.nrows, c.ncols), (m, m));
            for i in 0..m {
                for (j, v) in c.row(i) {
                    t.add(n + i, n + j, v);
                }
            }
        }
        t.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_sums_duplicates_and_sorts() {
        let mut b = TripletBuilder::new(2, 3);
        b.add(0, 2, 1.0);
        b.add(0, 0, 2.0);
        b.add(0, 2, 0.5);
        b.add(1, 1, -1.0);
        let m = b.build();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 2), 1.5);
        assert_eq!(m.row(0).map(|(j, _)| j).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 2.0]), vec![5.0, -1.0]);
    }

    #[test]
    fn asymmetry_detects_lower_only_entries() {
        let mut b = TripletBuilder::new(2, 2);
        b.add(1, 0, 1.0);
        b.add(0, 0, 1.0);
        assert!(b.build().asymmetry() > 0.1);
        assert_eq!(SparseMatrix::identity(3).asymmetry(), 0.0);
    }

    #[test]
    fn saddle_layout() {
        let a = SparseMatrix::identity(2);
        let b = SparseMatrix::from_dense(&DMatrix::from_row_slice(2, 1, &[1.0, 2.0]));
        let k = SparseMatrix::saddle(&a, &b, None).to_dense();
        assert_eq!(k, DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 2.0, 1.0, 2.0, 0.0]));
    }
}
