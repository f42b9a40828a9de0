//! Compressed sparse row storage.

use std::collections::BTreeMap;

/// Anything that can compute `y = M x`.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Row-compressed sparse matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` contributions; duplicates are summed on
/// [`TripletBuilder::finalize`].
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sums duplicates in insertion order (deterministic) and drops exact zeros.
    pub fn finalize(self) -> CsrMatrix {
        let Self {
            nrows,
            ncols,
            entries,
        } = self;
        let mut counts = vec![0usize; nrows + 1];
        for &(r, _, _) in &entries {
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        // bucket by row while preserving insertion order
        let mut cursor = counts.clone();
        let mut cols = vec![0usize; entries.len()];
        let mut vals = vec![0.0; entries.len()];
        for &(r, c, v) in &entries {
            let k = cursor[r];
            cols[k] = c;
            vals[k] = v;
            cursor[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for r in 0..nrows {
            scratch.clear();
            for k in counts[r]..counts[r + 1] {
                scratch.push((cols[k], vals[k]));
            }
            // stable sort keeps summation order fixed for equal columns
            scratch.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < scratch.len() {
                let c = scratch[k].0;
                let mut sum = 0.0;
                while k < scratch.len() && scratch[k].0 == c {
                    sum += scratch[k].1;
                    k += 1;
                }
                if sum != 0.0 {
                    col_idx.push(c);
                    values.push(sum);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut t = TripletBuilder::new(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.add(i, j, v);
                }
            }
        }
        t.finalize()
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut t = TripletBuilder::new(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            t.add(i, i, d);
        }
        t.finalize()
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

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `(columns, values)` of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                s += v * x[c];
            }
            *yi = s;
        }
    }

    /// `y = Mᵀ x`.
    pub fn transpose_matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                t.add(c, i, v);
            }
        }
        t.finalize()
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }

    /// `self * diag(d) * other` for conforming shapes; used to form
    /// `B diag(A)⁻¹ Bᵀ`.
    pub fn mul_diag_mul(&self, d: &[f64], other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, d.len());
        assert_eq!(other.nrows, d.len());
        let mut row_acc: BTreeMap<usize, f64> = BTreeMap::new();
        let mut t = TripletBuilder::new(self.nrows, other.ncols);
        for i in 0..self.nrows {
            row_acc.clear();
            let (cols, vals) = self.row(i);
            for (&k, &a) in cols.iter().zip(vals) {
                let s = a * d[k];
                let (oc, ov) = other.row(k);
                for (&j, &b) in oc.iter().zip(ov) {
                    *row_acc.entry(j).or_insert(0.0) += s * b;
                }
            }
            for (&j, &v) in &row_acc {
                t.add(i, j, v);
            }
        }
        t.finalize()
    }

    /// Entrywise `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        let mut t = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                t.add(i, j, x);
            }
            let (c, v) = other.row(i);
            for (&j, &x) in c.iter().zip(v) {
                t.add(i, j, alpha * x);
            }
        }
        t.finalize()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|M_ij - M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                worst = worst.max((x - t.get(i, j)).abs());
            }
            let (c, v) = t.row(i);
            for (&j, &x) in c.iter().zip(v) {
                worst = worst.max((x - self.get(i, j)).abs());
            }
        }
        worst
    }

    /// Assemble `[[a, b_up], [b_low, c]]` from four blocks.
    pub fn block_2x2(a: &CsrMatrix, b_up: &CsrMatrix, b_low: &CsrMatrix, c: &CsrMatrix) -> CsrMatrix {
        let n = a.nrows;
        let m = c.nrows;
        assert_eq!(a.ncols, n);
        assert_eq!(b_up.nrows, n);
        assert_eq!(b_up.ncols, m);
        assert_eq!(b_low.nrows, m);
        assert_eq!(b_low.ncols, n);
        assert_eq!(c.ncols, m);
        let mut t = TripletBuilder::with_capacity(n + m, n + m, a.nnz() + b_up.nnz() + b_low.nnz() + c.nnz());
        for i in 0..n {
            let (cc, vv) = a.row(i);
            for (&j, &x) in cc.iter().zip(vv) {
                t.add(i, j, x);
            }
            let (cc, vv) = b_up.row(i);
            for (&j, &x) in cc.iter().zip(vv) {
                t.add(i, n + j, x);
            }
        }
        for i in 0..m {
            let (cc, vv) = b_low.row(i);
            for (&j, &x) in cc.iter().zip(vv) {
                t.add(n + i, j, x);
            }
            let (cc, vv) = c.row(i);
            for (&j, &x) in cc.iter().zip(vv) {
                t.add(n + i, n + j, x);
            }
        }
        t.finalize()
    }
}

impl LinearOperator for CsrMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }
}

/// The identity operator of a given size.
#[derive(Debug, Clone, Copy)]
pub struct IdentityOperator(pub usize);

impl LinearOperator for IdentityOperator {
    fn nrows(&self) -> usize {
        self.0
    }

    fn ncols(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let mut t = TripletBuilder::new(2, 2);
        t.add(0, 1, 1.0);
        t.add(0, 1, 2.0);
        t.add(1, 0, 1.0);
        t.add(1, 0, -1.0);
        t.add(1, 1, 4.0);
        let m = t.finalize();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.row(1).0, &[1]);
    }

    #[test]
    fn transpose_matvec_matches_transpose() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![0.0, -1.0, 3.0]]);
        let x = [0.5, -2.0];
        assert_eq!(m.transpose_matvec(&x), m.transpose().matvec(&x));
    }

    #[test]
    fn triple_product_with_diagonal() {
        let b = CsrMatrix::from_dense(&[vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 2.0]]);
        let s = b.mul_diag_mul(&[1.0, 0.5, 0.25], &b.transpose());
        // B diag(d) Bᵀ by hand
        assert_eq!(s.to_dense(), vec![vec![1.5, 0.5], vec![0.5, 1.5]]);
    }
}
