//! Gauss-Seidel and zero-fill incomplete LU.

use super::sparse::CsrMatrix;
use crate::error::SolveError;

fn diagonal_checked(m: &CsrMatrix) -> Result<Vec<f64>, SolveError> {
    let d = m.diagonal();
    match d.iter().position(|&v| v == 0.0) {
        Some(row) => Err(SolveError::ZeroDiagonal { row }),
        None => Ok(d),
    }
}

/// `k` forward Gauss-Seidel sweeps on `M x = b`, starting from `x0`.
pub fn gauss_seidel_sweeps(m: &CsrMatrix, x0: &[f64], b: &[f64], k: usize) -> Result<Vec<f64>, SolveError> {
    let d = diagonal_checked(m)?;
    let mut x = x0.to_vec();
    for _ in 0..k {
        forward_sweep(m, &d, b, &mut x);
    }
    Ok(x)
}

fn forward_sweep(m: &CsrMatrix, d: &[f64], b: &[f64], x: &mut [f64]) {
    for i in 0..m.nrows() {
        let (cols, vals) = m.row(i);
        let mut s = b[i];
        for (&j, &v) in cols.iter().zip(vals) {
            if j != i {
                s -= v * x[j];
            }
        }
        x[i] = s / d[i];
    }
}

/// Approximate inverse used inside Krylov iterations.
pub trait Preconditioner {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<(), SolveError>;
}

/// No preconditioning.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoPreconditioner;

impl Preconditioner for NoPreconditioner {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<(), SolveError> {
        z.copy_from_slice(r);
        Ok(())
    }
}

/// A fixed number of forward Gauss-Seidel sweeps from a zero guess.
#[derive(Debug, Clone)]
pub struct GaussSeidel {
    m: CsrMatrix,
    diag: Vec<f64>,
    sweeps: usize,
}

impl GaussSeidel {
    pub fn new(m: CsrMatrix, sweeps: usize) -> Result<Self, SolveError> {
        let diag = diagonal_checked(&m)?;
        Ok(Self {
            m,
            diag,
            sweeps: sweeps.max(1),
        })
    }
}

impl Preconditioner for GaussSeidel {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<(), SolveError> {
        z.fill(0.0);
        for _ in 0..self.sweeps {
            forward_sweep(&self.m, &self.diag, r, z);
        }
        Ok(())
    }
}

/// Incomplete LU restricted to the sparsity pattern of the matrix.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    lu: CsrMatrix,
    diag_pos: Vec<usize>,
}

impl Ilu0 {
    pub fn new(m: &CsrMatrix) -> Result<Self, SolveError> {
        let n = m.nrows();
        let mut lu = m.clone();
        let mut diag_pos = vec![usize::MAX; n];
        for i in 0..n {
            let start = lu.row_ptr()[i];
            if let Ok(k) = lu.row(i).0.binary_search(&i) {
                diag_pos[i] = start + k;
            } else {
                return Err(SolveError::ZeroDiagonal { row: i });
            }
        }
        let row_ptr = lu.row_ptr().to_vec();
        let col_idx = lu.col_idx().to_vec();
        let mut marker = vec![usize::MAX; n];
        let vals = lu.values_mut();
        for i in 0..n {
            for p in row_ptr[i]..row_ptr[i + 1] {
                marker[col_idx[p]] = p;
            }
            for p in row_ptr[i]..row_ptr[i + 1] {
                let k = col_idx[p];
                if k >= i {
                    break;
                }
                let dk = vals[diag_pos[k]];
                if dk == 0.0 {
                    return Err(SolveError::ZeroDiagonal { row: k });
                }
                let l = vals[p] / dk;
                vals[p] = l;
                for q in diag_pos[k] + 1..row_ptr[k + 1] {
                    let j = col_idx[q];
                    let t = marker[j];
                    if t != usize::MAX && t >= row_ptr[i] && t < row_ptr[i + 1] {
                        vals[t] -= l * vals[q];
                    }
                }
            }
            for p in row_ptr[i]..row_ptr[i + 1] {
                marker[col_idx[p]] = usize::MAX;
            }
            if vals[diag_pos[i]] == 0.0 {
                return Err(SolveError::ZeroDiagonal { row: i });
            }
        }
        Ok(Self { lu, diag_pos })
    }
}

impl Preconditioner for Ilu0 {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<(), SolveError> {
        let n = self.lu.nrows();
        let rp = self.lu.row_ptr();
        let ci = self.lu.col_idx();
        let v = self.lu.values();
        for i in 0..n {
            let mut s = r[i];
            for p in rp[i]..self.diag_pos[i] {
                s -= v[p] * z[ci[p]];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for p in self.diag_pos[i] + 1..rp[i + 1] {
                s -= v[p] * z[ci[p]];
            }
            z[i] = s / v[self.diag_pos[i]];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            rows[i][i] = 2.0;
            if i > 0 {
                rows[i][i - 1] = -1.0;
            }
            if i + 1 < n {
                rows[i][i + 1] = -1.0;
            }
        }
        CsrMatrix::from_dense(&rows)
    }

    #[test]
    fn identity_converges_in_one_sweep() {
        let b = [1.0, 2.0, 3.0];
        let x = gauss_seidel_sweeps(&CsrMatrix::identity(3), &[0.0; 3], &b, 1).unwrap();
        assert_eq!(x, b.to_vec());
    }

    #[test]
    fn matches_scalar_reference_sweep() {
        let n = 10;
        let m = laplace_1d(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = gauss_seidel_sweeps(&m, &vec![0.0; n], &b, 3).unwrap();
        let mut r = vec![0.0; n];
        for _ in 0..3 {
            for i in 0..n {
                let left = if i > 0 { r[i - 1] } else { 0.0 };
                let right = if i + 1 < n { r[i + 1] } else { 0.0 };
                r[i] = (b[i] + left + right) / 2.0;
            }
        }
        for i in 0..n {
            assert!((x[i] - r[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_two_by_two_fixed_point() {
        let m = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let x = gauss_seidel_sweeps(&m, &[0.0, 0.0], &[1.0, 1.0], 40).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-12 && (x[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_diagonal_is_rejected() {
        let m = CsrMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 2.0]]);
        assert_eq!(
            gauss_seidel_sweeps(&m, &[0.0, 0.0], &[1.0, 1.0], 1),
            Err(SolveError::ZeroDiagonal { row: 0 })
        );
    }

    #[test]
    fn ilu0_is_exact_on_tridiagonal() {
        // no fill occurs for a tridiagonal matrix
        let m = laplace_1d(12);
        let mut p = Ilu0::new(&m).unwrap();
        let b: Vec<f64> = (0..12).map(|i| i as f64 - 3.0).collect();
        let mut z = vec![0.0; 12];
        p.apply(&b, &mut z).unwrap();
        let r = m.matvec(&z);
        for i in 0..12 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }
}
