//! Banded LU with partial pivoting after a reverse Cuthill-McKee reordering.
//!
//! Desk-scale systems have a few thousand unknowns and a bandwidth of a few
//! hundred after reordering, so a band factorization is both simple and fast
//! enough to serve as the verification oracle and the small-system path.

use std::collections::VecDeque;

use super::sparse::CsrMatrix;
use crate::error::SolveError;

/// Relative pivot threshold below which the matrix is declared singular.
const PIVOT_TOL: f64 = 1e-13;

/// Reverse Cuthill-McKee ordering of the symmetrized pattern.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(m: &CsrMatrix) -> Vec<usize> {
    let n = m.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for &j in m.row(i).0 {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];
    loop {
        // lowest-degree unvisited node seeds each component
        let Some(seed) = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (degree[i], i)) else {
            break;
        };
        let start = pseudo_peripheral(seed, &adj, &degree, &mut level);
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        let mut nbrs = Vec::new();
        while let Some(u) = queue.pop_front() {
            order.push(u);
            nbrs.clear();
            nbrs.extend(adj[u].iter().copied().filter(|&v| !visited[v]));
            nbrs.sort_by_key(|&v| (degree[v], v));
            for &v in &nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(start: usize, adj: &[Vec<usize>], level: &mut [usize]) -> (usize, Vec<usize>) {
    let mut touched = vec![start];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut depth = 0;
    while let Some(u) = queue.pop_front() {
        depth = depth.max(level[u]);
        for &v in &adj[u] {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                touched.push(v);
                queue.push_back(v);
            }
        }
    }
    let last: Vec<usize> = touched.iter().copied().filter(|&v| level[v] == depth).collect();
    for &v in &touched {
        level[v] = usize::MAX;
    }
    (depth, last)
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize], level: &mut [usize]) -> usize {
    let mut current = seed;
    let (mut depth, mut last) = bfs_levels(current, adj, level);
    for _ in 0..8 {
        let cand = *last.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
        let (d, l) = bfs_levels(cand, adj, level);
        if d <= depth {
            break;
        }
        current = cand;
        depth = d;
        last = l;
    }
    current
}

/// Lower and upper bandwidth of `m` under the ordering `perm` (`perm[new] = old`).
pub fn bandwidth(m: &CsrMatrix, perm: &[usize]) -> (usize, usize) {
    let n = m.nrows();
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let (mut kl, mut ku) = (0, 0);
    for i in 0..n {
        let ni = inv[i];
        for &j in m.row(i).0 {
            let nj = inv[j];
            if nj < ni {
                kl = kl.max(ni - nj);
            } else {
                ku = ku.max(nj - ni);
            }
        }
    }
    (kl, ku)
}

/// Factorization `P A Q = L U` with `Q` the bandwidth-reducing ordering and
/// `P` the partial-pivoting row exchanges.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    /// Row `r` stores columns `r - kl .. r - kl + width`.
    band: Vec<f64>,
    pivots: Vec<usize>,
    perm: Vec<usize>,
}

impl BandedLu {
    pub fn factor(m: &CsrMatrix) -> Result<Self, SolveError> {
        if m.nrows() != m.ncols() {
            return Err(SolveError::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let perm = reverse_cuthill_mckee(m);
        Self::factor_with_ordering(m, perm)
    }

    pub fn factor_with_ordering(m: &CsrMatrix, perm: Vec<usize>) -> Result<Self, SolveError> {
        let n = m.nrows();
        let (kl, ku) = bandwidth(m, &perm);
        let width = 2 * kl + ku + 1;
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut band = vec![0.0; n * width];
        for i in 0..n {
            let ni = inv[i];
            let (cols, vals) = m.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let nj = inv[j];
                band[ni * width + nj + kl - ni] += v;
            }
        }
        let scale = m.max_abs();
        let mut lu = BandedLu {
            n,
            kl,
            ku,
            width,
            band,
            pivots: vec![0; n],
            perm,
        };
        lu.eliminate(scale)?;
        Ok(lu)
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        r * self.width + c + self.kl - r
    }

    fn eliminate(&mut self, scale: f64) -> Result<(), SolveError> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let thresh = PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut piv = k;
            let mut best = self.band[self.idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.band[self.idx(r, k)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if !(best > thresh) {
                return Err(SolveError::SingularMatrix { column: self.perm[k] });
            }
            self.pivots[k] = piv;
            if piv != k {
                for c in k..=last_col {
                    let (a, b) = (self.idx(k, c), self.idx(piv, c));
                    self.band.swap(a, b);
                }
            }
            let d = self.band[self.idx(k, k)];
            let krow = self.idx(k, k);
            for r in k + 1..=last_row {
                let ir = self.idx(r, k);
                let l = self.band[ir] / d;
                self.band[ir] = l;
                if l == 0.0 {
                    continue;
                }
                let len = last_col - k;
                // row r columns k+1..=last_col are contiguous, as are row k's
                let (src, dst) = (krow + 1, ir + 1);
                for t in 0..len {
                    let u = self.band[src + t];
                    self.band[dst + t] -= l * u;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Lower and upper bandwidth of the reordered matrix.
    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let (kl, ku) = (self.kl, self.ku);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                y.swap(k, p);
            }
            let yk = y[k];
            if yk != 0.0 {
                for r in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                    y[r] -= self.band[self.idx(r, k)] * yk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            let row = self.idx(k, k);
            let last = (k + kl + ku).min(n - 1);
            for (t, c) in (k + 1..=last).enumerate() {
                s -= self.band[row + 1 + t] * y[c];
            }
            y[k] = s / self.band[row];
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// One-shot sparse direct solve.
pub fn sparse_lu_solve(m: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    if b.len() != m.nrows() {
        return Err(SolveError::DimensionMismatch {
            expected: m.nrows(),
            got: b.len(),
        });
    }
    Ok(BandedLu::factor(m)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsolve::sparse::norm2;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(sparse_lu_solve(&CsrMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m = CsrMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let x = sparse_lu_solve(&m, &[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn random_dense_residual() {
        let mut s = 7u64;
        let n = 30;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| lcg(&mut s)).collect()).collect();
        let m = CsrMatrix::from_dense(&rows);
        let b: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
        let x = sparse_lu_solve(&m, &b).unwrap();
        let r: Vec<f64> = m.matvec(&x).iter().zip(&b).map(|(a, b)| a - b).collect();
        assert!(norm2(&r) / norm2(&b) < 1e-10);
    }

    #[test]
    fn duplicated_row_is_singular() {
        let m = CsrMatrix::from_dense(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![1.0, 2.0, 3.0],
        ]);
        assert!(matches!(
            sparse_lu_solve(&m, &[1.0, 1.0, 1.0]),
            Err(SolveError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn rcm_narrows_a_shuffled_path() {
        // path graph with a scrambled labelling
        let n = 40;
        let label: Vec<usize> = (0..n).map(|i| (i * 17) % n).collect();
        let mut t = crate::linsolve::sparse::TripletBuilder::new(n, n);
        for i in 0..n {
            t.add(label[i], label[i], 2.0);
            if i + 1 < n {
                t.add(label[i], label[i + 1], -1.0);
                t.add(label[i + 1], label[i], -1.0);
            }
        }
        let m = t.finalize();
        let p = reverse_cuthill_mckee(&m);
        assert_eq!(bandwidth(&m, &p), (1, 1));
    }
}
