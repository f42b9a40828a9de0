//! Restarted flexible GMRES with right preconditioning.

use super::smoother::Preconditioner;
use super::sparse::{dot, norm2, LinearOperator};
use crate::error::SolveError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
            restart: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative residual estimate after every iteration, starting with the
    /// initial residual.
    pub history: Vec<f64>,
    /// `‖b − A x‖ / ‖b‖` recomputed from scratch at exit.
    pub true_residual: f64,
}

/// Solve `op x = b`. Returns [`SolveError::MaxIterations`] or
/// [`SolveError::Stagnation`] when the tolerance is not met.
pub fn fgmres(
    op: &dyn LinearOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    precond: &mut dyn Preconditioner,
    cfg: &GmresConfig,
) -> Result<GmresOutcome, SolveError> {
    let out = fgmres_unchecked(op, b, x0, precond, cfg)?;
    if out.true_residual <= cfg.tol {
        Ok(out)
    } else if out.iterations >= cfg.max_iter {
        Err(SolveError::MaxIterations {
            iterations: out.iterations,
            residual: out.true_residual,
        })
    } else {
        Err(SolveError::Stagnation {
            iterations: out.iterations,
            residual: out.true_residual,
        })
    }
}

/// Like [`fgmres`] but returns the best iterate even when the tolerance is
/// not reached. Only operator/preconditioner failures are errors.
pub fn fgmres_unchecked(
    op: &dyn LinearOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    precond: &mut dyn Preconditioner,
    cfg: &GmresConfig,
) -> Result<GmresOutcome, SolveError> {
    let n = op.nrows();
    if b.len() != n {
        return Err(SolveError::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(GmresOutcome {
            x: vec![0.0; n],
            iterations: 0,
            history: vec![0.0],
            true_residual: 0.0,
        });
    }
    let m = cfg.restart.max(1);
    let mut r = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let residual = |x: &[f64], r: &mut [f64], tmp: &mut [f64]| {
        op.apply(x, tmp);
        for i in 0..n {
            r[i] = b[i] - tmp[i];
        }
        norm2(r)
    };
    let mut beta = residual(&x, &mut r, &mut tmp);
    let mut history = vec![beta / bnorm];
    let mut iterations = 0;
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut h = vec![vec![0.0; m]; m + 1];
    let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
    let mut g = vec![0.0; m + 1];

    while beta / bnorm > cfg.tol && iterations < cfg.max_iter {
        let cycle_start = beta;
        v.clear();
        z.clear();
        v.push(r.iter().map(|ri| ri / beta).collect());
        g.fill(0.0);
        g[0] = beta;
        let mut k = 0;
        while k < m && iterations < cfg.max_iter {
            let mut zk = vec![0.0; n];
            precond.apply(&v[k], &mut zk)?;
            let mut w = vec![0.0; n];
            op.apply(&zk, &mut w);
            z.push(zk);
            for (j, vj) in v.iter().enumerate() {
                let hj = dot(&w, vj);
                h[j][k] = hj;
                for (wi, vi) in w.iter_mut().zip(vj) {
                    *wi -= hj * vi;
                }
            }
            let hn = norm2(&w);
            h[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
            }
            h[k][k] = cs[k] * h[k][k] + sn[k] * h[k + 1][k];
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            iterations += 1;
            k += 1;
            history.push(g[k].abs() / bnorm);
            if g[k].abs() / bnorm <= cfg.tol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|wi| wi / hn).collect());
        }
        // back substitution for the least-squares coefficients
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= h[i][j] * y[j];
            }
            y[i] = if h[i][i] != 0.0 { s / h[i][i] } else { 0.0 };
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, zi) in x.iter_mut().zip(&z[j]) {
                *xi += yj * zi;
            }
        }
        beta = residual(&x, &mut r, &mut tmp);
        if beta >= cycle_start {
            break;
        }
    }
    let true_residual = beta / bnorm;
    Ok(GmresOutcome {
        x,
        iterations,
        history,
        true_residual,
    })
}
