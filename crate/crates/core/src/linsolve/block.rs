//! Block triangular preconditioner for the saddle-point system
//!
//! ```text
//! [ A  -Bᵀ ] [v]   [f]
//! [ B   C  ] [p] = [g]
//! ```
//!
//! Internally the pressure is rescaled by −1, which turns the operator into
//! `[A Bᵀ; B −C]`, and the preconditioner solves `A v = f` followed by
//! `S p' = −g + B v` with `S = C + B diag(A)⁻¹ Bᵀ`. The engine-facing
//! [`Preconditioner`] impl flips the sign back so callers only ever see the
//! unscaled pressure.

use super::direct::BandedLu;
use super::fgmres::{fgmres, fgmres_unchecked, GmresConfig};
use super::smoother::{GaussSeidel, Ilu0, NoPreconditioner, Preconditioner};
use super::sparse::{CsrMatrix, LinearOperator};
use crate::error::{Block, SolveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherKind {
    GaussSeidel,
    Ilu0,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub velocity_smoother: SmootherKind,
    pub schur_smoother: SmootherKind,
    pub gs_sweeps: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-2,
            max_iter: 40,
            velocity_smoother: SmootherKind::Ilu0,
            schur_smoother: SmootherKind::GaussSeidel,
            gs_sweeps: 1,
        }
    }
}

/// `[A −Bᵀ; B C]` as an operator on stacked `[v; p]`.
#[derive(Debug, Clone)]
pub struct SaddleOperator<'a> {
    pub a: &'a CsrMatrix,
    pub b: &'a CsrMatrix,
    pub bt: &'a CsrMatrix,
    pub c: &'a CsrMatrix,
}

impl LinearOperator for SaddleOperator<'_> {
    fn nrows(&self) -> usize {
        self.a.nrows() + self.c.nrows()
    }

    fn ncols(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let nv = self.a.nrows();
        let (xv, xp) = x.split_at(nv);
        let (yv, yp) = y.split_at_mut(nv);
        self.a.matvec_into(xv, yv);
        for i in 0..nv {
            let (cols, vals) = self.bt.row(i);
            let mut s = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                s += v * xp[j];
            }
            yv[i] -= s;
        }
        self.c.matvec_into(xp, yp);
        for (i, yi) in yp.iter_mut().enumerate() {
            let (cols, vals) = self.b.row(i);
            let mut s = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                s += v * xv[j];
            }
            *yi += s;
        }
    }
}

enum Smoother {
    Gs(GaussSeidel),
    Ilu(Ilu0),
}

impl Smoother {
    fn build(m: &CsrMatrix, kind: SmootherKind, sweeps: usize) -> Result<Self, SolveError> {
        Ok(match kind {
            SmootherKind::GaussSeidel => Smoother::Gs(GaussSeidel::new(m.clone(), sweeps)?),
            SmootherKind::Ilu0 => Smoother::Ilu(Ilu0::new(m)?),
        })
    }
}

impl Preconditioner for Smoother {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<(), SolveError> {
        match self {
            Smoother::Gs(g) => g.apply(r, z),
            Smoother::Ilu(i) => i.apply(r, z),
        }
    }
}

struct InnerSolver {
    m: CsrMatrix,
    smoother: Smoother,
    lu: Option<BandedLu>,
    block: Block,
    cfg: GmresConfig,
    fallbacks: usize,
}

impl InnerSolver {
    fn new(m: CsrMatrix, kind: SmootherKind, block: Block, inner: &InnerConfig) -> Result<Self, SolveError> {
        let smoother = Smoother::build(&m, kind, inner.gs_sweeps).map_err(|e| wrap(block, e))?;
        Ok(Self {
            m,
            smoother,
            lu: None,
            block,
            cfg: GmresConfig {
                tol: inner.tol,
                max_iter: inner.max_iter,
                restart: inner.max_iter.max(1),
            },
            fallbacks: 0,
        })
    }

    fn solve(&mut self, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        if let Some(lu) = &self.lu {
            return Ok(lu.solve(rhs));
        }
        match fgmres(&self.m, rhs, None, &mut self.smoother, &self.cfg) {
            Ok(out) => Ok(out.x),
            Err(SolveError::MaxIterations { .. } | SolveError::Stagnation { .. }) => {
                // iteration cap hit: switch this block to the direct path
                let lu = BandedLu::factor(&self.m).map_err(|e| wrap(self.block, e))?;
                self.fallbacks += 1;
                let x = lu.solve(rhs);
                self.lu = Some(lu);
                Ok(x)
            }
            Err(e) => Err(wrap(self.block, e)),
        }
    }
}

fn wrap(block: Block, e: SolveError) -> SolveError {
    SolveError::InnerSolveFailure {
        block,
        source: Box::new(e),
    }
}

/// The two-step lower block triangular preconditioner.
pub struct BlockTriangular {
    nv: usize,
    b: CsrMatrix,
    velocity: InnerSolver,
    schur: InnerSolver,
}

impl BlockTriangular {
    pub fn new(a: &CsrMatrix, b: &CsrMatrix, bt: &CsrMatrix, c: &CsrMatrix, inner: &InnerConfig) -> Result<Self, SolveError> {
        let s = schur_approximation(a, b, bt, c)?;
        Ok(Self {
            nv: a.nrows(),
            b: b.clone(),
            velocity: InnerSolver::new(a.clone(), inner.velocity_smoother, Block::Velocity, inner)?,
            schur: InnerSolver::new(s, inner.schur_smoother, Block::Schur, inner)?,
        })
    }

    /// Use direct factorizations for both inner blocks.
    pub fn with_exact_inner(mut self) -> Result<Self, SolveError> {
        self.velocity.lu = Some(BandedLu::factor(&self.velocity.m).map_err(|e| wrap(Block::Velocity, e))?);
        self.schur.lu = Some(BandedLu::factor(&self.schur.m).map_err(|e| wrap(Block::Schur, e))?);
        Ok(self)
    }

    pub fn schur(&self) -> &CsrMatrix {
        &self.schur.m
    }

    /// Number of inner blocks that switched to the direct fallback.
    pub fn fallbacks(&self) -> usize {
        self.velocity.fallbacks + self.schur.fallbacks
    }

    /// Application in the rescaled pressure convention: returns `(v, p')`
    /// with `A v = f` and `S p' = −g + B v`.
    pub fn apply_rescaled(&mut self, f: &[f64], g: &[f64]) -> Result<(Vec<f64>, Vec<f64>), SolveError> {
        let v = self.velocity.solve(f)?;
        let bv = self.b.matvec(&v);
        let rhs: Vec<f64> = bv.iter().zip(g).map(|(x, y)| x - y).collect();
        let p = self.schur.solve(&rhs)?;
        Ok((v, p))
    }
}

impl Preconditioner for BlockTriangular {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<(), SolveError> {
        let (f, g) = r.split_at(self.nv);
        let (v, p) = self.apply_rescaled(f, g)?;
        z[..self.nv].copy_from_slice(&v);
        for (zi, pi) in z[self.nv..].iter_mut().zip(&p) {
            *zi = -pi;
        }
        Ok(())
    }
}

/// `S = C + B diag(A)⁻¹ Bᵀ`.
pub fn schur_approximation(a: &CsrMatrix, b: &CsrMatrix, bt: &CsrMatrix, c: &CsrMatrix) -> Result<CsrMatrix, SolveError> {
    let d = a.diagonal();
    let mut dinv = Vec::with_capacity(d.len());
    for (row, &v) in d.iter().enumerate() {
        if v == 0.0 {
            return Err(wrap(Block::Velocity, SolveError::ZeroDiagonal { row }));
        }
        dinv.push(1.0 / v);
    }
    Ok(c.add_scaled(1.0, &b.mul_diag_mul(&dinv, bt)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// FGMRES with the block triangular preconditioner.
    Fgmres,
    /// FGMRES without preconditioning; a baseline for iteration counts.
    Unpreconditioned,
    /// Banded LU on the assembled monolithic matrix.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleSolverConfig {
    pub kind: SolverKind,
    pub outer: GmresConfig,
    pub inner: InnerConfig,
}

impl Default for SaddleSolverConfig {
    fn default() -> Self {
        Self {
            kind: SolverKind::Fgmres,
            outer: GmresConfig::default(),
            inner: InnerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SaddleSolution {
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    pub outer_iterations: usize,
    pub history: Vec<f64>,
    pub true_residual: f64,
    pub inner_fallbacks: usize,
}

/// Solve the unscaled saddle-point system.
pub fn solve_saddle(
    a: &CsrMatrix,
    b: &CsrMatrix,
    c: &CsrMatrix,
    f: &[f64],
    g: &[f64],
    cfg: &SaddleSolverConfig,
) -> Result<SaddleSolution, SolveError> {
    let nv = a.nrows();
    let bt = b.transpose();
    let rhs: Vec<f64> = f.iter().chain(g).copied().collect();
    let op = SaddleOperator { a, b, bt: &bt, c };
    let split = |x: Vec<f64>| {
        let p = x[nv..].to_vec();
        let mut v = x;
        v.truncate(nv);
        (v, p)
    };
    match cfg.kind {
        SolverKind::Direct => {
            let mut neg_bt = bt.clone();
            neg_bt.scale(-1.0);
            let m = CsrMatrix::block_2x2(a, &neg_bt, b, c);
            let lu = BandedLu::factor(&m)?;
            let x = lu.solve(&rhs);
            let mut r = vec![0.0; x.len()];
            op.apply(&x, &mut r);
            let bn = super::sparse::norm2(&rhs);
            let res = r.iter().zip(&rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let (v, p) = split(x);
            Ok(SaddleSolution {
                v,
                p,
                outer_iterations: 0,
                history: Vec::new(),
                true_residual: if bn > 0.0 { res / bn } else { 0.0 },
                inner_fallbacks: 0,
            })
        }
        SolverKind::Fgmres => {
            let mut pc = BlockTriangular::new(a, b, &bt, c, &cfg.inner)?;
            let out = fgmres(&op, &rhs, None, &mut pc, &cfg.outer)?;
            let fallbacks = pc.fallbacks();
            let (v, p) = split(out.x);
            Ok(SaddleSolution {
                v,
                p,
                outer_iterations: out.iterations,
                history: out.history,
                true_residual: out.true_residual,
                inner_fallbacks: fallbacks,
            })
        }
        SolverKind::Unpreconditioned => {
            let out = fgmres_unchecked(&op, &rhs, None, &mut NoPreconditioner, &cfg.outer)?;
            let (v, p) = split(out.x);
            Ok(SaddleSolution {
                v,
                p,
                outer_iterations: out.iterations,
                history: out.history,
                true_residual: out.true_residual,
                inner_fallbacks: 0,
            })
        }
    }
}
