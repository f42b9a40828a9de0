//! Sparse linear algebra: storage, direct and iterative solvers, and the
//! saddle-point block preconditioner.

pub mod block;
pub mod direct;
pub mod fgmres;
pub mod mmio;
pub mod smoother;
pub mod sparse;

pub use block::{solve_saddle, BlockTriangular, InnerConfig, SaddleSolution, SaddleSolverConfig, SmootherKind, SolverKind};
pub use direct::{sparse_lu_solve, BandedLu};
pub use fgmres::{fgmres, GmresConfig, GmresOutcome};
pub use smoother::{gauss_seidel_sweeps, GaussSeidel, Ilu0, NoPreconditioner, Preconditioner};
pub use sparse::{CsrMatrix, IdentityOperator, LinearOperator, TripletBuilder};
