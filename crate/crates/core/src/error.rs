use thiserror::Error;

use crate::mesh::BoundaryTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Velocity,
    Schur,
}

impl std::fmt::Display for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Block::Velocity => f.write_str("velocity block"),
            Block::Schur => f.write_str("Schur block"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Krylov stagnation after {iterations} iterations (relative residual {residual:.3e})")]
    Stagnation { iterations: usize, residual: f64 },
    #[error("no convergence within {iterations} iterations (relative residual {residual:.3e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("zero diagonal entry in row {row}")]
    ZeroDiagonal { row: usize },
    #[error("matrix is numerically singular (pivot column {column})")]
    SingularMatrix { column: usize },
    #[error("inner solve failed on the {block}: {source}")]
    InnerSolveFailure {
        block: Block,
        #[source]
        source: Box<SolveError>,
    },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeshError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("mesh generation failed: {0}")]
    MeshGenerationFailure(String),
    #[error("edges tagged {0:?} do not form a closed curve")]
    OpenCurve(BoundaryTag),
    #[error("edges tagged {tag:?} form {loops} loops, expected one")]
    MultipleLoops { tag: BoundaryTag, loops: usize },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AleError {
    #[error("ring node counts differ: rotating {rotating}, stationary {stationary}")]
    RingMismatch { rotating: usize, stationary: usize },
    #[error("mesh inversion: triangle {triangle} has signed area {area:.3e}")]
    MeshInversion { triangle: usize, area: f64 },
    #[error("harmonic extension solve failed: {0}")]
    SolveFailure(#[from] SolveError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AssemblyError {
    #[error("quadrature on inverted element {triangle} (signed area {area:.3e})")]
    QuadratureOnInvertedElement { triangle: usize, area: f64 },
    #[error("node {node} has conflicting Dirichlet values {first:?} and {second:?}")]
    InconsistentConstraint {
        node: usize,
        first: [f64; 2],
        second: [f64; 2],
    },
}

#[derive(Debug, Error)]
pub enum StepError {
    #[error("fixed-point iteration did not converge in {sweeps} sweeps at step {step}; history {history:?}")]
    FixedPointDivergence {
        step: usize,
        sweeps: usize,
        history: Vec<f64>,
    },
    #[error("Newton iteration diverged; residual history {history:?}")]
    NewtonDivergence { history: Vec<f64> },
    #[error("Newton iteration did not reach tolerance in {iterations} iterations; history {history:?}")]
    NewtonMaxIterations { iterations: usize, history: Vec<f64> },
    #[error(transparent)]
    Ale(#[from] AleError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration:\n{}", format_fields(.0))]
    Validation(Vec<FieldError>),
}

fn format_fields(errs: &[FieldError]) -> String {
    errs.iter()
        .map(|e| format!("  - {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {what} at line {line}: {message}")]
    Format {
        what: &'static str,
        line: usize,
        message: String,
    },
}

impl IoError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

/// Top-level error for harness and CLI code.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Ale(#[from] AleError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}
