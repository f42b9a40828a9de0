//! Configuration, snapshots, restart files and probe output.

pub mod checkpoint;
pub mod config;
pub mod probe;
pub mod vtk;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use config::{load_config, to_toml, RunConfig};
pub use probe::{ProbeSample, ProbeSeries};
pub use vtk::VtkSnapshot;
