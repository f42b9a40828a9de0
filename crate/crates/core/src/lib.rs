//! Monolithic ALE finite-element engine for an elastic rotor spinning in an
//! incompressible channel flow.

pub mod ale;
pub mod assembly;
pub mod checks;
pub mod error;
pub mod harness;
pub mod io;
pub mod linsolve;
pub mod mesh;
pub mod rotation;
pub mod timeloop;
