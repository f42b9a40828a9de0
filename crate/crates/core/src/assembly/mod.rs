//! Monolithic fluid–structure assembly: materials, element matrices,
//! degree-of-freedom numbering and the saddle-point system.

pub mod dofmap;
pub mod element;
pub mod material;
pub mod stvk;
pub mod system;

pub use dofmap::{ActiveParts, ConflictPolicy, Constraint, ConstraintKind, DofMap, Slot};
pub use material::MaterialParams;
pub use system::{assemble, structure_stiffness, Discretization, FluidInputs, Linearization, MonolithicSystem, StepParams, StructureInputs};
