//! Translation-plus-rotation actions over a real quadratic field: kernel
//! lattices, group-theoretic dimension, and conservativity.

pub mod classify;
pub mod dimension;
pub mod kernel;
pub mod spec;

pub use classify::{classify, classify_action, Classification, LimitBranch, DEFAULT_MAX_LEVEL};
pub use dimension::{
    conservativity_at, effective_dimension, is_conservative, is_conservative_at, level_structure,
    ConservativityReport, EffectiveDimension, LevelStructure,
};
pub use kernel::{acts_trivially, kernel_lattice, KernelLattice};
pub use spec::ActionSpec;
