//! Group-theoretic dimension, conservativity, and partial-maxima growth of
//! stationary symmetric alpha-stable random fields indexed by `R^d`.

pub mod action;
pub mod analysis;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod lattice;
pub mod model;
pub mod simulator;

pub use error::{Error, Result};
