//! Exact integer and quadratic-field linear algebra.

pub mod covering;
pub mod linalg;
pub mod matrix;
pub mod quadratic;
pub mod quotient;
pub mod snf;

pub use covering::{covering_constant_search, verify_covering};
pub use matrix::IntegerMatrix;
pub use quadratic::QuadraticNumber;
pub use quotient::{quotient_decomposition, QuotientDecomposition};
pub use snf::{
    integer_kernel, lattice_contains, lattice_includes, lattice_rank, smith_normal_form, SnfResult,
};
