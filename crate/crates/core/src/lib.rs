//! Elliptic R-matrices, their Yang–Baxter identities and the quadratic
//! algebras cut out by RLL relations, checked numerically.

pub mod elliptic;
pub mod error;
pub mod expr;
pub mod ncalgebra;
pub mod relations;
pub mod rmatrix;
pub mod span;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
