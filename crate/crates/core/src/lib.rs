//! Computable functions on many-sorted algebras, their algebraic specifications,
//! and a bounded ground proof engine for checking them.

pub mod algebra;
pub mod approx;
pub mod corpus;
pub mod error;
pub mod extract;
pub mod interp;
pub mod prover;
pub mod report;
pub mod schemes;
pub mod sexp;
pub mod spec;
pub mod syntax;

pub use error::{Error, Result};
