//! Finite-dimensional Weyl algebras at roots of unity and their continuum limits.

pub mod app;
pub mod calculus;
pub mod chebyshev;
pub mod continuum;
pub mod dsl;
pub mod error;
pub mod gauss;
pub mod hilbert;
pub mod limits;
pub mod linalg;
pub mod rational;
pub mod sector;
pub mod tridiag;
pub mod weyl;

pub use error::{Error, Result};
