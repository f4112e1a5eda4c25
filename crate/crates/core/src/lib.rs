//! Exact max-plus linear algebra over the rationals.

#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod csr;
pub mod error;
pub mod gen;
pub mod graph;
pub mod identities;
pub mod matrix;
pub mod permanent;
pub mod ranks;
pub mod scalar;
pub mod words;

pub use error::{Error, Result};
pub use matrix::{mat_max, mat_mul, TropMatrix};
pub use permanent::{is_nonsingular, permanent, PermanentReport};
pub use scalar::{lcm_upto, Rational, TropScalar};
pub use identities::{Identity, Monoid};
pub use words::{evaluate, Letter, Word};
