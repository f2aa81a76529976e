//! Finite quantum groups built from Cayley tables: multiplicative unitaries,
//! modular conjugations, L¹ predual norms, approximate diagonals and the
//! bounds they satisfy, all checked numerically.

pub mod diagonals;
pub mod dualside;
pub mod error;
pub mod exec;
pub mod funalg;
pub mod group;
#[cfg(any(test, feature = "oracles"))]
pub mod oracle;
pub mod qgcore;
pub mod report;
pub mod rng;
pub mod tensorlin;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
