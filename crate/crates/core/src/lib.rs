//! Combinatorics, oscillator moments, Itô coefficients and time-ordered
//! evolution for Bosonic fields coupled to a finite-dimensional system.

pub mod coefficients;
pub mod dyson;
pub mod error;
pub mod linalg;
pub mod oscillator;
pub mod partitions;
pub mod quadrature;
pub mod toyfock;

pub use error::{Error, Result};
