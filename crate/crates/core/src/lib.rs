//! Finite-dimensional linear dynamics laboratory.
//!
//! The crate builds the explicit dense sets of Kronecker type, finitely
//! generated abelian matrix semigroups and their simultaneous block-triangular
//! normal form, and grades orbit density by ε-grid covering. Density is never
//! decided from finite samples; every density output is graded evidence.

pub mod constructions;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod normal_form;

pub use error::{Error, Result};
