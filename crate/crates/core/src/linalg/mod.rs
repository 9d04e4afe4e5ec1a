//! Field-generic vectors, matrices and subspaces over ℝ or ℂ.
//!
//! Complex data is stored as interleaved real pairs `(x₁, y₁, …, xₙ, yₙ)`, so
//! the embedding ℂⁿ → ℝ²ⁿ is a relabelling of the same buffer.

mod exact;
mod json;
mod matrix;
mod rational;
mod subspace;
mod surd;
mod vector;

pub use exact::{ExactSubspace, ExactVector};
pub use json::{MatrixJson, ScalarJson, VectorJson};
pub use matrix::{commutator_residual as matrix_commutator_residual, commutes, commutes_within, Matrix};
pub use rational::{commutes_exact, QMatrix};
pub use subspace::{membership_distance, project, subspace_from_basis, Subspace};
pub use surd::{is_squarefree, parse_rational, rational_to_f64, squarefree_decompose, Surd};
pub use vector::{complex_to_real_embedding, Vector};

use serde::{Deserialize, Serialize};

/// Scalar field of the ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
}

impl Field {
    /// Real coordinates per scalar.
    pub fn width(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

/// Arithmetic representation used by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Float,
    Exact,
}

/// A scalar entry: floating point or exact surd, real or complex.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Float(f64),
    Exact(Surd),
    Complex(Box<Scalar>, Box<Scalar>),
}

impl Scalar {
    pub fn re_im(&self) -> (f64, f64) {
        match self {
            Scalar::Float(x) => (*x, 0.0),
            Scalar::Exact(s) => (s.to_f64(), 0.0),
            Scalar::Complex(re, im) => (re.re_im().0, im.re_im().0),
        }
    }

    /// Exact real and imaginary parts when both are exact.
    pub fn exact_parts(&self) -> Option<(Surd, Surd)> {
        match self {
            Scalar::Float(_) => None,
            Scalar::Exact(s) => Some((s.clone(), Surd::zero())),
            Scalar::Complex(re, im) => match (re.as_ref(), im.as_ref()) {
                (Scalar::Exact(a), Scalar::Exact(b)) => Some((a.clone(), b.clone())),
                _ => None,
            },
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Scalar::Complex(_, _))
    }
}

/// Float-mode tolerance `1e-9 · (1 + magnitude)`.
pub fn tolerance_for(magnitude: f64) -> f64 {
    1e-9 * (1.0 + magnitude.abs())
}
