//! Samplers for the explicit dense and non-dense sets: `ℕⁿ + ℕα`, its complex
//! sibling, the polar set `A₂`, the half-line set `B` and ℤ-modules.

mod a2;
mod half_lines;
mod kronecker;
mod sample;
mod trace;

pub use a2::{a2_point, a2_ray, cover_a2, line_trace_a2, line_trace_a2_phase, sample_a2, A2Params, RayDescription};
pub use half_lines::{b_angle, sample_b, B_PLANT_OFFSET};
pub use kronecker::{
    a_alpha_beta_point, a_alpha_point, sample_a_alpha, sample_a_alpha_beta, sample_a_alpha_exact, sample_z_module,
    z_module_point,
};
pub use sample::PointSample;
pub use trace::{subspace_trace, subspace_trace_exact, Trace};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_squarefree, Surd};

/// Negative irrationals `αᵢ = −√pᵢ` with distinct squarefree `pᵢ`.
///
/// Distinct squarefree radicands make `1, √p₁, …, √pₙ` linearly independent
/// over ℚ (the field ℚ(√p₁, …, √pₙ) has degree 2ⁿ). Values built from raw
/// floats carry no such certificate and are flagged unverified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrationalBasis {
    primes: Vec<u64>,
    values: Vec<f64>,
    verified: bool,
}

impl IrrationalBasis {
    /// Raw negative values whose independence is not certified.
    pub fn unverified(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|&v| !(v < 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("irrationals must be finite and negative".into()));
        }
        Ok(Self { primes: Vec::new(), values, verified: false })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Exact `αᵢ` when certified.
    pub fn exact(&self) -> Option<Vec<Surd>> {
        if !self.verified {
            return None;
        }
        Some(self.primes.iter().map(|&p| -Surd::sqrt(p)).collect())
    }

    /// Interleaves two bases into `μ = [α₁, β₁; …; αₙ, βₙ]`.
    pub fn interleave(alpha: &IrrationalBasis, beta: &IrrationalBasis) -> Result<Self> {
        if alpha.n() != beta.n() {
            return Err(Error::DimensionMismatch { expected: alpha.n(), got: beta.n() });
        }
        let values = alpha.values.iter().zip(&beta.values).flat_map(|(a, b)| [*a, *b]).collect();
        if alpha.verified && beta.verified {
            let primes: Vec<u64> = alpha.primes.iter().zip(&beta.primes).flat_map(|(a, b)| [*a, *b]).collect();
            check_radicands(&primes)?;
            Ok(Self { primes, values, verified: true })
        } else {
            Ok(Self { primes: Vec::new(), values, verified: false })
        }
    }
}

fn check_radicands(primes: &[u64]) -> Result<()> {
    for (i, &p) in primes.iter().enumerate() {
        if p < 2 {
            return Err(Error::RadicandTooSmall(p));
        }
        if !is_squarefree(p) {
            return Err(Error::NotSquarefree(p));
        }
        if primes[..i].contains(&p) {
            return Err(Error::Duplicate(p));
        }
    }
    Ok(())
}

/// `αᵢ = −√pᵢ` for `n` distinct squarefree integers `pᵢ ≥ 2`.
pub fn make_alpha(n: usize, primes: &[u64]) -> Result<IrrationalBasis> {
    if primes.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: primes.len() });
    }
    if n == 0 {
        return Err(Error::InvalidInput("need at least one radicand".into()));
    }
    check_radicands(primes)?;
    Ok(IrrationalBasis {
        primes: primes.to_vec(),
        values: primes.iter().map(|&p| -(p as f64).sqrt()).collect(),
        verified: true,
    })
}

/// Serializable description of a sampled set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LatticeCosetSet {
    #[serde(rename = "A_alpha")]
    AAlpha { alpha_primes: Vec<u64> },
    #[serde(rename = "A_alpha_beta")]
    AAlphaBeta { alpha_primes: Vec<u64>, beta_primes: Vec<u64> },
    #[serde(rename = "A2")]
    A2 { theta1: String, theta2: String, radial_step: f64, radial_count: usize },
    #[serde(rename = "B")]
    B { radial_step: f64, radial_count: usize, angle_count: usize },
    #[serde(rename = "Z_module")]
    ZModule { generators: Vec<Vec<String>> },
}
