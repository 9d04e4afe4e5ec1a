//! Finitely generated matrix semigroups, their orbits and density probes.

mod examples;
mod orbit;
mod probe;

pub use examples::{
    example_dense_spectrum, example_g_theta, javaheri_orbit, javaheri_precondition, javaheri_semigroup, javaheri_trace, line_trace_g_theta, GThetaTrace, Javaheri,
    JavaheriTrace,
};
pub use orbit::{orbit, orbit_cover, orbit_exact, Budget, OrbitEngine, Reach, MAX_MAGNITUDE};
pub use probe::{
    canonical_invariant_subspace, hypercyclicity_probe, spectrum, spectrum_report, subspace_hypercyclicity_probe,
    witness_in_subspace, ProbeReport, SpectrumSet, PATTERN_SNAP,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{matrix_commutator_residual, tolerance_for, Field, Matrix, MatrixJson, QMatrix, Vector};

/// Semigroup generated by `A₁..A_g`; the identity is implicitly included.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSemigroup {
    generators: Vec<Matrix>,
    field: Field,
    n: usize,
    abelian: bool,
    residual: f64,
    exact: Option<Vec<QMatrix>>,
}

impl MatrixSemigroup {
    /// Records whether the generators commute; never fails on non-commuting input.
    pub fn new(generators: Vec<Matrix>, field: Field) -> Result<Self> {
        let first = generators.first().ok_or_else(|| Error::InvalidInput("semigroup needs a generator".into()))?;
        let n = first.n();
        for g in &generators {
            if g.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.n() });
            }
            if g.field() != field && !(field == Field::Complex && g.field() == Field::Real) {
                return Err(Error::FieldMismatch("generator field differs from semigroup field".into()));
            }
        }
        let generators: Vec<Matrix> = generators.iter().map(|g| g.with_field(field)).collect::<Result<_>>()?;
        let mut abelian = true;
        let mut residual = 0.0f64;
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                let (a, b) = (&generators[i], &generators[j]);
                let r = matrix_commutator_residual(a, b)?;
                residual = residual.max(r);
                if r > tolerance_for(a.max_abs() * b.max_abs()) {
                    abelian = false;
                }
            }
        }
        Ok(Self { generators, field, n, abelian, residual, exact: None })
    }

    /// Like [`MatrixSemigroup::new`] but fails with `NotCommuting`.
    pub fn abelian(generators: Vec<Matrix>, field: Field) -> Result<Self> {
        let g = Self::new(generators, field)?;
        g.require_abelian()?;
        Ok(g)
    }

    /// Attaches exact rational generators; they must round to the float ones.
    pub fn with_exact(mut self, exact: Vec<QMatrix>) -> Result<Self> {
        if exact.len() != self.generators.len() {
            return Err(Error::DimensionMismatch { expected: self.generators.len(), got: exact.len() });
        }
        for (q, a) in exact.iter().zip(&self.generators) {
            if q.rows() != self.n || q.cols() != self.n || self.field != Field::Real {
                return Err(Error::InvalidInput("exact generators must be real n×n".into()));
            }
            let rows = q.to_f64_rows();
            for (i, row) in rows.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if (x - a.get(i, j).re).abs() > tolerance_for(*x) {
                        return Err(Error::InvalidInput("exact generator disagrees with float generator".into()));
                    }
                }
            }
        }
        self.exact = Some(exact);
        Ok(self)
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn exact_generators(&self) -> Option<&[QMatrix]> {
        self.exact.as_deref()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    /// Largest pairwise commutator entry.
    pub fn commutator_residual(&self) -> f64 {
        self.residual
    }

    pub fn require_abelian(&self) -> Result<()> {
        if self.abelian {
            Ok(())
        } else {
            Err(Error::NotCommuting { residual: self.residual })
        }
    }

    /// `A₁^{k₁}···A_g^{k_g}`.
    pub fn element(&self, exponents: &[u32]) -> Result<Matrix> {
        if exponents.len() != self.generators.len() {
            return Err(Error::DimensionMismatch { expected: self.generators.len(), got: exponents.len() });
        }
        let mut out = Matrix::identity(self.field, self.n);
        for (a, &k) in self.generators.iter().zip(exponents) {
            out = out.mul(&a.pow(k))?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> SemigroupJson {
        SemigroupJson {
            generators: self.generators.iter().map(MatrixJson::from_matrix).collect(),
            field: self.field,
            abelian: self.abelian,
        }
    }
}

/// `{"generators":[matrix,…],"field":"R","abelian":true}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupJson {
    pub generators: Vec<MatrixJson>,
    pub field: Field,
    #[serde(default = "default_true")]
    pub abelian: bool,
}

fn default_true() -> bool {
    true
}

impl SemigroupJson {
    /// Builds the semigroup; a claimed abelian flag is verified.
    pub fn to_semigroup(&self) -> Result<MatrixSemigroup> {
        let gens: Vec<Matrix> = self.generators.iter().map(MatrixJson::to_matrix).collect::<Result<_>>()?;
        let g = MatrixSemigroup::new(gens, self.field)?;
        if self.abelian {
            g.require_abelian()?;
        }
        let exact: Option<Vec<QMatrix>> =
            self.generators.iter().map(|m| m.to_rational().ok().flatten()).collect();
        match exact {
            Some(q) if self.field == Field::Real => g.with_exact(q),
            _ => Ok(g),
        }
    }
}

/// One orbit sample `A₁^{k₁}···A_g^{k_g} v`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPoint {
    pub exponents: Vec<u32>,
    pub point: Vector,
}

impl OrbitPoint {
    /// Rebuilds the point from its exponents with the factors in reverse order.
    pub fn recompute_reversed(&self, g: &MatrixSemigroup, v: &Vector) -> Result<Vector> {
        let mut w = v.clone();
        for (a, &k) in g.generators().iter().zip(&self.exponents).rev() {
            w = a.pow(k).apply(&w)?;
        }
        Ok(w)
    }
}
