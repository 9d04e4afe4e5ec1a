use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Field;
use crate::error::{Error, Result};

/// Column vector over ℝ or ℂ; complex entries interleaved as `(re, im)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    field: Field,
    coords: Vec<f64>,
}

impl Vector {
    pub fn real(coords: Vec<f64>) -> Self {
        Self { field: Field::Real, coords }
    }

    pub fn complex(entries: &[Complex64]) -> Self {
        let coords = entries.iter().flat_map(|z| [z.re, z.im]).collect();
        Self { field: Field::Complex, coords }
    }

    /// Wraps an interleaved real buffer; its length must be even for ℂ.
    pub fn from_real_coords(field: Field, coords: Vec<f64>) -> Result<Self> {
        if coords.len() % field.width() != 0 {
            return Err(Error::InvalidInput("odd coordinate count for a complex vector".into()));
        }
        Ok(Self { field, coords })
    }

    pub fn zeros(field: Field, n: usize) -> Self {
        Self { field, coords: vec![0.0; n * field.width()] }
    }

    /// Standard basis vector `e_{index+1}`.
    pub fn basis(field: Field, n: usize, index: usize) -> Self {
        let mut v = Self::zeros(field, n);
        v.coords[index * field.width()] = 1.0;
        v
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Dimension over the scalar field.
    pub fn dim(&self) -> usize {
        self.coords.len() / self.field.width()
    }

    pub fn real_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn entry(&self, i: usize) -> Complex64 {
        match self.field {
            Field::Real => Complex64::new(self.coords[i], 0.0),
            Field::Complex => Complex64::new(self.coords[2 * i], self.coords[2 * i + 1]),
        }
    }

    pub fn entries(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.entry(i)).collect()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0.0)
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.check(other)?;
        Ok(Vector {
            field: self.field,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.check(other)?;
        Ok(Vector {
            field: self.field,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, k: f64) -> Vector {
        Vector { field: self.field, coords: self.coords.iter().map(|x| x * k).collect() }
    }

    /// Multiplication by `i` (complex vectors only act nontrivially).
    pub fn times_i(&self) -> Vector {
        match self.field {
            Field::Real => self.clone(),
            Field::Complex => {
                let mut coords = Vec::with_capacity(self.coords.len());
                for pair in self.coords.chunks_exact(2) {
                    coords.push(-pair[1]);
                    coords.push(pair[0]);
                }
                Vector { field: Field::Complex, coords }
            }
        }
    }

    /// Real inner product of the underlying coordinates (`Re⟨u, v⟩` over ℂ).
    pub fn real_dot(&self, other: &Vector) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    fn check(&self, other: &Vector) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch("vector fields differ".into()));
        }
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }
}

/// The isomorphism `(x₁+iy₁, …, xₙ+iyₙ) ↦ (x₁, y₁; …; xₙ, yₙ)`.
///
/// Real input is returned unchanged.
pub fn complex_to_real_embedding(z: &Vector) -> Vector {
    Vector { field: Field::Real, coords: z.coords.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_layout() {
        let z = Vector::complex(&[Complex64::new(1.0, 2.0)]);
        assert_eq!(complex_to_real_embedding(&z).coords(), &[1.0, 2.0]);
        let zero = Vector::zeros(Field::Complex, 2);
        assert_eq!(complex_to_real_embedding(&zero).coords(), &[0.0; 4]);
    }

    #[test]
    fn times_i_rotates_pairs() {
        let z = Vector::complex(&[Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5)]);
        let iz = z.times_i();
        assert_eq!(iz.entry(0), Complex64::new(-2.0, 1.0));
        assert_eq!(iz.entry(1), Complex64::new(-0.5, -3.0));
        assert_eq!(z.real_dot(&iz), 0.0);
    }
}
