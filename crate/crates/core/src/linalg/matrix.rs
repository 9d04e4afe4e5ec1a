use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Field, Vector};
use crate::error::{Error, Result};

/// Square matrix over ℝ or ℂ. Real matrices keep zero imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    field: Field,
    data: DMatrix<Complex64>,
}

impl Matrix {
    pub fn new(field: Field, data: DMatrix<Complex64>) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::InvalidInput(format!(
                "matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::FieldMismatch("complex entry in a real matrix".into()));
        }
        Ok(Self { field, data })
    }

    pub fn real(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        let data = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0));
        Ok(Self { field: Field::Real, data })
    }

    pub fn complex(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        Ok(Self { field: Field::Complex, data: DMatrix::from_fn(n, n, |i, j| rows[i][j]) })
    }

    pub fn from_real_dmatrix(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(Field::Real, m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Self { field, data: DMatrix::identity(n, n) }
    }

    pub fn scalar(field: Field, n: usize, value: Complex64) -> Self {
        Self { field, data: DMatrix::identity(n, n) * value }
    }

    pub fn diagonal(field: Field, values: &[Complex64]) -> Self {
        let n = values.len();
        Self { field, data: DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { Complex64::new(0.0, 0.0) }) }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn with_field(&self, field: Field) -> Result<Self> {
        Self::new(field, self.data.clone())
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check(rhs)?;
        Ok(Matrix { field: self.field, data: &self.data * &rhs.data })
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check(rhs)?;
        Ok(Matrix { field: self.field, data: &self.data - &rhs.data })
    }

    pub fn pow(&self, k: u32) -> Matrix {
        let mut result = DMatrix::identity(self.n(), self.n());
        let mut base = self.data.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Matrix { field: self.field, data: result }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        if v.dim() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: v.dim() });
        }
        if v.field() != self.field && !(self.field == Field::Real && v.field() == Field::Complex) {
            return Err(Error::FieldMismatch("real vector under a complex matrix".into()));
        }
        let x = nalgebra::DVector::from_vec(v.entries());
        let y = &self.data * x;
        Ok(match v.field() {
            Field::Real => Vector::real(y.iter().map(|z| z.re).collect()),
            Field::Complex => Vector::complex(y.as_slice()),
        })
    }

    /// Real matrix acting on interleaved coordinates: `n×n` over ℝ, `2n×2n` over ℂ.
    pub fn realified(&self) -> DMatrix<f64> {
        match self.field {
            Field::Real => self.data.map(|z| z.re),
            Field::Complex => {
                let n = self.n();
                let mut out = DMatrix::zeros(2 * n, 2 * n);
                for i in 0..n {
                    for j in 0..n {
                        let z = self.data[(i, j)];
                        out[(2 * i, 2 * j)] = z.re;
                        out[(2 * i, 2 * j + 1)] = -z.im;
                        out[(2 * i + 1, 2 * j)] = z.im;
                        out[(2 * i + 1, 2 * j + 1)] = z.re;
                    }
                }
                out
            }
        }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let inv = self
            .data
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NumericalBreakdown("singular matrix".into()))?;
        Ok(Matrix { field: self.field, data: inv })
    }

    fn check(&self, rhs: &Matrix) -> Result<()> {
        if self.n() != rhs.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: rhs.n() });
        }
        if self.field != rhs.field {
            return Err(Error::FieldMismatch("matrix fields differ".into()));
        }
        Ok(())
    }
}

/// `‖AB − BA‖_max`.
pub fn commutator_residual(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), got: b.n() });
    }
    let c = &a.data * &b.data - &b.data * &a.data;
    Ok(c.iter().fold(0.0f64, |m, z| m.max(z.norm())))
}

/// True iff `‖AB − BA‖_max ≤ tol`.
pub fn commutes_within(a: &Matrix, b: &Matrix, tol: f64) -> Result<bool> {
    Ok(commutator_residual(a, b)? <= tol)
}

/// Commutation test at the float-mode default tolerance for the operands' scale.
pub fn commutes(a: &Matrix, b: &Matrix) -> Result<bool> {
    let scale = a.max_abs() * b.max_abs();
    commutes_within(a, b, super::tolerance_for(scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_commutes_with_everything() {
        let a = Matrix::real(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!(commutes(&Matrix::identity(Field::Real, 2), &a).unwrap());
    }

    #[test]
    fn realified_complex_product_matches_complex_product() {
        let a = Matrix::complex(&[
            vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.5, 0.0), Complex64::new(-1.0, 1.0)],
        ])
        .unwrap();
        let v = Vector::complex(&[Complex64::new(0.3, -0.7), Complex64::new(2.0, 1.0)]);
        let direct = a.apply(&v).unwrap();
        let real = a.realified() * nalgebra::DVector::from_column_slice(v.coords());
        for (x, y) in direct.coords().iter().zip(real.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn pow_by_squaring() {
        let a = Matrix::real(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(a.pow(5).get(0, 1), Complex64::new(5.0, 0.0));
        assert_eq!(a.pow(0), Matrix::identity(Field::Real, 2));
    }
}
