use super::{Surd, Vector};
use crate::error::{Error, Result};

/// Real vector with exact surd entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactVector(pub Vec<Surd>);

impl ExactVector {
    pub fn from_ints(v: &[i64]) -> Self {
        Self(v.iter().map(|&x| Surd::from_int(x)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Surd::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Surd] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Surd::is_zero)
    }

    pub fn to_vector(&self) -> Vector {
        Vector::real(self.0.iter().map(Surd::to_f64).collect())
    }

    pub fn add(&self, other: &ExactVector) -> Result<ExactVector> {
        self.check(other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &ExactVector) -> Result<ExactVector> {
        self.check(other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, k: &Surd) -> ExactVector {
        Self(self.0.iter().map(|a| a * k).collect())
    }

    pub fn dot(&self, other: &ExactVector) -> Result<Surd> {
        self.check(other)?;
        Ok(self.0.iter().zip(&other.0).fold(Surd::zero(), |acc, (a, b)| &acc + &(a * b)))
    }

    fn check(&self, other: &ExactVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }
}

/// Row-reduces `rows` in place over the surd field and returns the pivot columns.
fn eliminate(rows: &mut [Vec<Surd>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inverse().expect("nonzero pivot");
        rows[r] = rows[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Rank of a list of exact vectors.
pub fn exact_rank(vectors: &[ExactVector]) -> usize {
    let mut rows: Vec<Vec<Surd>> = vectors.iter().map(|v| v.0.clone()).collect();
    eliminate(&mut rows).len()
}

/// Subspace of ℝⁿ spanned by exact vectors; membership and projection are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSubspace {
    ambient: usize,
    basis: Vec<ExactVector>,
    /// Spans the orthogonal complement; membership is a set of dot products.
    annihilator: Vec<ExactVector>,
}

/// Null space of the row space of `basis`, one vector per free column of its reduced echelon form.
fn annihilator(basis: &[ExactVector], ambient: usize) -> Vec<ExactVector> {
    let mut rows: Vec<Vec<Surd>> = basis.iter().map(|v| v.0.clone()).collect();
    let pivots = eliminate(&mut rows);
    (0..ambient)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut x = vec![Surd::zero(); ambient];
            x[f] = Surd::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -rows[i][f].clone();
            }
            ExactVector(x)
        })
        .collect()
}

impl ExactSubspace {
    pub fn from_basis(vectors: &[ExactVector]) -> Result<Self> {
        let first = vectors.first().ok_or(Error::AllZeroInput)?;
        let ambient = first.dim();
        let mut basis: Vec<ExactVector> = Vec::new();
        for v in vectors {
            if v.dim() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, got: v.dim() });
            }
            let mut trial = basis.clone();
            trial.push(v.clone());
            if exact_rank(&trial) == trial.len() {
                basis = trial;
            }
        }
        if basis.is_empty() {
            return Err(Error::AllZeroInput);
        }
        let annihilator = annihilator(&basis, ambient);
        Ok(Self { ambient, basis, annihilator })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[ExactVector] {
        &self.basis
    }

    pub fn contains(&self, point: &ExactVector) -> Result<bool> {
        if point.dim() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, got: point.dim() });
        }
        for a in &self.annihilator {
            if !a.dot(point)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coefficients `c` of the orthogonal projection `Σ cᵢ bᵢ`, from the normal equations.
    pub fn projection_coefficients(&self, point: &ExactVector) -> Result<Vec<Surd>> {
        let r = self.basis.len();
        let mut rows = Vec::with_capacity(r);
        for bi in &self.basis {
            let mut row = Vec::with_capacity(r + 1);
            for bj in &self.basis {
                row.push(bi.dot(bj)?);
            }
            row.push(bi.dot(point)?);
            rows.push(row);
        }
        eliminate(&mut rows);
        Ok(rows.into_iter().map(|row| row[r].clone()).collect())
    }

    pub fn project(&self, point: &ExactVector) -> Result<ExactVector> {
        let coeffs = self.projection_coefficients(point)?;
        let mut out = ExactVector::zeros(self.ambient);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out = out.add(&b.scale(c))?;
        }
        Ok(out)
    }

    /// Squared distance to the subspace, exactly.
    pub fn distance_squared(&self, point: &ExactVector) -> Result<Surd> {
        let d = point.sub(&self.project(point)?)?;
        d.dot(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd_plane() -> ExactSubspace {
        ExactSubspace::from_basis(&[
            ExactVector(vec![Surd::one(), Surd::zero(), Surd::sqrt(2)]),
            ExactVector(vec![Surd::zero(), Surd::one(), Surd::sqrt(3)]),
        ])
        .unwrap()
    }

    #[test]
    fn exact_projection_matches_closed_form() {
        let p = surd_plane().project(&ExactVector::from_ints(&[1, 1, 1])).unwrap();
        let expected = [
            Surd::parse("2/3 + 1/6*sqrt(2) - 1/6*sqrt(6)").unwrap(),
            Surd::parse("1/2 + 1/6*sqrt(3) - 1/6*sqrt(6)").unwrap(),
            Surd::parse("5/6 + 1/6*sqrt(2) + 1/6*sqrt(3)").unwrap(),
        ];
        assert_eq!(p.0, expected);
    }

    #[test]
    fn membership_is_exact() {
        let m = surd_plane();
        let inside = ExactVector(vec![Surd::from_int(3), Surd::from_int(-2), &Surd::sqrt(18) - &Surd::sqrt(12)]);
        assert!(m.contains(&inside).unwrap());
        let outside = ExactVector(vec![Surd::from_int(3), Surd::from_int(-2), Surd::sqrt(5)]);
        assert!(!m.contains(&outside).unwrap());
        assert!(m.distance_squared(&inside).unwrap().is_zero());
    }

    #[test]
    fn dependent_vectors_are_dropped() {
        let m = ExactSubspace::from_basis(&[
            ExactVector(vec![Surd::one(), Surd::sqrt(2)]),
            ExactVector(vec![Surd::sqrt(2), Surd::from_int(2)]),
        ])
        .unwrap();
        assert_eq!(m.dim(), 1);
    }
}
