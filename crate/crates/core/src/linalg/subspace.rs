use super::{Field, Vector};
use crate::error::{Error, Result};

/// Relative norm below which a Gram–Schmidt residual counts as dependent.
const RANK_TOL: f64 = 1e-10;

/// Linear subspace of 𝕂ⁿ with a cached orthonormal real basis.
///
/// Over ℂ the orthonormal basis lives in ℝ²ⁿ and holds pairs `φ(b), φ(ib)`,
/// so M-coordinates come out interleaved as `(Re c₁, Im c₁, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vector>,
    ortho: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn field(&self) -> Field {
        self.field
    }

    /// Ambient dimension over 𝕂.
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Dimension over 𝕂.
    pub fn dim(&self) -> usize {
        self.ortho.len() / self.field.width()
    }

    /// Real dimension of the M-coordinate system.
    pub fn real_dim(&self) -> usize {
        self.ortho.len()
    }

    /// Independent input vectors kept after rank reduction.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Orthonormal real basis vectors (length `real_dim` of the ambient space).
    pub fn orthonormal(&self) -> &[Vec<f64>] {
        &self.ortho
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Coordinates of the projection of `point` in the orthonormal basis.
    pub fn coordinates(&self, point: &Vector) -> Result<Vec<f64>> {
        self.check(point)?;
        Ok(self.ortho.iter().map(|q| dot(q, point.coords())).collect())
    }

    /// Point of the ambient space with the given M-coordinates.
    pub fn from_coordinates(&self, coords: &[f64]) -> Result<Vector> {
        if coords.len() != self.ortho.len() {
            return Err(Error::DimensionMismatch { expected: self.ortho.len(), got: coords.len() });
        }
        let mut out = vec![0.0; self.ambient * self.field.width()];
        for (c, q) in coords.iter().zip(&self.ortho) {
            for (o, x) in out.iter_mut().zip(q) {
                *o += c * x;
            }
        }
        Vector::from_real_coords(self.field, out)
    }

    /// Gram determinant of the cached orthonormal basis.
    pub fn gram_determinant(&self) -> f64 {
        let k = self.ortho.len();
        let g = nalgebra::DMatrix::from_fn(k, k, |i, j| dot(&self.ortho[i], &self.ortho[j]));
        g.determinant()
    }

    fn check(&self, point: &Vector) -> Result<()> {
        if point.field() != self.field {
            return Err(Error::FieldMismatch("point and subspace fields differ".into()));
        }
        if point.dim() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, got: point.dim() });
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthogonalizes `v` against `basis` twice (modified Gram–Schmidt), returning the residual.
fn reduce(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
    w
}

fn push_if_independent(ortho: &mut Vec<Vec<f64>>, v: &[f64]) -> bool {
    let scale = dot(v, v).sqrt();
    if scale == 0.0 {
        return false;
    }
    let w = reduce(ortho, v);
    let norm = dot(&w, &w).sqrt();
    if norm <= RANK_TOL * scale {
        return false;
    }
    ortho.push(w.into_iter().map(|x| x / norm).collect());
    true
}

/// Span of `vectors`, rank-reduced and orthonormalized.
pub fn subspace_from_basis(vectors: &[Vector]) -> Result<Subspace> {
    let first = vectors.first().ok_or(Error::AllZeroInput)?;
    let field = first.field();
    let ambient = first.dim();
    for v in vectors {
        if v.field() != field {
            return Err(Error::FieldMismatch("basis vectors over different fields".into()));
        }
        if v.dim() != ambient {
            return Err(Error::DimensionMismatch { expected: ambient, got: v.dim() });
        }
    }
    if vectors.iter().all(Vector::is_zero) {
        return Err(Error::AllZeroInput);
    }
    let mut ortho = Vec::new();
    let mut basis = Vec::new();
    for v in vectors {
        if push_if_independent(&mut ortho, v.coords()) {
            if field == Field::Complex {
                let pushed = push_if_independent(&mut ortho, v.times_i().coords());
                debug_assert!(pushed);
            }
            basis.push(v.clone());
        }
    }
    Ok(Subspace { field, ambient, basis, ortho })
}

/// Orthogonal projection onto `m`.
pub fn project(point: &Vector, m: &Subspace) -> Result<Vector> {
    let c = m.coordinates(point)?;
    m.from_coordinates(&c)
}

/// Euclidean distance `‖point − project(point, m)‖`.
pub fn membership_distance(point: &Vector, m: &Subspace) -> Result<f64> {
    let p = project(point, m)?;
    Ok(point.sub(&p)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn dependent_pair_collapses() {
        let m = subspace_from_basis(&[Vector::real(vec![1.0, 0.0, 0.0]), Vector::real(vec![2.0, 0.0, 0.0])])
            .unwrap();
        assert_eq!(m.dim(), 1);
    }

    #[test]
    fn all_zero_is_an_error() {
        let z = Vector::zeros(Field::Real, 3);
        assert_eq!(subspace_from_basis(&[z.clone(), z]), Err(Error::AllZeroInput));
        assert_eq!(subspace_from_basis(&[]), Err(Error::AllZeroInput));
    }

    #[test]
    fn surd_plane_is_orthonormal() {
        let m = subspace_from_basis(&[
            Vector::real(vec![1.0, 0.0, 2f64.sqrt()]),
            Vector::real(vec![0.0, 1.0, 3f64.sqrt()]),
        ])
        .unwrap();
        assert_eq!(m.dim(), 2);
        assert!((m.gram_determinant() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn orthogonal_axis_distance() {
        let m = subspace_from_basis(&[Vector::real(vec![1.0, 0.0])]).unwrap();
        assert_eq!(membership_distance(&Vector::real(vec![0.0, 1.0]), &m).unwrap(), 1.0);
        assert_eq!(project(&Vector::real(vec![3.0, 4.0]), &m).unwrap().coords(), &[3.0, 0.0]);
    }

    #[test]
    fn least_squares_projection() {
        let m = subspace_from_basis(&[
            Vector::real(vec![1.0, 0.0, 2f64.sqrt()]),
            Vector::real(vec![0.0, 1.0, 3f64.sqrt()]),
        ])
        .unwrap();
        let p = project(&Vector::real(vec![1.0, 1.0, 1.0]), &m).unwrap();
        let expected = [0.4941206365983195, 0.38042684413094985, 1.357710728323662];
        for (x, y) in p.coords().iter().zip(expected) {
            assert!((x - y).abs() < 1e-14, "{x} vs {y}");
        }
    }

    #[test]
    fn distance_jumps_when_the_span_grows() {
        for n in 2..6 {
            let y: Vec<Vector> = (0..n - 1).map(|i| Vector::basis(Field::Real, n, i)).collect();
            let e = Vector::basis(Field::Real, n, n - 1).scale(2.0);
            let ym = subspace_from_basis(&y).unwrap();
            assert!((membership_distance(&e, &ym).unwrap() - 2.0).abs() < 1e-15);
            let mut a = vec![0.3; n];
            a[n - 1] = 0.01;
            let mut with_a = y.clone();
            with_a.push(Vector::real(a));
            let big = subspace_from_basis(&with_a).unwrap();
            assert!(membership_distance(&e, &big).unwrap() < 1e-12);
        }
    }

    #[test]
    fn complex_line_contains_its_multiples() {
        let b = Vector::complex(&[Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)]);
        let m = subspace_from_basis(&[b.clone()]).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m.real_dim(), 2);
        let w = Vector::complex(&[
            Complex64::new(1.0, 1.0) * Complex64::new(0.5, -3.0),
            Complex64::new(0.0, 2.0) * Complex64::new(0.5, -3.0),
        ]);
        assert!(membership_distance(&w, &m).unwrap() < 1e-12);
    }
}
