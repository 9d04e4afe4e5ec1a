use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Vector};

/// Kind of a diagonal block of `𝒦_η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    /// `𝕋_m`: lower triangular with a single eigenvalue.
    T,
    /// `𝔹_m`: block lower triangular in `𝕊` cells with a constant diagonal cell.
    B,
}

/// One diagonal block: `size` is `m` (so a `𝔹_m` block spans `2m` rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub kind: BlockKind,
    pub size: usize,
    pub offset: usize,
}

impl BlockSpec {
    /// Rows spanned in the ambient matrix.
    pub fn span(&self) -> usize {
        match self.kind {
            BlockKind::T => self.size,
            BlockKind::B => 2 * self.size,
        }
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.span()
    }
}

/// Partition `(n₁, …, n_r)` over ℂ or `(n₁, …, n_r; m₁, …, m_s)` over ℝ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partition {
    pub field: Field,
    #[serde(rename = "n")]
    pub t_parts: Vec<usize>,
    #[serde(rename = "m", default)]
    pub b_parts: Vec<usize>,
}

impl Partition {
    pub fn complex(parts: Vec<usize>) -> Result<Self> {
        let p = Self { field: Field::Complex, t_parts: parts, b_parts: Vec::new() };
        p.validate()?;
        Ok(p)
    }

    pub fn real(t_parts: Vec<usize>, b_parts: Vec<usize>) -> Result<Self> {
        let p = Self { field: Field::Real, t_parts, b_parts };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_parts.iter().chain(&self.b_parts).any(|&k| k == 0) {
            return Err(Error::InvalidInput("partition parts must be at least 1".into()));
        }
        if self.t_parts.is_empty() && self.b_parts.is_empty() {
            return Err(Error::InvalidInput("empty partition".into()));
        }
        if self.field == Field::Complex && !self.b_parts.is_empty() {
            return Err(Error::InvalidInput("rotation blocks only exist over R".into()));
        }
        Ok(())
    }

    /// `Σnᵢ + 2Σmⱼ`.
    pub fn n(&self) -> usize {
        self.t_parts.iter().sum::<usize>() + 2 * self.b_parts.iter().sum::<usize>()
    }

    pub fn r(&self) -> usize {
        self.t_parts.len()
    }

    pub fn s(&self) -> usize {
        self.b_parts.len()
    }

    /// Blocks in order: all `𝕋` blocks, then all `𝔹` blocks.
    pub fn blocks(&self) -> Vec<BlockSpec> {
        let mut out = Vec::with_capacity(self.r() + self.s());
        let mut offset = 0;
        for &size in &self.t_parts {
            out.push(BlockSpec { kind: BlockKind::T, size, offset });
            offset += size;
        }
        for &size in &self.b_parts {
            out.push(BlockSpec { kind: BlockKind::B, size, offset });
            offset += 2 * size;
        }
        out
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self.field {
            Field::Complex => write!(f, "({})", join(&self.t_parts)),
            Field::Real => write!(f, "({}; {})", join(&self.t_parts), join(&self.b_parts)),
        }
    }
}

/// `u_η`: a 1 in the first coordinate of every block.
pub fn canonical_vector_u_eta(eta: &Partition) -> Vector {
    let mut v = Vector::zeros(eta.field, eta.n());
    let mut coords = v.clone().into_coords();
    for b in eta.blocks() {
        coords[b.offset * eta.field.width()] = 1.0;
    }
    v = Vector::from_real_coords(eta.field, coords).expect("layout");
    v
}

/// Membership of `a` in `𝒦_η(𝕂)`; the residual is the largest violation.
pub fn check_k_eta_membership(a: &Matrix, eta: &Partition, tol: f64) -> Result<(bool, f64)> {
    let n = eta.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.n() });
    }
    let d = a.data();
    let mut res = 0.0f64;
    if eta.field == Field::Real {
        for z in d.iter() {
            res = res.max(z.im.abs());
        }
    }
    let blocks = eta.blocks();
    let mut owner = vec![0usize; n];
    for (k, b) in blocks.iter().enumerate() {
        for i in b.range() {
            owner[i] = k;
        }
    }
    for i in 0..n {
        for j in 0..n {
            if owner[i] != owner[j] {
                res = res.max(d[(i, j)].norm());
            }
        }
    }
    for b in &blocks {
        let o = b.offset;
        match b.kind {
            BlockKind::T => {
                let lead = d[(o, o)];
                for i in 0..b.size {
                    res = res.max((d[(o + i, o + i)] - lead).norm());
                    for j in i + 1..b.size {
                        res = res.max(d[(o + i, o + j)].norm());
                    }
                }
            }
            BlockKind::B => {
                let cell = |p: usize, q: usize| {
                    let (r, c) = (o + 2 * p, o + 2 * q);
                    [d[(r, c)], d[(r, c + 1)], d[(r + 1, c)], d[(r + 1, c + 1)]]
                };
                let lead = cell(0, 0);
                for p in 0..b.size {
                    for q in 0..b.size {
                        let x = cell(p, q);
                        if q > p {
                            for z in x {
                                res = res.max(z.norm());
                            }
                            continue;
                        }
                        res = res.max((x[0] - x[3]).norm()).max((x[1] + x[2]).norm());
                        if p == q {
                            for (z, l) in x.iter().zip(lead) {
                                res = res.max((z - l).norm());
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((res <= tol, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn u_eta_examples() {
        assert_eq!(canonical_vector_u_eta(&Partition::real(vec![1, 1], vec![]).unwrap()).coords(), &[1.0, 1.0]);
        let c = canonical_vector_u_eta(&Partition::complex(vec![2]).unwrap());
        assert_eq!(c.entries(), vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(canonical_vector_u_eta(&Partition::real(vec![1], vec![1]).unwrap()).coords(), &[1.0, 1.0, 0.0]);
    }

    #[test]
    fn sum_identity() {
        let p = Partition::real(vec![2, 1], vec![1, 2]).unwrap();
        assert_eq!(p.n(), 9);
        assert!(p.r() + 2 * p.s() <= p.n());
        assert!(Partition::complex(vec![0]).is_err());
    }

    #[test]
    fn membership_examples() {
        let eta = Partition::real(vec![2], vec![]).unwrap();
        let id = Matrix::identity(Field::Real, 2);
        assert_eq!(check_k_eta_membership(&id, &eta, 0.0).unwrap(), (true, 0.0));
        let d = Matrix::real(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert!(!check_k_eta_membership(&d, &eta, 1e-9).unwrap().0);
        let t = 2f64.sqrt() * std::f64::consts::PI;
        let rot = Matrix::real(&[vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]).unwrap();
        let b1 = Partition::real(vec![], vec![1]).unwrap();
        assert!(check_k_eta_membership(&rot, &b1, 1e-12).unwrap().0);
    }
}
