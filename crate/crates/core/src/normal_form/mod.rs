//! Simultaneous block-triangular normal form `P⁻¹AᵢP ∈ 𝒦_η(𝕂)` of a commuting family.

mod decompose;
mod partition;

pub use decompose::CLUSTER_TOL;
pub use partition::{canonical_vector_u_eta, check_k_eta_membership, BlockKind, BlockSpec, Partition};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{commutes_within, Field, Matrix, MatrixJson, Vector};

/// Largest accepted condition number of `P`.
pub const MAX_CONDITION: f64 = 1e12;

/// Pattern tolerance used when recognizing already-conformant input.
const CONFORMANT_TOL: f64 = 1e-12;

/// Output of [`normal_form`].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub field: Field,
    pub p: Matrix,
    pub p_inverse: Matrix,
    pub eta: Partition,
    /// `P⁻¹AᵢP` in generator order.
    pub conjugated: Vec<Matrix>,
    /// Eigenvalue of each block (rows) under each generator (columns); `a + iβ` for a `𝔹` block.
    pub eigenvalues: Vec<Vec<Complex64>>,
    pub residual: f64,
    pub condition: f64,
}

impl NormalForm {
    pub fn blocks(&self) -> Vec<BlockSpec> {
        self.eta.blocks()
    }

    pub fn n(&self) -> usize {
        self.eta.n()
    }

    /// `P·v` for a vector given in normal-form coordinates.
    pub fn to_original(&self, v: &Vector) -> Result<Vector> {
        self.p.apply(v)
    }

    /// Column `P e_{index+1}`.
    pub fn p_column(&self, index: usize) -> Vector {
        self.p.apply(&Vector::basis(self.field, self.n(), index)).expect("square P")
    }

    pub fn to_json(&self) -> NormalFormJson {
        NormalFormJson {
            eta: self.eta.clone(),
            p: MatrixJson::from_matrix(&self.p).entries,
            residual: self.residual,
            condition: self.condition,
        }
    }
}

/// `{"eta":{…},"P":[[…]],"residual":float}` plus the condition number of `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormJson {
    pub eta: Partition,
    #[serde(rename = "P")]
    pub p: Vec<Vec<crate::linalg::ScalarJson>>,
    pub residual: f64,
    pub condition: f64,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// Fails with `NotCommuting` unless every pair commutes at the float tolerance.
pub fn check_commuting(gens: &[Matrix]) -> Result<()> {
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let tol = crate::linalg::tolerance_for(gens[i].max_abs() * gens[j].max_abs());
            if !commutes_within(&gens[i], &gens[j], tol)? {
                let residual = crate::linalg::matrix_commutator_residual(&gens[i], &gens[j])?;
                return Err(Error::NotCommuting { residual });
            }
        }
    }
    Ok(())
}

fn components(gens: &[DMatrix<Complex64>], n: usize) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..n).collect();
    fn root(l: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while l[r] != r {
            r = l[r];
        }
        l[i] = r;
        r
    }
    for a in gens {
        for i in 0..n {
            for j in 0..n {
                if i != j && a[(i, j)] != Complex64::new(0.0, 0.0) {
                    let (x, y) = (root(&mut label, i), root(&mut label, j));
                    if x != y {
                        label[x.max(y)] = x.min(y);
                    }
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut label, i);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(Vec::new());
        }
        out[slot[r]].push(i);
    }
    out
}

fn is_t_block(gens: &[DMatrix<Complex64>], idx: &[usize], tol: f64) -> bool {
    gens.iter().all(|a| {
        let lead = a[(idx[0], idx[0])];
        idx.iter().enumerate().all(|(p, &i)| {
            (a[(i, i)] - lead).norm() <= tol && idx[p + 1..].iter().all(|&j| a[(i, j)].norm() <= tol)
        })
    })
}

fn is_b_block(gens: &[DMatrix<Complex64>], idx: &[usize], tol: f64) -> bool {
    if idx.len() % 2 != 0 {
        return false;
    }
    let m = idx.len() / 2;
    gens.iter().all(|a| {
        let cell = |p: usize, q: usize| {
            let (r0, r1, c0, c1) = (idx[2 * p], idx[2 * p + 1], idx[2 * q], idx[2 * q + 1]);
            [a[(r0, c0)], a[(r0, c1)], a[(r1, c0)], a[(r1, c1)]]
        };
        let lead = cell(0, 0);
        (0..m).all(|p| {
            (0..m).all(|q| {
                let x = cell(p, q);
                if q > p {
                    x.iter().all(|z| z.norm() <= tol)
                } else {
                    (x[0] - x[3]).norm() <= tol
                        && (x[1] + x[2]).norm() <= tol
                        && (p != q || x.iter().zip(lead).all(|(z, l)| (z - l).norm() <= tol))
                }
            })
        })
    })
}

/// Recognizes generators that already lie in some `𝒦_η`, up to reordering blocks.
fn conformant(gens: &[DMatrix<Complex64>], field: Field) -> Option<(Partition, Vec<usize>)> {
    let n = gens[0].nrows();
    let scale = gens.iter().map(max_abs).fold(1.0f64, f64::max);
    let tol = CONFORMANT_TOL * scale;
    let mut t_comps = Vec::new();
    let mut b_comps = Vec::new();
    for comp in components(gens, n) {
        let contiguous = comp.windows(2).all(|w| w[1] == w[0] + 1);
        if !contiguous {
            return None;
        }
        if is_t_block(gens, &comp, tol) {
            t_comps.push(comp);
        } else if field == Field::Real && is_b_block(gens, &comp, tol) {
            b_comps.push(comp);
        } else {
            return None;
        }
    }
    let t_parts = t_comps.iter().map(Vec::len).collect();
    let b_parts = b_comps.iter().map(|c| c.len() / 2).collect();
    let eta = match field {
        Field::Complex => Partition::complex(t_parts).ok()?,
        Field::Real => Partition::real(t_parts, b_parts).ok()?,
    };
    let perm = t_comps.into_iter().chain(b_comps).flatten().collect();
    Some((eta, perm))
}

fn condition_number(p: &DMatrix<Complex64>) -> f64 {
    let sv = p.clone().singular_values();
    let max = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn block_eigenvalues(conjugated: &[Matrix], eta: &Partition) -> Vec<Vec<Complex64>> {
    eta.blocks()
        .iter()
        .map(|b| {
            conjugated
                .iter()
                .map(|a| {
                    let d = a.data();
                    match b.kind {
                        BlockKind::T => (0..b.size).map(|i| d[(b.offset + i, b.offset + i)]).sum::<Complex64>() / b.size as f64,
                        BlockKind::B => {
                            let mut s = Complex64::new(0.0, 0.0);
                            for k in 0..b.size {
                                let r = b.offset + 2 * k;
                                let alpha = (d[(r, r)].re + d[(r + 1, r + 1)].re) / 2.0;
                                let beta = (d[(r + 1, r)].re - d[(r, r + 1)].re) / 2.0;
                                s += Complex64::new(alpha, beta);
                            }
                            s / b.size as f64
                        }
                    }
                })
                .collect()
        })
        .collect()
}

/// Simultaneous normal form of a commuting family over `field`.
///
/// Already-conformant generators keep their block order and get a permutation `P`;
/// otherwise blocks are ordered `𝕋` before `𝔹`, by decreasing size, then by the
/// lexicographic order of their eigenvalues.
pub fn normal_form(generators: &[Matrix], field: Field) -> Result<NormalForm> {
    let first = generators.first().ok_or_else(|| Error::InvalidInput("empty generator list".into()))?;
    let n = first.n();
    for g in generators {
        if g.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.n() });
        }
        if field == Field::Real && g.field() == Field::Complex {
            return Err(Error::FieldMismatch("complex generator for a real normal form".into()));
        }
    }
    let gens: Vec<Matrix> = generators.iter().map(|g| g.with_field(field)).collect::<Result<_>>()?;
    check_commuting(&gens)?;
    let data: Vec<DMatrix<Complex64>> = gens.iter().map(|g| g.data().clone()).collect();
    let (p, eta) = match conformant(&data, field) {
        Some((eta, perm)) => {
            let mut p = DMatrix::zeros(n, n);
            for (k, &i) in perm.iter().enumerate() {
                p[(i, k)] = Complex64::new(1.0, 0.0);
            }
            (p, eta)
        }
        None => {
            let d = decompose::decompose(&data, field)?;
            (d.p, d.eta)
        }
    };
    let condition = condition_number(&p);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::NumericalBreakdown(format!("change of basis has condition number {condition:e}")));
    }
    let p_inv = p.clone().try_inverse().ok_or_else(|| Error::NumericalBreakdown("singular change of basis".into()))?;
    let p_inv = if field == Field::Real { p_inv.map(|z| Complex64::new(z.re, 0.0)) } else { p_inv };
    let p_m = Matrix::new(field, p)?;
    let p_inv_m = Matrix::new(field, p_inv)?;
    let conjugated: Vec<Matrix> = gens
        .iter()
        .map(|a| p_inv_m.mul(a)?.mul(&p_m))
        .collect::<Result<_>>()?;
    let mut residual = 0.0f64;
    for c in &conjugated {
        residual = residual.max(check_k_eta_membership(c, &eta, f64::INFINITY)?.1);
    }
    let eigenvalues = block_eigenvalues(&conjugated, &eta);
    Ok(NormalForm { field, p: p_m, p_inverse: p_inv_m, eta, conjugated, eigenvalues, residual, condition })
}

/// Common eigenvector data of a commuting family.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonEigen {
    /// One vector, or two spanning an invariant plane when no real eigenvector exists.
    pub span: Vec<Vector>,
    /// Eigenvalue per family member (`a + iβ` for a plane).
    pub eigenvalues: Vec<Complex64>,
}

/// Common eigenvector (or invariant plane over ℝ) taken from the first normal-form block.
pub fn common_eigenvector(family: &[Matrix], field: Field) -> Result<CommonEigen> {
    let nf = normal_form(family, field)?;
    common_eigenvector_of(&nf)
}

/// Last basis vector of the first block: an eigenvector of every lower-triangular block.
pub fn common_eigenvector_of(nf: &NormalForm) -> Result<CommonEigen> {
    let b = nf.blocks()[0];
    let last = b.offset + b.span() - 1;
    let span = match b.kind {
        BlockKind::T => vec![nf.p_column(last)],
        BlockKind::B => vec![nf.p_column(last - 1), nf.p_column(last)],
    };
    Ok(CommonEigen { span, eigenvalues: nf.eigenvalues[0].clone() })
}
