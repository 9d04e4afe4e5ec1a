//! Hypercyclicity and subspace-hypercyclicity probes, canonical subspaces, spectra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::orbit::{Budget, OrbitEngine};
use super::MatrixSemigroup;
use crate::density::{density_trend, CoverageReport, GridCover, Thresholds, Verdict, Window};
use crate::error::{Error, Result};
use crate::linalg::{project, subspace_from_basis, Field, Subspace, Vector};
use crate::normal_form::{canonical_vector_u_eta, normal_form, BlockKind, NormalForm, Partition};

/// Relative size below which entries of conjugated generators are treated as zero.
pub const PATTERN_SNAP: f64 = 1e-12;

/// Result of [`hypercyclicity_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub report: CoverageReport,
    pub eta: Partition,
    /// `u_η` in normal-form coordinates.
    pub u_eta: Vector,
    /// `P·u_η` in the original coordinates.
    pub start: Vector,
    pub normal_form_residual: f64,
}

impl ProbeReport {
    pub fn hypercyclic_evidence(&self) -> bool {
        self.report.verdict == Verdict::DenseEvidence
    }
}

/// Start coordinates below `PATTERN_SNAP` relative to the largest are zeroed too.
fn conjugated_engine(nf: &NormalForm, start: &Vector) -> Result<OrbitEngine> {
    let mats: Vec<DMatrix<f64>> = nf.conjugated.iter().map(|a| a.realified()).collect();
    let cut = PATTERN_SNAP * start.max_abs();
    let v: Vec<f64> = start.coords().iter().map(|&x| if x.abs() <= cut { 0.0 } else { x }).collect();
    OrbitEngine::new(&mats, &v, PATTERN_SNAP)
}

/// Density evidence for the orbit of `u_η` under `P⁻¹GP`, in normal-form coordinates.
pub fn hypercyclicity_probe(
    g: &MatrixSemigroup,
    window: &Window,
    eps: f64,
    budget: &Budget,
    schedule: &[u64],
    thresholds: Thresholds,
) -> Result<ProbeReport> {
    g.require_abelian()?;
    let nf = normal_form(g.generators(), g.field())?;
    let u = canonical_vector_u_eta(&nf.eta);
    let engine = conjugated_engine(&nf, &u)?;
    let report = density_trend(|k| engine.cover(&budget.bounds(g.len(), k)?, window, eps), schedule, thresholds)?;
    Ok(ProbeReport { report, start: nf.to_original(&u)?, u_eta: u, eta: nf.eta.clone(), normal_form_residual: nf.residual })
}

/// The model subspace of the first block, mapped back by `P`.
///
/// Over ℂ and over ℝ with a triangular first block this is the line through
/// `P e_{n₁}`; when every real block is a rotation-scaling block it is the plane of
/// the last cell of the first block.
pub fn canonical_invariant_subspace(nf: &NormalForm) -> Result<Subspace> {
    let n = nf.n();
    if n < 2 {
        return Err(Error::NoNontrivialCanonical("a line has no nontrivial proper subspace".into()));
    }
    let first = nf.blocks()[0];
    match first.kind {
        BlockKind::T => subspace_from_basis(&[nf.p_column(first.offset + first.size - 1)]),
        BlockKind::B => {
            if nf.field == Field::Real && n == 2 {
                return Err(Error::NoNontrivialCanonical("the model plane is all of ℝ²".into()));
            }
            let last = first.offset + 2 * first.size - 1;
            subspace_from_basis(&[nf.p_column(last - 1), nf.p_column(last)])
        }
    }
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

/// Coordinates in `m` of the points of the orbit of `x` that lie within `tol` of `m`.
struct TraceMap {
    p: Option<DMatrix<f64>>,
    ortho: Vec<Vec<f64>>,
    tol: f64,
}

impl TraceMap {
    /// M-coordinates when the (normal-form) point lies in `M`.
    fn coords(&self, x: &[f64]) -> Option<Vec<f64>> {
        let y: Vec<f64> = match &self.p {
            Some(p) => (0..p.nrows()).map(|i| (0..p.ncols()).map(|j| p[(i, j)] * x[j]).sum()).collect(),
            None => x.to_vec(),
        };
        let c: Vec<f64> = self.ortho.iter().map(|q| q.iter().zip(&y).map(|(a, b)| a * b).sum()).collect();
        let mut r = y;
        for (ci, q) in c.iter().zip(&self.ortho) {
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= ci * qi;
            }
        }
        let dist = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        (dist <= self.tol).then_some(c)
    }
}

/// Density evidence for `G(x) ∩ M` in the orthonormal M-coordinates.
///
/// `window` lives in M-coordinates; membership uses `tol = 1e-9 · diam(window)`.
#[allow(clippy::too_many_arguments)]
pub fn subspace_hypercyclicity_probe(
    g: &MatrixSemigroup,
    m: &Subspace,
    x: &Vector,
    window: &Window,
    eps: f64,
    budget: &Budget,
    schedule: &[u64],
    thresholds: Thresholds,
) -> Result<CoverageReport> {
    g.require_abelian()?;
    if m.field() != g.field() || m.ambient_dim() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: m.ambient_dim() });
    }
    if x.field() != g.field() || x.dim() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: x.dim() });
    }
    if window.dim() != m.real_dim() {
        return Err(Error::DimensionMismatch { expected: m.real_dim(), got: window.dim() });
    }
    let tol = 1e-9 * window.diameter();
    let (engine, p, norm_p, norm_pinv) = match normal_form(g.generators(), g.field()) {
        Ok(nf) => {
            let start = nf.p_inverse.apply(x)?;
            let p = nf.p.realified();
            let pinv = nf.p_inverse.realified();
            let (a, b) = (spectral_norm(&p), spectral_norm(&pinv));
            (conjugated_engine(&nf, &start)?, Some(p), a, b)
        }
        Err(Error::NumericalBreakdown(_)) => (OrbitEngine::for_semigroup(g, x)?, None, 1.0, 1.0),
        Err(e) => return Err(e),
    };
    let map = TraceMap { p, ortho: m.orthonormal().to_vec(), tol };
    let reach = norm_pinv * (window.reach() + tol);
    let floor = (window.floor_norm() - tol).max(0.0) / norm_p;
    let cons = [engine.norm_constraint(floor, reach)];
    let empty = GridCover::new(window, eps)?;
    density_trend(
        |k| {
            let bounds = budget.bounds(g.len(), k)?;
            let (shards, _) = engine.fold(
                &bounds,
                &cons,
                || (empty.clone(), 0u64),
                |(cover, n), _, y| {
                    if let Some(c) = map.coords(y) {
                        if window.contains(&c) {
                            *n += 1;
                        }
                        cover.insert(&c);
                    }
                },
            )?;
            let n = shards.iter().map(|s| s.1).sum();
            Ok((GridCover::from_shards(window, eps, shards.into_iter().map(|s| s.0).collect())?, n))
        },
        schedule,
        thresholds,
    )
}

/// Searches `M` for a vector whose orbit trace on `M` shows dense evidence.
///
/// Candidates, in order: `hint` (when it lies in `M`), M-grid points (basis
/// directions and the diagonal) at scales 1, ½ and 2, then the projection of `P·u_η`.
#[allow(clippy::too_many_arguments)]
pub fn witness_in_subspace(
    g: &MatrixSemigroup,
    m: &Subspace,
    window: &Window,
    eps: f64,
    budget: &Budget,
    schedule: &[u64],
    thresholds: Thresholds,
    candidates: usize,
    hint: Option<&Vector>,
) -> Result<Option<Vector>> {
    let tol = 1e-9 * window.diameter();
    let mut list: Vec<Vector> = Vec::new();
    if let Some(h) = hint {
        if crate::linalg::membership_distance(h, m)? <= tol * (1.0 + h.norm()) && !h.is_zero() {
            list.push(h.clone());
        }
    }
    let r = m.real_dim();
    for scale in [1.0, 0.5, 2.0] {
        for i in 0..r {
            let mut c = vec![0.0; r];
            c[i] = scale;
            list.push(m.from_coordinates(&c)?);
        }
        if r > 1 {
            list.push(m.from_coordinates(&vec![scale / (r as f64).sqrt(); r])?);
        }
    }
    if let Ok(nf) = normal_form(g.generators(), g.field()) {
        let y = project(&nf.to_original(&canonical_vector_u_eta(&nf.eta))?, m)?;
        if !y.is_zero() {
            list.push(y);
        }
    }
    for y in list.into_iter().take(candidates) {
        let rep = subspace_hypercyclicity_probe(g, m, &y, window, eps, budget, schedule, thresholds)?;
        if rep.verdict == Verdict::DenseEvidence {
            return Ok(Some(y));
        }
    }
    Ok(None)
}

/// Eigenvalues of one diagonal block over the enumerated products.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet {
    pub block: usize,
    /// Exponent vector of each recorded product.
    pub exponents: Vec<Vec<u32>>,
    /// Eigenvalue `Π λᵢ^{kᵢ}` of the block; a rotation-scaling block also has the conjugate.
    pub values: Vec<Complex64>,
    pub kind: BlockKind,
}

impl SpectrumSet {
    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// Every eigenvalue, conjugates included.
    pub fn all_values(&self) -> Vec<Complex64> {
        match self.kind {
            BlockKind::T => self.values.clone(),
            BlockKind::B => self.values.iter().flat_map(|z| [*z, z.conj()]).collect(),
        }
    }
}

/// Scalar generators acting on `𝕂` (real line or realified plane) for one block.
fn block_engine(g: &MatrixSemigroup, nf: &NormalForm, block: usize) -> Result<(OrbitEngine, bool, BlockKind)> {
    let blocks = nf.blocks();
    let spec = *blocks
        .get(block)
        .ok_or_else(|| Error::InvalidInput(format!("block index {block} out of range ({} blocks)", blocks.len())))?;
    let lambdas = &nf.eigenvalues[block];
    if lambdas.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: g.len(), got: lambdas.len() });
    }
    let real = nf.field == Field::Real && spec.kind == BlockKind::T;
    let mats: Vec<DMatrix<f64>> = lambdas
        .iter()
        .map(|z| {
            if real {
                DMatrix::from_element(1, 1, z.re)
            } else {
                DMatrix::from_row_slice(2, 2, &[z.re, -z.im, z.im, z.re])
            }
        })
        .collect();
    let start: &[f64] = if real { &[1.0] } else { &[1.0, 0.0] };
    Ok((OrbitEngine::new(&mats, start, PATTERN_SNAP)?, real, spec.kind))
}

/// The spectrum of block `block` over all products with exponents within `bounds`.
pub fn spectrum(g: &MatrixSemigroup, nf: &NormalForm, block: usize, bounds: &[u32]) -> Result<SpectrumSet> {
    let (engine, real, kind) = block_engine(g, nf, block)?;
    let (shards, _) = engine.fold(bounds, &[], Vec::new, |s: &mut Vec<(Vec<u32>, Complex64)>, e, x| {
        let z = if real { Complex64::new(x[0], 0.0) } else { Complex64::new(x[0], x[1]) };
        s.push((e.to_vec(), z));
    })?;
    let (exponents, values) = shards.into_iter().flatten().unzip();
    Ok(SpectrumSet { block, exponents, values, kind })
}

/// Density evidence of the block spectrum in a window of `𝕂` (dimension 1 or 2).
#[allow(clippy::too_many_arguments)]
pub fn spectrum_report(
    g: &MatrixSemigroup,
    nf: &NormalForm,
    block: usize,
    budget: &Budget,
    window: &Window,
    eps: f64,
    schedule: &[u64],
    thresholds: Thresholds,
) -> Result<CoverageReport> {
    let (engine, real, kind) = block_engine(g, nf, block)?;
    let want = if real { 1 } else { 2 };
    if window.dim() != want {
        return Err(Error::DimensionMismatch { expected: want, got: window.dim() });
    }
    let cons = engine.constraints_for(window)?;
    let empty = GridCover::new(window, eps)?;
    density_trend(
        |k| {
            let bounds = budget.bounds(g.len(), k)?;
            let (shards, _) = engine.fold(
                &bounds,
                &cons,
                || (empty.clone(), 0u64),
                |(c, n), _, x| {
                    *n += 1;
                    c.insert(x);
                    if kind == BlockKind::B {
                        c.insert(&[x[0], -x[1]]);
                    }
                },
            )?;
            let n = shards.iter().map(|s| s.1).sum();
            Ok((GridCover::from_shards(window, eps, shards.into_iter().map(|s| s.0).collect())?, n))
        },
        schedule,
        thresholds,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::example_g_theta;
    use crate::linalg::{membership_distance, Matrix, Surd};

    #[test]
    fn identity_semigroup_is_not_hypercyclic() {
        let g = MatrixSemigroup::abelian(vec![Matrix::identity(Field::Real, 2)], Field::Real).unwrap();
        let w = Window::cube(2, -2.0, 2.0).unwrap();
        let p = hypercyclicity_probe(&g, &w, 0.1, &Budget::uniform(), &[10, 20, 40], Thresholds::default()).unwrap();
        assert_eq!(p.report.verdict, Verdict::NotDenseEvidence);
        assert_eq!(p.report.cells_hit, 1);
    }

    #[test]
    fn g_theta_has_no_canonical_subspace() {
        let g = example_g_theta(2, 3, &Surd::sqrt(2)).unwrap();
        let nf = normal_form(g.generators(), Field::Real).unwrap();
        assert!(matches!(canonical_invariant_subspace(&nf), Err(Error::NoNontrivialCanonical(_))));
    }

    #[test]
    fn canonical_subspace_is_invariant() {
        let a = Matrix::real(&[vec![2.0, 0.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]]).unwrap();
        let b = a.mul(&a).unwrap();
        let g = MatrixSemigroup::abelian(vec![a, b], Field::Real).unwrap();
        let nf = normal_form(g.generators(), Field::Real).unwrap();
        let m = canonical_invariant_subspace(&nf).unwrap();
        assert_eq!(m.dim(), 1);
        for gen in g.generators() {
            for v in m.basis() {
                assert!(membership_distance(&gen.apply(v).unwrap(), &m).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn g_theta_spectrum_moduli() {
        let g = example_g_theta(2, 3, &Surd::sqrt(2)).unwrap();
        let nf = normal_form(g.generators(), Field::Real).unwrap();
        let s = spectrum(&g, &nf, 0, &[3, 3, 2]).unwrap();
        assert_eq!(s.values.len(), 48);
        for (e, r) in s.exponents.iter().zip(s.moduli()) {
            let want = 2f64.powi(e[0] as i32) / 3f64.powi(e[1] as i32);
            assert!((r - want).abs() <= 1e-12 * want);
        }
    }
}
