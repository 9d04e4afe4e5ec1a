//! Numerical simultaneous block triangularization of a commuting family.

use std::cmp::Ordering;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use super::partition::{BlockKind, Partition};
use crate::error::{Error, Result};
use crate::linalg::Field;

type CMat = DMatrix<Complex64>;

/// Relative tolerance for "one eigenvalue" when clustering.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Coefficient weights of the generic combination `L = Σ cᵢ Aᵢ/‖Aᵢ‖`.
fn weight(i: usize) -> f64 {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    1.0 / (i as f64 + golden) + 0.1 * ((i + 1) as f64).sqrt().fract()
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// One diagonal block of the decomposition before final ordering.
struct RawBlock {
    kind: BlockKind,
    /// Columns of P for this block, already in lower-triangular order.
    columns: Vec<DVector<Complex64>>,
    /// Scalar size m (a 𝔹 block spans 2m columns).
    size: usize,
    signature: Vec<Complex64>,
}

/// Change of basis and partition for a commuting family.
pub(super) struct Decomposition {
    pub p: CMat,
    pub eta: Partition,
}

/// Swaps adjacent diagonal entries `k, k+1` of the upper triangular `t`, updating `q`.
fn swap_adjacent(t: &mut CMat, q: &mut CMat, k: usize) {
    let a = t[(k, k)];
    let b = t[(k, k + 1)];
    let c = t[(k + 1, k + 1)];
    let v0 = b;
    let v1 = c - a;
    let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    if norm == 0.0 {
        return;
    }
    let (v0, v1) = (v0 / norm, v1 / norm);
    let u = DMatrix::from_row_slice(2, 2, &[v0, -v1.conj(), v1, v0.conj()]);
    let cols = t.columns(k, 2) * &u;
    t.columns_mut(k, 2).copy_from(&cols);
    let rows = u.adjoint() * t.rows(k, 2);
    t.rows_mut(k, 2).copy_from(&rows);
    let qc = q.columns(k, 2) * &u;
    q.columns_mut(k, 2).copy_from(&qc);
    t[(k + 1, k)] = Complex64::new(0.0, 0.0);
}

/// Groups eigenvalues: single linkage at the relative tolerance, plus any `k`
/// nearest neighbours lying within the spread `(n·ε_mach)^{1/k}` expected of a
/// perturbed `k×k` Jordan block.
fn cluster(eigs: &[Complex64]) -> Vec<Vec<usize>> {
    let n = eigs.len();
    let scale = eigs.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let tol = CLUSTER_TOL * scale;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    fn union(p: &mut [usize], a: usize, b: usize) {
        let (x, y) = (find(p, a), find(p, b));
        if x != y {
            p[x.max(y)] = x.min(y);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eigs[i] - eigs[j]).norm() <= tol {
                union(&mut parent, i, j);
            }
        }
    }
    for i in 0..n {
        let mut near: Vec<usize> = (0..n).collect();
        near.sort_by(|&a, &b| (eigs[a] - eigs[i]).norm().total_cmp(&(eigs[b] - eigs[i]).norm()));
        let mut best = 1;
        for k in 2..=n {
            let set = &near[..k];
            let c = set.iter().map(|&j| eigs[j]).sum::<Complex64>() / k as f64;
            let dev = set.iter().map(|&j| (eigs[j] - c).norm()).fold(0.0, f64::max);
            if dev <= scale * 10.0 * (n as f64 * f64::EPSILON).powf(1.0 / k as f64) {
                best = k;
            }
        }
        for &j in &near[1..best] {
            union(&mut parent, i, j);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Unitary `U` making every matrix of the commuting family upper triangular,
/// by repeated deflation along a common eigenvector.
fn triangularize<T>(mats: &[DMatrix<T>]) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let m = mats[0].nrows();
    let mut u = DMatrix::<T>::identity(m, m);
    for k in 0..m.saturating_sub(1) {
        let size = m - k;
        let mut stacked = DMatrix::<T>::zeros(size * mats.len(), size);
        for (g, a) in mats.iter().enumerate() {
            let c = u.adjoint() * a * &u;
            let sub = c.view((k, k), (size, size)).into_owned();
            let mut trace = T::zero();
            for i in 0..size {
                trace += sub[(i, i)];
            }
            let mu = trace / T::from_real(size as f64);
            let shifted = sub - DMatrix::<T>::identity(size, size) * mu;
            stacked.view_mut((g * size, 0), (size, size)).copy_from(&shifted);
        }
        let svd = stacked.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors");
        let idx = (0..svd.singular_values.len())
            .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
            .unwrap();
        let x: DVector<T> = v_t.row(idx).adjoint();
        let mut basis = DMatrix::<T>::zeros(size, size + 1);
        basis.set_column(0, &x);
        for i in 0..size {
            basis[(i, i + 1)] = T::one();
        }
        let h = basis.qr().q();
        let tail = u.columns(k, size) * h;
        u.columns_mut(k, size).copy_from(&tail);
    }
    u
}

fn cmp_signature(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn to_real(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Mean diagonal entry of `V⁺ A V` for the block's leading column.
fn signature_of(gens: &[CMat], col: &DVector<Complex64>) -> Vec<Complex64> {
    let denom = col.norm_squared();
    gens.iter().map(|a| col.dotc(&(a * col)) / denom).collect()
}

pub(super) fn decompose(gens: &[CMat], field: Field) -> Result<Decomposition> {
    let n = gens[0].nrows();
    let mut l = CMat::zeros(n, n);
    for (i, a) in gens.iter().enumerate() {
        let s = max_abs(a);
        if s > 0.0 {
            l += a * Complex64::new(weight(i) / s, 0.0);
        }
    }
    let (mut q, mut t) = nalgebra::linalg::Schur::new(l).unpack();
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    let eigs: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let groups = cluster(&eigs);
    let mut rank = vec![0usize; n];
    for (g, members) in groups.iter().enumerate() {
        for &i in members {
            rank[i] = g;
        }
    }
    // Bubble the Schur form into contiguous clusters.
    let mut key: Vec<usize> = rank.clone();
    loop {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1) {
            if key[k] > key[k + 1] {
                swap_adjacent(&mut t, &mut q, k);
                key.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    let mut ranges = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || key[k] != key[start] {
            ranges.push(start..k);
            start = k;
        }
    }
    // Decouple clusters: W⁻¹ L W block diagonal.
    let mut w = q;
    for r in &ranges {
        let rest = r.end..n;
        if rest.is_empty() {
            continue;
        }
        let t11 = t.view((r.start, r.start), (r.len(), r.len())).into_owned();
        let t22 = t.view((r.end, r.end), (rest.len(), rest.len())).into_owned();
        let c = -t.view((r.start, r.end), (r.len(), rest.len())).into_owned();
        let mut x = CMat::zeros(r.len(), rest.len());
        for j in 0..rest.len() {
            let mut rhs: DVector<Complex64> = c.column(j).into_owned();
            for l in 0..j {
                rhs += x.column(l) * t22[(l, j)];
            }
            let shifted = &t11 - CMat::identity(r.len(), r.len()) * t22[(j, j)];
            let col = shifted
                .solve_upper_triangular(&rhs)
                .ok_or_else(|| Error::NumericalBreakdown("singular Sylvester system".into()))?;
            x.set_column(j, &col);
        }
        let t_top = t.view((r.start, r.end), (r.len(), rest.len())).into_owned() + &t11 * &x - &x * &t22;
        t.view_mut((r.start, r.end), (r.len(), rest.len())).copy_from(&t_top);
        let update = w.columns(r.start, r.len()) * &x;
        let mut tail = w.columns_mut(r.end, rest.len());
        tail += update;
    }

    let scale = eigs.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let mut blocks: Vec<RawBlock> = Vec::new();
    let mut used = vec![false; ranges.len()];
    for (ci, r) in ranges.iter().enumerate() {
        if used[ci] {
            continue;
        }
        used[ci] = true;
        let m = r.len();
        let centroid = (r.start..r.end).map(|i| t[(i, i)]).sum::<Complex64>() / m as f64;
        let basis = w.columns(r.start, m).into_owned();
        let orth = basis.qr().q();
        let real_cluster = centroid.im.abs() <= CLUSTER_TOL * scale;
        match field {
            Field::Complex => {
                let restricted: Vec<CMat> = gens.iter().map(|a| orth.adjoint() * a * &orth).collect();
                let u = triangularize(&restricted);
                let z = &orth * u;
                let columns: Vec<DVector<Complex64>> = (0..m).rev().map(|k| z.column(k).into_owned()).collect();
                let signature = signature_of(gens, &columns[0]);
                blocks.push(RawBlock { kind: BlockKind::T, columns, size: m, signature });
            }
            Field::Real if real_cluster => {
                let mut stacked = DMatrix::<f64>::zeros(n, 2 * m);
                for k in 0..m {
                    for i in 0..n {
                        stacked[(i, k)] = orth[(i, k)].re;
                        stacked[(i, m + k)] = orth[(i, k)].im;
                    }
                }
                let svd = stacked.svd(true, false);
                let uu = svd.u.expect("left singular vectors");
                let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
                order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
                if order.len() > m && svd.singular_values[order[m]] > 1e-6 * svd.singular_values[order[0]] {
                    return Err(Error::NumericalBreakdown("real eigenspace is not conjugation invariant".into()));
                }
                let mut vr = DMatrix::<f64>::zeros(n, m);
                for (k, &o) in order.iter().take(m).enumerate() {
                    vr.set_column(k, &uu.column(o));
                }
                let restricted: Vec<DMatrix<f64>> = gens.iter().map(|a| vr.transpose() * to_real(a) * &vr).collect();
                let u = triangularize(&restricted);
                let z = to_complex(&(&vr * u));
                let columns: Vec<DVector<Complex64>> = (0..m).rev().map(|k| z.column(k).into_owned()).collect();
                let signature = signature_of(gens, &columns[0]);
                blocks.push(RawBlock { kind: BlockKind::T, columns, size: m, signature });
            }
            Field::Real => {
                let partner = (0..ranges.len()).find(|&cj| {
                    !used[cj] && ranges[cj].len() == m && {
                        let c2 = (ranges[cj].start..ranges[cj].end).map(|i| t[(i, i)]).sum::<Complex64>() / m as f64;
                        (c2 - centroid.conj()).norm() <= 1e3 * CLUSTER_TOL * scale
                    }
                });
                let Some(cj) = partner else {
                    return Err(Error::NumericalBreakdown("non-real eigenvalue without conjugate partner".into()));
                };
                used[cj] = true;
                let (orth, m) = if centroid.im < 0.0 {
                    (orth, m)
                } else {
                    let r2 = &ranges[cj];
                    (w.columns(r2.start, r2.len()).into_owned().qr().q(), r2.len())
                };
                let restricted: Vec<CMat> = gens.iter().map(|a| orth.adjoint() * a * &orth).collect();
                let u = triangularize(&restricted);
                let z = &orth * u;
                let mut columns = Vec::with_capacity(2 * m);
                for k in (0..m).rev() {
                    let col = z.column(k);
                    let scale_k = col.norm();
                    columns.push(col.map(|c| Complex64::new(c.re / scale_k, 0.0)));
                    columns.push(col.map(|c| Complex64::new(c.im / scale_k, 0.0)));
                }
                let lead = z.column(m - 1).into_owned();
                let signature = signature_of(gens, &lead).into_iter().map(|s| s.conj()).collect();
                blocks.push(RawBlock { kind: BlockKind::B, columns, size: m, signature });
            }
        }
    }
    blocks.sort_by(|a, b| {
        let kind_rank = |k: BlockKind| if k == BlockKind::T { 0 } else { 1 };
        kind_rank(a.kind)
            .cmp(&kind_rank(b.kind))
            .then(b.size.cmp(&a.size))
            .then_with(|| cmp_signature(&a.signature, &b.signature))
    });
    let mut p = CMat::zeros(n, n);
    let mut col = 0;
    for b in &blocks {
        for c in &b.columns {
            p.set_column(col, c);
            col += 1;
        }
    }
    if field == Field::Real {
        p = p.map(|z| Complex64::new(z.re, 0.0));
    }
    let t_parts = blocks.iter().filter(|b| b.kind == BlockKind::T).map(|b| b.size).collect();
    let b_parts = blocks.iter().filter(|b| b.kind == BlockKind::B).map(|b| b.size).collect();
    let eta = match field {
        Field::Complex => Partition::complex(t_parts)?,
        Field::Real => Partition::real(t_parts, b_parts)?,
    };
    Ok(Decomposition { p, eta })
}
