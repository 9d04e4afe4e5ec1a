use num_rational::BigRational;
use rayon::prelude::*;

use super::{IrrationalBasis, PointSample};
use crate::density::Window;
use crate::error::{Error, Result};
use crate::linalg::{ExactVector, Field, Surd, Vector};

/// `[s₁, …, sₙ]ᵀ + s·α` in floating point.
pub fn a_alpha_point(alpha: &[f64], s: i64, s_i: &[i64]) -> Vec<f64> {
    alpha.iter().zip(s_i).map(|(a, &si)| si as f64 + s as f64 * a).collect()
}

/// `[m₁ + im₁′, …]ᵀ + s·[α₁ + iβ₁, …]ᵀ`, interleaved.
pub fn a_alpha_beta_point(alpha: &[f64], beta: &[f64], s: i64, m: &[i64], m_im: &[i64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * alpha.len());
    for j in 0..alpha.len() {
        out.push(m[j] as f64 + s as f64 * alpha[j]);
        out.push(m_im[j] as f64 + s as f64 * beta[j]);
    }
    out
}

/// Integer range of `t` with `lo ≤ t + shift ≤ hi` and `0 ≤ t ≤ bound`, padded by one for rounding.
fn index_range(lo: f64, hi: f64, shift: f64, bound: i64) -> Option<(i64, i64)> {
    let a = ((lo - shift).floor() as i64 - 1).max(0);
    let b = ((hi - shift).ceil() as i64 + 1).min(bound);
    (a <= b).then_some((a, b))
}

fn for_each_index(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.is_empty() {
        f(&[]);
        return;
    }
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&idx);
        let mut j = ranges.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            if idx[j] < ranges[j].1 {
                idx[j] += 1;
                for (k, r) in ranges.iter().enumerate().skip(j + 1) {
                    idx[k] = r.0;
                }
                break;
            }
        }
    }
}

/// Every `[s₁, …, sₙ]ᵀ + s·α` with `0 ≤ s, sᵢ ≤ S` inside the closed window.
///
/// Metadata columns are `s, s1, …, sn`; points are ordered by `(s, s₁, …, sₙ)`.
pub fn sample_a_alpha(alpha: &IrrationalBasis, bound: u64, window: &Window) -> Result<PointSample> {
    let n = alpha.n();
    if window.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: window.dim() });
    }
    let bound = bound as i64;
    let a = alpha.values();
    let labels: Vec<String> = std::iter::once("s".to_string()).chain((1..=n).map(|i| format!("s{i}"))).collect();
    let shards: Vec<PointSample> = (0..=bound)
        .into_par_iter()
        .map(|s| {
            let mut shard = PointSample::new(Field::Real, n, labels.clone());
            let ranges: Option<Vec<(i64, i64)>> = window
                .bounds()
                .iter()
                .zip(a)
                .map(|(&(lo, hi), &aj)| index_range(lo, hi, s as f64 * aj, bound))
                .collect();
            if let Some(ranges) = ranges {
                let mut meta = vec![s; n + 1];
                for_each_index(&ranges, |si| {
                    let p = a_alpha_point(a, s, si);
                    if window.contains(&p) {
                        meta[1..].copy_from_slice(si);
                        shard.push(&p, &meta);
                    }
                });
            }
            shard
        })
        .collect();
    let mut out = PointSample::new(Field::Real, n, labels);
    if !alpha.is_verified() {
        out.flag("independence unverified");
    }
    for s in &shards {
        out.extend(s)?;
    }
    Ok(out)
}

fn exact_in_window(x: &[Surd], window: &Window) -> bool {
    x.iter().zip(window.bounds()).all(|(v, &(lo, hi))| {
        let lo = Surd::from_rational(BigRational::from_float(lo).expect("finite bound"));
        let hi = Surd::from_rational(BigRational::from_float(hi).expect("finite bound"));
        (v - &lo).signum() >= 0 && (&hi - v).signum() >= 0
    })
}

/// Exact-mode [`sample_a_alpha`]: coordinates as surds, window test decided exactly.
pub fn sample_a_alpha_exact(alpha: &IrrationalBasis, bound: u64, window: &Window) -> Result<Vec<(Vec<i64>, ExactVector)>> {
    let exact = alpha
        .exact()
        .ok_or_else(|| Error::InvalidInput("exact mode needs surd-certified irrationals".into()))?;
    let n = alpha.n();
    if window.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: window.dim() });
    }
    let bound = bound as i64;
    let a = alpha.values();
    let mut out = Vec::new();
    for s in 0..=bound {
        let ranges: Option<Vec<(i64, i64)>> = window
            .bounds()
            .iter()
            .zip(a)
            .map(|(&(lo, hi), &aj)| index_range(lo, hi, s as f64 * aj, bound))
            .collect();
        let Some(ranges) = ranges else { continue };
        let ss = Surd::from_int(s);
        for_each_index(&ranges, |si| {
            let x: Vec<Surd> = si.iter().zip(&exact).map(|(&t, aj)| &Surd::from_int(t) + &(&ss * aj)).collect();
            if exact_in_window(&x, window) {
                let mut meta = vec![s];
                meta.extend_from_slice(si);
                out.push((meta, ExactVector(x)));
            }
        });
    }
    Ok(out)
}

/// Points of `ℕⁿ + iℕⁿ + ℕ[α₁ + iβ₁, …]ᵀ` with every index `≤ S` in the window
/// (over interleaved coordinates). Metadata columns are `s, m1, m1i, …`.
pub fn sample_a_alpha_beta(alpha: &IrrationalBasis, beta: &IrrationalBasis, bound: u64, window: &Window) -> Result<PointSample> {
    let n = alpha.n();
    if beta.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: beta.n() });
    }
    if window.dim() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, got: window.dim() });
    }
    let certified = IrrationalBasis::interleave(alpha, beta)?;
    let bound = bound as i64;
    let (a, b) = (alpha.values(), beta.values());
    let labels: Vec<String> = std::iter::once("s".to_string())
        .chain((1..=n).flat_map(|i| [format!("m{i}"), format!("m{i}i")]))
        .collect();
    let shards: Vec<PointSample> = (0..=bound)
        .into_par_iter()
        .map(|s| {
            let mut shard = PointSample::new(Field::Complex, 2 * n, labels.clone());
            let mut ranges = Vec::with_capacity(2 * n);
            for j in 0..n {
                let (lo, hi) = window.bounds()[2 * j];
                let Some(r) = index_range(lo, hi, s as f64 * a[j], bound) else { return shard };
                ranges.push(r);
                let (lo, hi) = window.bounds()[2 * j + 1];
                let Some(r) = index_range(lo, hi, s as f64 * b[j], bound) else { return shard };
                ranges.push(r);
            }
            let mut meta = vec![s; 2 * n + 1];
            let mut m = vec![0; n];
            let mut m_im = vec![0; n];
            for_each_index(&ranges, |idx| {
                for j in 0..n {
                    m[j] = idx[2 * j];
                    m_im[j] = idx[2 * j + 1];
                }
                let p = a_alpha_beta_point(a, b, s, &m, &m_im);
                if window.contains(&p) {
                    meta[1..].copy_from_slice(idx);
                    shard.push(&p, &meta);
                }
            });
            shard
        })
        .collect();
    let mut out = PointSample::new(Field::Complex, 2 * n, labels);
    if !certified.is_verified() {
        out.flag("independence unverified");
    }
    for s in &shards {
        out.extend(s)?;
    }
    Ok(out)
}

/// `Σ kᵢ uᵢ`, accumulated in generator order.
pub fn z_module_point(generators: &[Vector], k: &[i64]) -> Vec<f64> {
    let mut out = vec![0.0; generators[0].real_dim()];
    for (u, &ki) in generators.iter().zip(k) {
        for (o, x) in out.iter_mut().zip(u.coords()) {
            *o += ki as f64 * x;
        }
    }
    out
}

/// All `Σ kᵢ uᵢ` with `|kᵢ| ≤ bound` inside the window; metadata `k1, …, km`.
///
/// More generators than dimensions is allowed but flagged.
pub fn sample_z_module(generators: &[Vector], bound: u64, window: &Window) -> Result<PointSample> {
    let first = generators.first().ok_or_else(|| Error::InvalidInput("no generators".into()))?;
    let n = first.real_dim();
    if generators.iter().any(|g| g.real_dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: 0 });
    }
    if window.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: window.dim() });
    }
    let m = generators.len();
    let b = bound as i64;
    let labels: Vec<String> = (1..=m).map(|i| format!("k{i}")).collect();
    let shards: Vec<PointSample> = (-b..=b)
        .into_par_iter()
        .map(|k1| {
            let mut shard = PointSample::new(Field::Real, n, labels.clone());
            let rest = vec![(-b, b); m - 1];
            let mut k = vec![k1; m];
            for_each_index(&rest, |tail| {
                k[1..].copy_from_slice(tail);
                let p = z_module_point(generators, &k);
                if window.contains(&p) {
                    shard.push(&p, &k);
                }
            });
            shard
        })
        .collect();
    let mut out = PointSample::new(Field::Real, n, labels);
    if m > n {
        out.flag("more generators than dimensions");
    }
    for s in &shards {
        out.extend(s)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::make_alpha;

    #[test]
    fn one_dimensional_oracle() {
        let a = make_alpha(1, &[2]).unwrap();
        let w = Window::cube(1, 0.0, 1.0).unwrap();
        let mut xs: Vec<f64> = sample_a_alpha(&a, 3, &w).unwrap().iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        let expected = [0.0, 0.1715728752538097, 0.5857864376269049, 1.0];
        assert_eq!(xs.len(), expected.len());
        for (x, e) in xs.iter().zip(expected) {
            assert!((x - e).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_bound_gives_integer_points() {
        let a = make_alpha(2, &[2, 3]).unwrap();
        let w = Window::cube(2, -0.5, 1.5).unwrap();
        let s = sample_a_alpha(&a, 0, &w).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.point(0), &[0.0, 0.0]);
        let s = sample_a_alpha_beta(&a, &make_alpha(2, &[5, 7]).unwrap(), 0, &Window::cube(4, 0.0, 0.5).unwrap()).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn square_oracle_count() {
        let a = make_alpha(2, &[2, 3]).unwrap();
        let w = Window::cube(2, 0.0, 1.0).unwrap();
        assert_eq!(sample_a_alpha(&a, 200, &w).unwrap().len(), 119);
    }

    #[test]
    fn exact_and_float_agree() {
        let a = make_alpha(2, &[2, 3]).unwrap();
        let w = Window::cube(2, 0.0, 1.0).unwrap();
        let f = sample_a_alpha(&a, 60, &w).unwrap();
        let e = sample_a_alpha_exact(&a, 60, &w).unwrap();
        assert_eq!(f.len(), e.len());
        for (i, (meta, x)) in e.iter().enumerate() {
            assert_eq!(f.meta(i), meta.as_slice());
            assert!(x.to_vector().sub(&f.vector(i)).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn disc_oracle_count() {
        let a = make_alpha(1, &[2]).unwrap();
        let b = make_alpha(1, &[3]).unwrap();
        let mut s = sample_a_alpha_beta(&a, &b, 50, &Window::cube(2, -1.0, 1.0).unwrap()).unwrap();
        assert_eq!(s.len(), 118);
        s.retain(|p, _| p[0] * p[0] + p[1] * p[1] <= 1.0);
        assert_eq!(s.len(), 96);
    }

    #[test]
    fn z_module_axis() {
        let s = sample_z_module(&[Vector::real(vec![1.0, 0.0])], 3, &Window::cube(2, -10.0, 10.0).unwrap()).unwrap();
        let xs: Vec<Vec<f64>> = s.iter().map(|p| p.to_vec()).collect();
        let expected: Vec<Vec<f64>> = (-3..=3).map(|k| vec![k as f64, 0.0]).collect();
        assert_eq!(xs, expected);
    }

    #[test]
    fn z_module_second_coordinates_are_multiples_of_sqrt3() {
        let g = [Vector::real(vec![1.0, 0.0]), Vector::real(vec![2f64.sqrt(), 3f64.sqrt()])];
        let s = sample_z_module(&g, 20, &Window::cube(2, -5.0, 5.0).unwrap()).unwrap();
        for i in 0..s.len() {
            let y = s.point(i)[1];
            assert_eq!(y, s.meta(i)[1] as f64 * 3f64.sqrt());
        }
    }
}
