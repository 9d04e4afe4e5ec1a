//! ε-grid covering of boxes and graded density verdicts.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::PointSample;
use crate::error::{Error, Result};
use crate::linalg::Subspace;

/// Hit sets with at most this many cells are stored as a dense bitmap.
pub const DENSE_BITMAP_LIMIT: u128 = 1 << 24;

/// Axis-aligned box `[lo₁, hi₁] × … × [lo_d, hi_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    bounds: Vec<(f64, f64)>,
}

impl Window {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidInput("window needs at least one axis".into()));
        }
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidInput(format!("window axis [{lo}, {hi}] needs lo < hi")));
            }
        }
        Ok(Self { bounds })
    }

    /// Same interval on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi); dim])
    }

    /// The box spanned by the listed axes, in that order.
    pub fn restrict(&self, axes: &[usize]) -> Result<Window> {
        let mut b = Vec::with_capacity(axes.len());
        for &a in axes {
            b.push(*self.bounds.get(a).ok_or(Error::DimensionMismatch { expected: self.dim(), got: a + 1 })?);
        }
        Window::new(b)
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Closed-box membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.bounds.len() && x.iter().zip(&self.bounds).all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Largest Euclidean norm of a point in the box.
    pub fn reach(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| lo.abs().max(hi.abs()).powi(2)).sum::<f64>().sqrt()
    }

    /// Smallest Euclidean norm of a point in the box.
    pub fn floor_norm(&self) -> f64 {
        self.bounds
            .iter()
            .map(|&(lo, hi)| if lo <= 0.0 && hi >= 0.0 { 0.0 } else { lo.abs().min(hi.abs()).powi(2) })
            .sum::<f64>()
            .sqrt()
    }

    pub fn diameter(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| (hi - lo).powi(2)).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum HitSet {
    Dense { bits: Vec<u64>, count: u64 },
    Sparse(HashSet<u128>),
}

impl HitSet {
    fn for_total(total: u128) -> Self {
        if total <= DENSE_BITMAP_LIMIT {
            HitSet::Dense { bits: vec![0; (total as usize).div_ceil(64)], count: 0 }
        } else {
            HitSet::Sparse(HashSet::new())
        }
    }

    fn insert(&mut self, idx: u128) -> bool {
        match self {
            HitSet::Dense { bits, count } => {
                let (w, b) = ((idx / 64) as usize, idx % 64);
                let mask = 1u64 << b;
                if bits[w] & mask == 0 {
                    bits[w] |= mask;
                    *count += 1;
                    true
                } else {
                    false
                }
            }
            HitSet::Sparse(set) => set.insert(idx),
        }
    }

    fn contains(&self, idx: u128) -> bool {
        match self {
            HitSet::Dense { bits, .. } => bits[(idx / 64) as usize] & (1u64 << (idx % 64)) != 0,
            HitSet::Sparse(set) => set.contains(&idx),
        }
    }

    fn len(&self) -> u64 {
        match self {
            HitSet::Dense { count, .. } => *count,
            HitSet::Sparse(set) => set.len() as u64,
        }
    }

    fn indices(&self) -> Vec<u128> {
        match self {
            HitSet::Dense { bits, .. } => {
                let mut out = Vec::new();
                for (w, &word) in bits.iter().enumerate() {
                    let mut x = word;
                    while x != 0 {
                        let b = x.trailing_zeros() as u128;
                        out.push(w as u128 * 64 + b);
                        x &= x - 1;
                    }
                }
                out
            }
            HitSet::Sparse(set) => {
                let mut out: Vec<u128> = set.iter().copied().collect();
                out.sort_unstable();
                out
            }
        }
    }

    fn union_with(&mut self, other: &HitSet) {
        match (self, other) {
            (HitSet::Dense { bits, count }, HitSet::Dense { bits: ob, .. }) => {
                let mut c = 0u64;
                for (a, b) in bits.iter_mut().zip(ob) {
                    *a |= *b;
                    c += a.count_ones() as u64;
                }
                *count = c;
            }
            (HitSet::Sparse(a), HitSet::Sparse(b)) => a.extend(b.iter().copied()),
            (s, o) => {
                for idx in o.indices() {
                    s.insert(idx);
                }
            }
        }
    }
}

/// Set of ε-cells of a window hit by a point sample.
///
/// Cells are half open, `[lo + kε, lo + (k+1)ε)`, with index `floor((x − lo)/ε)`
/// per axis; a trailing partial cell is kept and points exactly at `hi` are excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCover {
    window: Window,
    eps: f64,
    cells: Vec<u64>,
    total: u128,
    hits: HitSet,
}

impl GridCover {
    pub fn new(window: &Window, eps: f64) -> Result<Self> {
        let min_len = window.bounds.iter().map(|(lo, hi)| hi - lo).fold(f64::INFINITY, f64::min);
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("cell size {eps} must be positive")));
        }
        if eps > min_len {
            return Err(Error::InvalidInput(format!("cell size {eps} exceeds shortest window axis {min_len}")));
        }
        let cells: Vec<u64> = window
            .bounds
            .iter()
            .map(|(lo, hi)| (((hi - lo) / eps) - 1e-9).ceil().max(1.0) as u64)
            .collect();
        let total = cells
            .iter()
            .try_fold(1u128, |acc, &c| acc.checked_mul(c as u128))
            .ok_or_else(|| Error::InvalidInput("grid has too many cells".into()))?;
        Ok(Self { window: window.clone(), eps, cells, hits: HitSet::for_total(total), total })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn cells_per_axis(&self) -> &[u64] {
        &self.cells
    }

    pub fn total_cells(&self) -> u128 {
        self.total
    }

    pub fn hit_count(&self) -> u64 {
        self.hits.len()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.hits, HitSet::Sparse(_))
    }

    pub fn coverage(&self) -> f64 {
        self.hits.len() as f64 / self.total as f64
    }

    /// Linear index of the cell containing `x`, or `None` outside `[lo, hi)`.
    pub fn cell_of(&self, x: &[f64]) -> Option<u128> {
        if x.len() != self.cells.len() {
            return None;
        }
        let mut idx = 0u128;
        for ((v, (lo, hi)), &n) in x.iter().zip(&self.window.bounds).zip(&self.cells) {
            if !(*v >= *lo && *v < *hi) {
                return None;
            }
            let k = (((v - lo) / self.eps).floor() as u64).min(n - 1);
            idx = idx * n as u128 + k as u128;
        }
        Some(idx)
    }

    /// Per-axis indices of a linear cell index.
    pub fn unravel(&self, mut idx: u128) -> Vec<u64> {
        let mut out = vec![0; self.cells.len()];
        for (slot, &n) in out.iter_mut().zip(&self.cells).rev() {
            *slot = (idx % n as u128) as u64;
            idx /= n as u128;
        }
        out
    }

    pub fn contains_cell(&self, idx: u128) -> bool {
        idx < self.total && self.hits.contains(idx)
    }

    /// Marks the cell of `x`; returns true when the cell was new.
    pub fn insert(&mut self, x: &[f64]) -> bool {
        match self.cell_of(x) {
            Some(idx) => self.hits.insert(idx),
            None => false,
        }
    }

    pub fn insert_all<'a>(&mut self, points: impl IntoIterator<Item = &'a [f64]>) {
        for p in points {
            self.insert(p);
        }
    }

    pub fn hit_indices(&self) -> Vec<u128> {
        self.hits.indices()
    }

    /// Lebesgue measure of the union of hit cells (cells clipped to the window).
    pub fn cell_measure(&self) -> f64 {
        self.hits
            .indices()
            .into_iter()
            .map(|idx| {
                self.unravel(idx)
                    .iter()
                    .zip(&self.window.bounds)
                    .map(|(&k, (lo, hi))| {
                        let start = lo + k as f64 * self.eps;
                        (hi - start).min(self.eps)
                    })
                    .product::<f64>()
            })
            .sum()
    }

    pub fn compatible(&self, other: &GridCover) -> bool {
        self.window == other.window && self.eps == other.eps
    }

    /// Unions `other` into `self`.
    pub fn absorb(&mut self, other: &GridCover) -> Result<()> {
        if !self.compatible(other) {
            return Err(Error::IncompatibleGrids);
        }
        self.hits.union_with(&other.hits);
        Ok(())
    }

    /// Cover of a product set: each factor covers the window restricted to its axes.
    ///
    /// A cell is hit exactly when every factor hits its projection, so the hit set is
    /// the cartesian product of the factor hit sets.
    pub fn product(window: &Window, eps: f64, factors: &[(Vec<usize>, GridCover)]) -> Result<Self> {
        let mut out = Self::new(window, eps)?;
        let mut seen = vec![false; window.dim()];
        for (axes, f) in factors {
            if f.eps != eps || f.window != window.restrict(axes)? {
                return Err(Error::IncompatibleGrids);
            }
            for &a in axes {
                if std::mem::replace(&mut seen[a], true) {
                    return Err(Error::InvalidInput(format!("axis {a} appears in two factors")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput("factors do not cover every axis".into()));
        }
        let lists: Vec<Vec<Vec<u64>>> =
            factors.iter().map(|(_, f)| f.hit_indices().into_iter().map(|i| f.unravel(i)).collect()).collect();
        if lists.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        let mut cell = vec![0u64; window.dim()];
        let mut pos = vec![0usize; lists.len()];
        loop {
            for ((axes, _), (list, &p)) in factors.iter().zip(lists.iter().zip(&pos)) {
                for (&a, &k) in axes.iter().zip(&list[p]) {
                    cell[a] = k;
                }
            }
            let idx = cell.iter().zip(&out.cells).fold(0u128, |acc, (&k, &n)| acc * n as u128 + k as u128);
            out.hits.insert(idx);
            let mut j = lists.len();
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                pos[j] += 1;
                if pos[j] < lists[j].len() {
                    break;
                }
                pos[j] = 0;
            }
        }
    }

    /// Seals per-worker shards into one cover.
    pub fn from_shards(window: &Window, eps: f64, shards: Vec<GridCover>) -> Result<Self> {
        let mut out = Self::new(window, eps)?;
        for s in &shards {
            out.absorb(s)?;
        }
        Ok(out)
    }
}

/// Union of two covers over the same grid.
pub fn merge(a: &GridCover, b: &GridCover) -> Result<GridCover> {
    let mut out = a.clone();
    out.absorb(b)?;
    Ok(out)
}

/// Covers the sample's in-window points.
pub fn coverage(points: &PointSample, window: &Window, eps: f64) -> Result<GridCover> {
    if points.real_dim() != window.dim() && !points.is_empty() {
        return Err(Error::DimensionMismatch { expected: window.dim(), got: points.real_dim() });
    }
    let mut cover = GridCover::new(window, eps)?;
    cover.insert_all(points.iter());
    Ok(cover)
}

/// Parallel cover of raw coordinate rows, merged from per-thread shards.
pub fn coverage_par(points: &[Vec<f64>], window: &Window, eps: f64) -> Result<GridCover> {
    let empty = GridCover::new(window, eps)?;
    let shards: Vec<GridCover> = points
        .par_chunks(4096)
        .map(|chunk| {
            let mut g = empty.clone();
            g.insert_all(chunk.iter().map(Vec::as_slice));
            g
        })
        .collect();
    GridCover::from_shards(window, eps, shards)
}

/// Covers the points in the orthonormal coordinate system of `m`.
pub fn coverage_in_subspace(points: &PointSample, m: &Subspace, window: &Window, eps: f64) -> Result<GridCover> {
    if window.dim() != m.real_dim() {
        return Err(Error::DimensionMismatch { expected: m.real_dim(), got: window.dim() });
    }
    let mut cover = GridCover::new(window, eps)?;
    for v in points.vectors() {
        let c = m.coordinates(&v)?;
        cover.insert(&c);
    }
    Ok(cover)
}

/// Graded outcome of a density experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    DenseEvidence,
    NotDenseEvidence,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::DenseEvidence => "DenseEvidence",
            Verdict::NotDenseEvidence => "NotDenseEvidence",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "DenseEvidence" => Ok(Verdict::DenseEvidence),
            "NotDenseEvidence" => Ok(Verdict::NotDenseEvidence),
            "Inconclusive" => Ok(Verdict::Inconclusive),
            other => Err(Error::Parse(format!("unknown verdict {other:?}"))),
        }
    }
}

/// Verdict thresholds; the defaults are 0.9, 0.5 and 0.01.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub dense: f64,
    pub not_dense: f64,
    pub plateau: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { dense: 0.9, not_dense: 0.5, plateau: 0.01 }
    }
}

impl Thresholds {
    /// Dense at `≥ dense`; not dense when the last step moved `< plateau` and sits `< not_dense`.
    pub fn verdict(&self, trend: &[f64]) -> Verdict {
        let Some(&last) = trend.last() else {
            return Verdict::Inconclusive;
        };
        if last >= self.dense {
            return Verdict::DenseEvidence;
        }
        if trend.len() >= 2 {
            let prev = trend[trend.len() - 2];
            if (last - prev).abs() < self.plateau && last < self.not_dense {
                return Verdict::NotDenseEvidence;
            }
        }
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub coverage: f64,
    pub epsilon: f64,
    pub schedule: Vec<u64>,
    pub trend: Vec<f64>,
    pub budget: u64,
    pub points: Vec<u64>,
    pub cells_hit: u64,
    pub cells_total: u128,
    pub thresholds: Thresholds,
    pub verdict: Verdict,
}

/// Runs `cover_at` along the budget schedule and grades the coverage sequence.
pub fn density_trend<F>(mut cover_at: F, schedule: &[u64], thresholds: Thresholds) -> Result<CoverageReport>
where
    F: FnMut(u64) -> Result<(GridCover, u64)>,
{
    if schedule.len() < 3 {
        return Err(Error::InvalidInput("budget schedule needs at least 3 entries".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("budget schedule must be strictly increasing".into()));
    }
    let mut trend = Vec::with_capacity(schedule.len());
    let mut points = Vec::with_capacity(schedule.len());
    let mut last = None;
    for &b in schedule {
        let (cover, n) = cover_at(b)?;
        trend.push(cover.coverage());
        points.push(n);
        last = Some(cover);
    }
    let last = last.expect("nonempty schedule");
    Ok(CoverageReport {
        coverage: last.coverage(),
        epsilon: last.epsilon(),
        schedule: schedule.to_vec(),
        trend: trend.clone(),
        budget: *schedule.last().unwrap(),
        points,
        cells_hit: last.hit_count(),
        cells_total: last.total_cells(),
        thresholds,
        verdict: thresholds.verdict(&trend),
    })
}

/// [`density_trend`] for a sampler producing point samples in window coordinates.
pub fn sample_trend<F>(mut sampler: F, window: &Window, eps: f64, schedule: &[u64], thresholds: Thresholds) -> Result<CoverageReport>
where
    F: FnMut(u64) -> Result<PointSample>,
{
    density_trend(
        |b| {
            let s = sampler(b)?;
            Ok((coverage(&s, window, eps)?, s.len() as u64))
        },
        schedule,
        thresholds,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Window {
        Window::cube(2, 0.0, 1.0).unwrap()
    }

    #[test]
    fn empty_cover_is_zero() {
        let g = GridCover::new(&unit_square(), 0.1).unwrap();
        assert_eq!(g.total_cells(), 100);
        assert_eq!(g.coverage(), 0.0);
    }

    #[test]
    fn cell_centres_cover_everything() {
        let mut g = GridCover::new(&unit_square(), 0.1).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                g.insert(&[0.05 + 0.1 * i as f64, 0.05 + 0.1 * j as f64]);
            }
        }
        assert_eq!(g.coverage(), 1.0);
    }

    #[test]
    fn right_edge_is_excluded() {
        let mut g = GridCover::new(&Window::cube(1, 0.0, 1.0).unwrap(), 0.1).unwrap();
        assert!(!g.insert(&[1.0]));
        assert!(g.insert(&[0.0]));
        assert!(g.insert(&[0.9999999]));
        assert_eq!(g.hit_count(), 2);
    }

    #[test]
    fn sparse_storage_above_limit() {
        let w = Window::cube(4, 0.0, 1.0).unwrap();
        let g = GridCover::new(&w, 0.01).unwrap();
        assert!(g.is_sparse());
        assert!(!GridCover::new(&unit_square(), 0.01).unwrap().is_sparse());
    }

    #[test]
    fn merge_rejects_other_grids() {
        let a = GridCover::new(&unit_square(), 0.1).unwrap();
        let b = GridCover::new(&unit_square(), 0.2).unwrap();
        assert_eq!(merge(&a, &b), Err(Error::IncompatibleGrids));
    }

    #[test]
    fn verdict_rules() {
        let t = Thresholds::default();
        assert_eq!(t.verdict(&[0.5, 0.8, 0.95]), Verdict::DenseEvidence);
        assert_eq!(t.verdict(&[0.07, 0.075, 0.075]), Verdict::NotDenseEvidence);
        assert_eq!(t.verdict(&[0.3, 0.5, 0.81]), Verdict::Inconclusive);
        assert_eq!(t.verdict(&[0.6, 0.6, 0.6]), Verdict::Inconclusive);
    }

    #[test]
    fn constant_sampler_plateaus() {
        let w = unit_square();
        let r = density_trend(
            |_| {
                let mut g = GridCover::new(&w, 0.1)?;
                g.insert(&[0.5, 0.5]);
                Ok((g, 1))
            },
            &[1, 2, 4],
            Thresholds::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::NotDenseEvidence);
        assert_eq!(r.trend, vec![0.01; 3]);
    }
}
