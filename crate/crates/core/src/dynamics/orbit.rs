//! Pruned lexicographic exponent enumeration for abelian semigroups.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MatrixSemigroup;
use crate::constructions::PointSample;
use crate::density::{GridCover, Window};
use crate::error::{Error, Result};
use crate::linalg::{QMatrix, Vector};

/// Float-mode magnitude at which enumeration gives up.
pub const MAX_MAGNITUDE: f64 = 1e300;

/// Slack applied to pruning radii.
const PRUNE_SLACK: f64 = 1e-9;

/// Product covers larger than this many cells are refused.
const MAX_PRODUCT_CELLS: u128 = 1 << 28;

/// Per-generator exponent bounds derived from one budget number `K`.
///
/// Generator `i` gets `ceil(wᵢ·K)`; without weights every bound is `K`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl Budget {
    pub fn uniform() -> Self {
        Self { weights: None }
    }

    pub fn weighted(weights: Vec<f64>) -> Self {
        Self { weights: Some(weights) }
    }

    pub fn bounds(&self, generators: usize, k: u64) -> Result<Vec<u32>> {
        match &self.weights {
            None => Ok(vec![k.min(u32::MAX as u64) as u32; generators]),
            Some(w) => {
                if w.len() != generators {
                    return Err(Error::DimensionMismatch { expected: generators, got: w.len() });
                }
                if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(Error::InvalidInput("budget weights must be finite and nonnegative".into()));
                }
                Ok(w.iter().map(|x| (x * k as f64).ceil().min(u32::MAX as f64) as u32).collect())
            }
        }
    }
}

/// A norm constraint on a union of coordinate blocks: `floor ≤ ‖x_blocks‖ ≤ reach`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reach {
    pub blocks: Vec<usize>,
    pub floor: f64,
    pub reach: f64,
}

#[derive(Debug, Clone)]
struct SparseOp {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseOp {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(i, j, a) in &self.entries {
            out[i] += a * x[j];
        }
    }
}

#[derive(Debug, Clone)]
struct Factor {
    blocks: Vec<usize>,
    gens: Vec<usize>,
}

/// Orbit enumerator over realified generators.
///
/// Coordinates are split into blocks (connected components of the joint sparsity
/// pattern). Generators that act as the identity are dropped, and so are the
/// generators of a group of blocks on which the start vector vanishes. The remaining
/// groups of blocks with disjoint generator sets are enumerated independently when a
/// cover over a box is requested.
#[derive(Debug, Clone)]
pub struct OrbitEngine {
    d: usize,
    total: usize,
    ops: Vec<SparseOp>,
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    /// `(σ_min, σ_max)` of each generator on each block.
    sigma: Vec<Vec<(f64, f64)>>,
    factors: Vec<Factor>,
    constant: Vec<usize>,
    start: Vec<f64>,
}

impl OrbitEngine {
    /// `snap` is relative: entries below `snap·max|A|` count as zero and blocks within
    /// that distance of the identity count as fixed. Use `0` for exact patterns.
    pub fn new(generators: &[DMatrix<f64>], start: &[f64], snap: f64) -> Result<Self> {
        let d = start.len();
        if start.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("start vector must be finite".into()));
        }
        let mut mats = Vec::with_capacity(generators.len());
        for a in generators {
            if a.nrows() != d || a.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: a.nrows() });
            }
            let scale = a.amax();
            let cut = snap * scale;
            mats.push(a.map(|x| if x.abs() <= cut { 0.0 } else { x }));
        }
        let mut parent: Vec<usize> = (0..d).collect();
        for a in &mats {
            for i in 0..d {
                for j in 0..d {
                    if a[(i, j)] != 0.0 && i != j {
                        union(&mut parent, i, j);
                    }
                }
            }
        }
        let mut block_of = vec![usize::MAX; d];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for c in 0..d {
            let r = find(&mut parent, c);
            let b = match (0..c).find(|&c2| find(&mut parent, c2) == r) {
                Some(c2) => block_of[c2],
                None => {
                    blocks.push(Vec::new());
                    blocks.len() - 1
                }
            };
            block_of[c] = b;
            blocks[b].push(c);
        }
        let nb = blocks.len();
        let mut supports = Vec::with_capacity(mats.len());
        let mut sigma = Vec::with_capacity(mats.len());
        for a in &mats {
            let tol = snap * a.amax().max(1.0);
            let mut support = Vec::new();
            let mut sig = Vec::with_capacity(nb);
            for (b, coords) in blocks.iter().enumerate() {
                let sub = DMatrix::from_fn(coords.len(), coords.len(), |i, j| a[(coords[i], coords[j])]);
                let moved = (0..coords.len())
                    .any(|i| (0..coords.len()).any(|j| (sub[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs() > tol));
                if moved {
                    support.push(b);
                }
                let sv = sub.singular_values();
                sig.push((sv.min(), sv.max()));
            }
            supports.push(support);
            sigma.push(sig);
        }
        let mut bparent: Vec<usize> = (0..nb).collect();
        for s in &supports {
            for w in s.windows(2) {
                union(&mut bparent, w[0], w[1]);
            }
        }
        let mut factors: Vec<Factor> = Vec::new();
        let mut constant = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for b in 0..nb {
            let r = find(&mut bparent, b);
            match roots.iter().position(|&x| x == r) {
                Some(i) => factors[i].blocks.push(b),
                None => {
                    roots.push(r);
                    factors.push(Factor { blocks: vec![b], gens: Vec::new() });
                }
            }
        }
        for (i, s) in supports.iter().enumerate() {
            if let Some(&b) = s.first() {
                let f = factors.iter().position(|f| f.blocks.contains(&b)).expect("block has a factor");
                factors[f].gens.push(i);
            }
        }
        let mut kept = Vec::new();
        for f in factors {
            let vanishes = f.blocks.iter().all(|&b| blocks[b].iter().all(|&c| start[c] == 0.0));
            if f.gens.is_empty() || vanishes {
                constant.extend(f.blocks);
            } else {
                kept.push(f);
            }
        }
        let ops = mats
            .iter()
            .map(|a| {
                let mut entries = Vec::new();
                for i in 0..d {
                    for j in 0..d {
                        if a[(i, j)] != 0.0 {
                            entries.push((i, j, a[(i, j)]));
                        }
                    }
                }
                SparseOp { entries }
            })
            .collect();
        Ok(Self { d, total: generators.len(), ops, block_of, blocks, sigma, factors: kept, constant, start: start.to_vec() })
    }

    /// Engine for an abelian semigroup with exact sparsity patterns.
    pub fn for_semigroup(g: &MatrixSemigroup, v: &Vector) -> Result<Self> {
        g.require_abelian()?;
        if v.field() != g.field() || v.dim() != g.n() {
            return Err(Error::DimensionMismatch { expected: g.n(), got: v.dim() });
        }
        let mats: Vec<DMatrix<f64>> = g.generators().iter().map(|a| a.realified()).collect();
        Self::new(&mats, v.coords(), 0.0)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn generator_count(&self) -> usize {
        self.total
    }

    /// Generators actually enumerated, in lexicographic order.
    pub fn active(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.factors.iter().flat_map(|f| f.gens.iter().copied()).collect();
        a.sort_unstable();
        a
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Per-block constraints implied by a box window.
    pub fn constraints_for(&self, window: &Window) -> Result<Vec<Reach>> {
        if window.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: window.dim() });
        }
        self.blocks
            .iter()
            .enumerate()
            .map(|(b, coords)| {
                let w = window.restrict(coords)?;
                Ok(Reach { blocks: vec![b], floor: w.floor_norm(), reach: w.reach() })
            })
            .collect()
    }

    /// One constraint on the full norm.
    pub fn norm_constraint(&self, floor: f64, reach: f64) -> Reach {
        Reach { blocks: (0..self.blocks.len()).collect(), floor, reach }
    }

    /// Enumerates all active exponent vectors within `bounds` that survive pruning.
    ///
    /// Work is split over the exponent of the first generator; shards come back in
    /// lexicographic order together with the number of enumerated nodes.
    pub fn fold<S, I, V>(&self, bounds: &[u32], constraints: &[Reach], init: I, visit: V) -> Result<(Vec<S>, u64)>
    where
        S: Send,
        I: Fn() -> S + Sync,
        V: Fn(&mut S, &[u32], &[f64]) + Sync,
    {
        let order = self.active();
        self.fold_over(&order, bounds, constraints, init, visit)
    }

    fn fold_over<S, I, V>(
        &self,
        order: &[usize],
        bounds: &[u32],
        constraints: &[Reach],
        init: I,
        visit: V,
    ) -> Result<(Vec<S>, u64)>
    where
        S: Send,
        I: Fn() -> S + Sync,
        V: Fn(&mut S, &[u32], &[f64]) + Sync,
    {
        if bounds.len() != self.total {
            return Err(Error::DimensionMismatch { expected: self.total, got: bounds.len() });
        }
        let ctx = Ctx::new(self, order, bounds, constraints);
        let mut exps = vec![0u32; self.total];
        if order.is_empty() {
            let mut s = init();
            check_magnitude(&self.start)?;
            if !ctx.prune(0, 0, &self.start) {
                visit(&mut s, &exps, &self.start);
            }
            return Ok((vec![s], 1));
        }
        let g0 = order[0];
        let mut prefixes = Vec::new();
        let mut w = self.start.clone();
        let mut tmp = vec![0.0; self.d];
        for k in 0..=bounds[g0] {
            if k > 0 {
                self.ops[g0].apply(&w, &mut tmp);
                std::mem::swap(&mut w, &mut tmp);
            }
            check_magnitude(&w)?;
            if ctx.prune(0, k, &w) {
                break;
            }
            prefixes.push((k, w.clone()));
        }
        let results: Vec<Result<(S, u64)>> = prefixes
            .into_par_iter()
            .map(|(k, w)| {
                let mut s = init();
                let mut e = exps.clone();
                e[g0] = k;
                let mut bufs = vec![vec![0.0; self.d]; order.len() + 1];
                let nodes = if order.len() == 1 {
                    visit(&mut s, &e, &w);
                    1
                } else {
                    ctx.dfs(1, &w, &mut e, &mut bufs, &mut s, &visit)?
                };
                Ok((s, nodes))
            })
            .collect();
        let mut shards = Vec::with_capacity(results.len());
        let mut nodes = 0u64;
        for r in results {
            let (s, n) = r?;
            shards.push(s);
            nodes += n;
        }
        exps.iter_mut().for_each(|e| *e = 0);
        Ok((shards, nodes))
    }

    /// Orbit points inside `window` (all points when `None`), in lexicographic exponent order.
    pub fn sample(&self, field: crate::linalg::Field, bounds: &[u32], window: Option<&Window>) -> Result<PointSample> {
        let labels: Vec<String> = (1..=self.total).map(|i| format!("k{i}")).collect();
        let layout = PointSample::new(field, self.d, labels);
        let constraints = match window {
            Some(w) => self.constraints_for(w)?,
            None => Vec::new(),
        };
        let (shards, _) = self.fold(
            bounds,
            &constraints,
            || layout.clone_layout(),
            |s, e, x| {
                if window.is_none_or(|w| w.contains(x)) {
                    let meta: Vec<i64> = e.iter().map(|&k| k as i64).collect();
                    s.push(x, &meta);
                }
            },
        )?;
        let mut out = layout;
        for s in &shards {
            out.extend(s)?;
        }
        Ok(out)
    }

    /// ε-cover of the orbit in a box, enumerating independent factors separately.
    ///
    /// Returns the cover and the number of in-window orbit points it represents.
    pub fn cover(&self, bounds: &[u32], window: &Window, eps: f64) -> Result<(GridCover, u64)> {
        let constraints = self.constraints_for(window)?;
        if self.factors.len() <= 1 {
            return self.direct_cover(&self.active(), bounds, &constraints, window, eps);
        }
        if GridCover::new(window, eps)?.total_cells() > MAX_PRODUCT_CELLS {
            return self.direct_cover(&self.active(), bounds, &constraints, window, eps);
        }
        let mut parts = Vec::new();
        let mut points = 1u64;
        let mut groups: Vec<(Vec<usize>, Vec<usize>)> =
            self.factors.iter().map(|f| (f.blocks.clone(), f.gens.clone())).collect();
        if !self.constant.is_empty() {
            groups.push((self.constant.clone(), Vec::new()));
        }
        for (blocks, gens) in groups {
            let mut axes: Vec<usize> = blocks.iter().flat_map(|&b| self.blocks[b].iter().copied()).collect();
            axes.sort_unstable();
            let sub = window.restrict(&axes)?;
            let cons: Vec<Reach> = constraints.iter().filter(|c| blocks.contains(&c.blocks[0])).cloned().collect();
            let empty = GridCover::new(&sub, eps)?;
            let (shards, _) = self.fold_over(
                &gens,
                bounds,
                &cons,
                || (empty.clone(), 0u64),
                |(g, n), _, x| {
                    let y: Vec<f64> = axes.iter().map(|&a| x[a]).collect();
                    if sub.contains(&y) {
                        *n += 1;
                    }
                    g.insert(&y);
                },
            )?;
            let n: u64 = shards.iter().map(|s| s.1).sum();
            points = points.saturating_mul(n);
            let cover = GridCover::from_shards(&sub, eps, shards.into_iter().map(|s| s.0).collect())?;
            parts.push((axes, cover));
        }
        Ok((GridCover::product(window, eps, &parts)?, points))
    }

    fn direct_cover(
        &self,
        order: &[usize],
        bounds: &[u32],
        constraints: &[Reach],
        window: &Window,
        eps: f64,
    ) -> Result<(GridCover, u64)> {
        let empty = GridCover::new(window, eps)?;
        let (shards, _) = self.fold_over(
            order,
            bounds,
            constraints,
            || (empty.clone(), 0u64),
            |(g, n), _, x| {
                if window.contains(x) {
                    *n += 1;
                }
                g.insert(x);
            },
        )?;
        let n = shards.iter().map(|s| s.1).sum();
        Ok((GridCover::from_shards(window, eps, shards.into_iter().map(|s| s.0).collect())?, n))
    }
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let next = p[y];
        p[y] = r;
        y = next;
    }
    r
}

fn union(p: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(p, a), find(p, b));
    if ra != rb {
        p[ra.max(rb)] = ra.min(rb);
    }
}

fn check_magnitude(w: &[f64]) -> Result<()> {
    if w.iter().any(|x| !x.is_finite() || x.abs() > MAX_MAGNITUDE) {
        return Err(Error::Overflow);
    }
    Ok(())
}

/// Pruning data for one enumeration order.
struct Ctx<'a> {
    engine: &'a OrbitEngine,
    order: &'a [usize],
    bounds: &'a [u32],
    constraints: &'a [Reach],
    /// Bound factors contributed by the generators after depth `j`, per block.
    suffix: Vec<Vec<(f64, f64)>>,
}

impl<'a> Ctx<'a> {
    fn new(engine: &'a OrbitEngine, order: &'a [usize], bounds: &'a [u32], constraints: &'a [Reach]) -> Self {
        let nb = engine.blocks.len();
        let mut suffix = vec![vec![(1.0, 1.0); nb]; order.len() + 1];
        for j in (0..order.len()).rev() {
            let g = order[j];
            for b in 0..nb {
                let (lo, hi) = step_factor(engine.sigma[g][b], bounds[g]);
                suffix[j][b] = (suffix[j + 1][b].0 * lo, suffix[j + 1][b].1 * hi);
            }
        }
        Self { engine, order, bounds, constraints, suffix }
    }

    /// True when no descendant of the node (depth `j`, exponent `k` so far) can meet the constraints.
    fn prune(&self, j: usize, k: u32, w: &[f64]) -> bool {
        if self.constraints.is_empty() {
            return false;
        }
        let e = self.engine;
        let mut peak = vec![0.0f64; e.blocks.len()];
        for (c, x) in w.iter().enumerate() {
            let b = e.block_of[c];
            peak[b] = peak[b].max(x.abs());
        }
        let mut norms = vec![0.0f64; e.blocks.len()];
        for (c, x) in w.iter().enumerate() {
            let b = e.block_of[c];
            if peak[b] > 0.0 {
                norms[b] += (x / peak[b]).powi(2);
            }
        }
        for (n, p) in norms.iter_mut().zip(&peak) {
            *n = n.sqrt() * p;
        }
        let here = self.order.get(j).copied();
        self.constraints.iter().any(|c| {
            let (mut lower, mut upper) = (0.0f64, 0.0f64);
            for &b in &c.blocks {
                if norms[b] == 0.0 {
                    continue;
                }
                let (mut lo, mut hi) = self.suffix[(j + 1).min(self.order.len())][b];
                if let Some(g) = here {
                    let (l, h) = step_factor(e.sigma[g][b], self.bounds[g] - k);
                    lo *= l;
                    hi *= h;
                }
                lower += (norms[b] * lo).powi(2);
                upper += (norms[b] * hi).powi(2);
            }
            lower.sqrt() > c.reach * (1.0 + PRUNE_SLACK) || upper.sqrt() < c.floor * (1.0 - PRUNE_SLACK)
        })
    }

    fn dfs<S, V>(&self, j: usize, w: &[f64], exps: &mut [u32], bufs: &mut [Vec<f64>], s: &mut S, visit: &V) -> Result<u64>
    where
        V: Fn(&mut S, &[u32], &[f64]),
    {
        let g = self.order[j];
        let last = j + 1 == self.order.len();
        let mut nodes = 0;
        let (head, tail) = bufs.split_at_mut(1);
        let cur = &mut head[0];
        cur.copy_from_slice(w);
        let mut tmp = vec![0.0; w.len()];
        for k in 0..=self.bounds[g] {
            if k > 0 {
                self.engine.ops[g].apply(cur, &mut tmp);
                std::mem::swap(cur, &mut tmp);
            }
            check_magnitude(cur)?;
            if self.prune(j, k, cur) {
                break;
            }
            exps[g] = k;
            if last {
                visit(s, exps, cur);
                nodes += 1;
            } else {
                nodes += self.dfs(j + 1, cur, exps, tail, s, visit)?;
            }
        }
        exps[g] = 0;
        Ok(nodes)
    }
}

/// Range of `σ^k` over `0 ≤ k ≤ remaining` applied to a norm.
fn step_factor((smin, smax): (f64, f64), remaining: u32) -> (f64, f64) {
    let r = remaining.min(i32::MAX as u32) as i32;
    (smin.min(1.0).powi(r), smax.max(1.0).powi(r))
}

/// Orbit of `v` under an abelian semigroup, window-filtered (closed window).
pub fn orbit(g: &MatrixSemigroup, v: &Vector, bounds: &[u32], window: Option<&Window>) -> Result<PointSample> {
    OrbitEngine::for_semigroup(g, v)?.sample(g.field(), bounds, window)
}

/// ε-cover of the orbit of `v` in `window` and the number of in-window points.
pub fn orbit_cover(g: &MatrixSemigroup, v: &Vector, bounds: &[u32], window: &Window, eps: f64) -> Result<(GridCover, u64)> {
    OrbitEngine::for_semigroup(g, v)?.cover(bounds, window, eps)
}

/// Exact orbit for rational generators: every exponent vector within `bounds`,
/// filtered by the closed window, in lexicographic order.
pub fn orbit_exact(
    generators: &[QMatrix],
    v: &[BigRational],
    bounds: &[u32],
    window: Option<&Window>,
) -> Result<Vec<(Vec<u32>, Vec<BigRational>)>> {
    if bounds.len() != generators.len() {
        return Err(Error::DimensionMismatch { expected: generators.len(), got: bounds.len() });
    }
    let limits: Option<Vec<(BigRational, BigRational)>> = window.map(|w| {
        w.bounds()
            .iter()
            .map(|&(lo, hi)| (BigRational::from_f64(lo).unwrap(), BigRational::from_f64(hi).unwrap()))
            .collect()
    });
    let inside = |x: &[BigRational]| limits.as_ref().is_none_or(|l| x.iter().zip(l).all(|(x, (lo, hi))| lo <= x && x <= hi));
    let mut out = Vec::new();
    let mut exps = vec![0u32; generators.len()];
    fn rec(
        gens: &[QMatrix],
        bounds: &[u32],
        j: usize,
        w: Vec<BigRational>,
        exps: &mut [u32],
        inside: &dyn Fn(&[BigRational]) -> bool,
        out: &mut Vec<(Vec<u32>, Vec<BigRational>)>,
    ) -> Result<()> {
        if j == gens.len() {
            if inside(&w) {
                out.push((exps.to_vec(), w));
            }
            return Ok(());
        }
        let mut cur = w;
        for k in 0..=bounds[j] {
            if k > 0 {
                cur = gens[j].mul_vec(&cur)?;
            }
            exps[j] = k;
            rec(gens, bounds, j + 1, cur.clone(), exps, inside, out)?;
        }
        exps[j] = 0;
        Ok(())
    }
    rec(generators, bounds, 0, v.to_vec(), &mut exps, &inside, &mut out)?;
    Ok(out)
}

/// Integer vector as exact rationals.
#[cfg(test)]
fn rational_vector(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(num_bigint::BigInt::from(x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Field, Matrix};
    use num_complex::Complex64;

    fn diag(values: &[f64]) -> Matrix {
        Matrix::diagonal(Field::Real, &values.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    fn rot(t: f64) -> Matrix {
        Matrix::real(&[vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]).unwrap()
    }

    #[test]
    fn identity_orbit_is_the_start() {
        let g = MatrixSemigroup::abelian(vec![Matrix::identity(Field::Real, 2)], Field::Real).unwrap();
        let v = Vector::real(vec![0.3, -0.2]);
        let s = orbit(&g, &v, &[10], None).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.point(0), &[0.3, -0.2]);
    }

    #[test]
    fn homothety_orbit() {
        let g = MatrixSemigroup::abelian(vec![diag(&[2.0, 2.0])], Field::Real).unwrap();
        let s = orbit(&g, &Vector::basis(Field::Real, 2, 0), &[3], None).unwrap();
        let xs: Vec<f64> = s.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(s.meta(3), &[3]);
    }

    #[test]
    fn pruning_keeps_every_in_window_point() {
        let t = std::f64::consts::PI * 2f64.sqrt();
        let g = MatrixSemigroup::abelian(vec![diag(&[2.0, 2.0]), diag(&[1.0 / 3.0, 1.0 / 3.0]), rot(t)], Field::Real)
            .unwrap();
        let v = Vector::real(vec![1.0, 0.0]);
        let w = Window::cube(2, -2.0, 2.0).unwrap();
        let pruned = orbit(&g, &v, &[12, 12, 30], Some(&w)).unwrap();
        let engine = OrbitEngine::for_semigroup(&g, &v).unwrap();
        let (all, _) = engine
            .fold(&[12, 12, 30], &[], Vec::new, |s: &mut Vec<Vec<u32>>, e, x| {
                if w.contains(x) {
                    s.push(e.to_vec())
                }
            })
            .unwrap();
        let all: Vec<Vec<u32>> = all.into_iter().flatten().collect();
        let got: Vec<Vec<u32>> = (0..pruned.len()).map(|i| pruned.meta(i).iter().map(|&k| k as u32).collect()).collect();
        assert_eq!(got, all);
        assert!(!got.is_empty());
    }

    #[test]
    fn overflow_is_reported() {
        let a = Matrix::real(&[vec![1e10, 0.0], vec![1.0, 1e-10]]).unwrap();
        let g = MatrixSemigroup::abelian(vec![a], Field::Real).unwrap();
        let v = Vector::real(vec![1.0, 1.0]);
        assert_eq!(orbit(&g, &v, &[40], None).unwrap_err(), Error::Overflow);
        // a window makes the growing branch prunable long before it overflows
        let s = orbit(&g, &v, &[40], Some(&Window::cube(2, -1.0, 1.0).unwrap())).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn factor_product_cover_matches_direct() {
        let t = std::f64::consts::PI * 2f64.sqrt();
        let r = rot(t);
        let mut gens = Vec::new();
        for (a, b) in [(2.0, 1.0), (1.0 / 3.0, 1.0), (-1.0, 1.0)] {
            let mut m = DMatrix::identity(3, 3);
            m[(0, 0)] = a;
            m[(1, 1)] = b;
            m[(2, 2)] = b;
            gens.push(m);
        }
        for s in [2.0, 1.0 / 3.0] {
            let mut m = DMatrix::identity(3, 3);
            m[(1, 1)] = s;
            m[(2, 2)] = s;
            gens.push(m);
        }
        let mut m = DMatrix::identity(3, 3);
        m.view_mut((1, 1), (2, 2)).copy_from(&r.realified());
        gens.push(m);
        let e = OrbitEngine::new(&gens, &[1.0, 1.0, 0.0], 0.0).unwrap();
        assert_eq!(e.factor_count(), 2);
        let w = Window::cube(3, -2.0, 2.0).unwrap();
        let bounds = [5, 5, 1, 5, 5, 12];
        let (fast, n_fast) = e.cover(&bounds, &w, 0.25).unwrap();
        let cons = e.constraints_for(&w).unwrap();
        let (slow, n_slow) = e.direct_cover(&e.active(), &bounds, &cons, &w, 0.25).unwrap();
        assert_eq!(fast.hit_indices(), slow.hit_indices());
        assert_eq!(n_fast, n_slow);
    }

    #[test]
    fn exact_orbit_reorders_freely() {
        let a = QMatrix::from_i64(&[vec![2, 0], vec![1, 2]]).unwrap();
        let b = QMatrix::from_i64(&[vec![3, 0], vec![2, 3]]).unwrap();
        let v = rational_vector(&[1, 1]);
        let pts = orbit_exact(&[a.clone(), b.clone()], &v, &[3, 3], None).unwrap();
        assert_eq!(pts.len(), 16);
        for (e, x) in &pts {
            let y = a.pow(e[0]).unwrap().mul_vec(&b.pow(e[1]).unwrap().mul_vec(&v).unwrap()).unwrap();
            assert_eq!(&y, x);
        }
    }

    #[test]
    fn weighted_budget() {
        let b = Budget::weighted(vec![0.2, 0.2, 1.0]);
        assert_eq!(b.bounds(3, 200).unwrap(), vec![40, 40, 200]);
        assert_eq!(Budget::uniform().bounds(2, 7).unwrap(), vec![7, 7]);
    }
}
