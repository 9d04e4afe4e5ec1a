use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PointSample;
use crate::density::{GridCover, Window};
use crate::error::{Error, Result};
use crate::linalg::Field;

/// Integer-part tolerance when matching a phase against `n₂θ₂ − n₁θ₁ + k`.
const PHASE_TOL: f64 = 1e-9;

/// Angles `θ₁, θ₂` with `1, θ₁, θ₂` rationally independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A2Params {
    pub theta1: f64,
    pub theta2: f64,
}

impl Default for A2Params {
    fn default() -> Self {
        Self { theta1: 2f64.sqrt(), theta2: 3f64.sqrt() }
    }
}

/// `e^{2iπ n θ}`, reducing `nθ` mod 1 first.
fn unit_phase(n: u64, theta: f64) -> Complex64 {
    let t = (n as f64 * theta).rem_euclid(1.0);
    Complex64::new((TAU * t).cos(), (TAU * t).sin())
}

/// `[r₁e^{2iπn₁θ₁}, r₂e^{2iπn₂θ₂}]ᵀ`, interleaved.
pub fn a2_point(params: &A2Params, r1: f64, r2: f64, n1: u64, n2: u64) -> [f64; 4] {
    let z1 = unit_phase(n1, params.theta1) * r1;
    let z2 = unit_phase(n2, params.theta2) * r2;
    [z1.re, z1.im, z2.re, z2.im]
}

/// Ray direction `[e^{2iπn₁θ₁}, ρ·e^{2iπn₂θ₂}]ᵀ`.
pub fn a2_ray(params: &A2Params, n1: u64, n2: u64, ratio: f64) -> [Complex64; 2] {
    [unit_phase(n1, params.theta1), unit_phase(n2, params.theta2) * ratio]
}

/// Points over the radial grid with `n₁, n₂ ≤ S` in the window; metadata `n1, n2, i1, i2`
/// where `i1, i2` index the radial grid.
pub fn sample_a2(params: &A2Params, radii: &[f64], bound: u64, window: &Window) -> Result<PointSample> {
    check_a2(radii, window)?;
    let mut out = PointSample::with_labels(Field::Complex, 4, &["n1", "n2", "i1", "i2"]);
    for n1 in 0..=bound {
        for n2 in 0..=bound {
            for (i1, &r1) in radii.iter().enumerate() {
                for (i2, &r2) in radii.iter().enumerate() {
                    let p = a2_point(params, r1, r2, n1, n2);
                    if window.contains(&p) {
                        out.push(&p, &[n1 as i64, n2 as i64, i1 as i64, i2 as i64]);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Streams the same points into a grid cover, keeping only `|z₁|, |z₂| ≤ polydisc` when given.
pub fn cover_a2(params: &A2Params, radii: &[f64], bound: u64, window: &Window, eps: f64, polydisc: Option<f64>) -> Result<GridCover> {
    check_a2(radii, window)?;
    let empty = GridCover::new(window, eps)?;
    let shards: Vec<GridCover> = (0..=bound)
        .into_par_iter()
        .map(|n1| {
            let mut g = empty.clone();
            for n2 in 0..=bound {
                for &r1 in radii {
                    if polydisc.is_some_and(|rad| r1 > rad) {
                        continue;
                    }
                    for &r2 in radii {
                        if polydisc.is_some_and(|rad| r2 > rad) {
                            continue;
                        }
                        let p = a2_point(params, r1, r2, n1, n2);
                        if window.contains(&p) {
                            g.insert(&p);
                        }
                    }
                }
            }
            g
        })
        .collect();
    GridCover::from_shards(window, eps, shards)
}

fn check_a2(radii: &[f64], window: &Window) -> Result<()> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput("radii must be positive".into()));
    }
    if window.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: window.dim() });
    }
    Ok(())
}

/// Intersection of `A₂` with a complex line `ℂu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RayDescription {
    /// `a₁a₂ = 0`: the line misses `A₂`.
    Empty,
    /// `A₂ ∩ ℂu = ℝ₊* v` with `θ = n₂θ₂ − n₁θ₁ + k`.
    Ray { n1: u64, n2: u64, k: i64, v: [[f64; 2]; 2] },
}

/// Trace on `ℂu`, using the principal phase `θ ∈ [0, 1)` of `a₂/a₁`.
pub fn line_trace_a2(params: &A2Params, u: [Complex64; 2], bound: u32) -> Result<RayDescription> {
    let [a1, a2] = u;
    if a1 == Complex64::new(0.0, 0.0) || a2 == Complex64::new(0.0, 0.0) {
        return Ok(RayDescription::Empty);
    }
    let q = a2 / a1;
    let theta = (q.arg() / TAU).rem_euclid(1.0);
    line_trace_a2_phase(params, a2.norm() / a1.norm(), theta, bound)
}

/// Trace for a line with `a₂/a₁ = ratio·e^{2iπθ}` and the given real `θ`.
pub fn line_trace_a2_phase(params: &A2Params, ratio: f64, theta: f64, bound: u32) -> Result<RayDescription> {
    if !(ratio > 0.0) {
        return Ok(RayDescription::Empty);
    }
    let mut found = Vec::new();
    for n1 in 0..=bound as u64 {
        for n2 in 0..=bound as u64 {
            let x = theta - n2 as f64 * params.theta2 + n1 as f64 * params.theta1;
            let k = x.round();
            if (x - k).abs() <= PHASE_TOL * (1.0 + x.abs()) {
                found.push((n1, n2, k as i64));
            }
        }
    }
    match found.as_slice() {
        [] => Err(Error::SearchBoundExceeded(bound)),
        [(n1, n2, k)] => {
            let v = a2_ray(params, *n1, *n2, ratio);
            Ok(RayDescription::Ray { n1: *n1, n2: *n2, k: *k, v: [[v[0].re, v[0].im], [v[1].re, v[1].im]] })
        }
        many => Err(Error::NumericalBreakdown(format!("{} triples match the phase", many.len()))),
    }
}
