use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use super::PointSample;
use crate::error::{Error, Result};
use crate::linalg::Field;

/// Offset used to replace excluded rational angles in `[½, 1)` by irrational ones.
pub const B_PLANT_OFFSET: f64 = FRAC_1_SQRT_2;

/// Angle for grid index `j` of `count`: `g = j/count` when `g < ½`, otherwise the
/// planted irrational `½ + ((g − ½ + 1/√2) mod ½)`. The flag reports planting.
pub fn b_angle(j: usize, count: usize) -> (f64, bool) {
    let g = j as f64 / count as f64;
    if g < 0.5 {
        (g, false)
    } else {
        (0.5 + (g - 0.5 + B_PLANT_OFFSET).rem_euclid(0.5), true)
    }
}

/// Points `r·e^{2iπθ}` of `B` as vectors of ℝ², over the radial grid and the
/// angle grid `{j/count}`; metadata `i, j, planted`.
pub fn sample_b(radii: &[f64], angle_count: usize) -> Result<PointSample> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput("radii must be positive".into()));
    }
    if angle_count == 0 {
        return Err(Error::InvalidInput("angle grid is empty".into()));
    }
    let mut out = PointSample::with_labels(Field::Real, 2, &["i", "j", "planted"]);
    for j in 0..angle_count {
        let (theta, planted) = b_angle(j, angle_count);
        let (s, c) = (TAU * theta).sin_cos();
        for (i, &r) in radii.iter().enumerate() {
            out.push(&[r * c, r * s], &[i as i64, j as i64, planted as i64]);
        }
    }
    Ok(out)
}
