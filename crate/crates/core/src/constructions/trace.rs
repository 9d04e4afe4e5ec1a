use super::PointSample;
use crate::error::{Error, Result};
use crate::linalg::{membership_distance, ExactSubspace, ExactVector, Field, Subspace};

/// Points of a sample lying in a subspace, in ambient and in M-coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub ambient: PointSample,
    /// Real orthonormal coordinates of each trace point in `M` (same metadata).
    pub intrinsic: PointSample,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.ambient.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ambient.is_empty()
    }
}

/// Keeps the points within `tol` of `m`.
pub fn subspace_trace(sample: &PointSample, m: &Subspace, tol: f64) -> Result<Trace> {
    if sample.field() != m.field() || sample.dim() != m.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: m.ambient_dim(), got: sample.dim() });
    }
    let mut ambient = sample.clone_layout();
    let mut intrinsic = PointSample::new(Field::Real, m.real_dim(), sample.meta_labels().to_vec());
    for i in 0..sample.len() {
        let v = sample.vector(i);
        if membership_distance(&v, m)? <= tol {
            ambient.push(sample.point(i), sample.meta(i));
            intrinsic.push(&m.coordinates(&v)?, sample.meta(i));
        }
    }
    Ok(Trace { ambient, intrinsic })
}

/// Exact trace: keeps the points that lie in `m` exactly.
pub fn subspace_trace_exact(points: &[(Vec<i64>, ExactVector)], m: &ExactSubspace) -> Result<Vec<(Vec<i64>, ExactVector)>> {
    let mut out = Vec::new();
    for (meta, x) in points {
        if m.contains(x)? {
            out.push((meta.clone(), x.clone()));
        }
    }
    Ok(out)
}
