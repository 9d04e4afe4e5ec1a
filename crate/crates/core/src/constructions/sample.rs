use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Field, Vector};

/// Flat list of points with integer metadata per point.
///
/// Point `i` occupies `coords[i*real_dim..(i+1)*real_dim]` (complex entries
/// interleaved) and `meta[i*k..(i+1)*k]` with `k = meta_labels.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    field: Field,
    real_dim: usize,
    meta_labels: Vec<String>,
    coords: Vec<f64>,
    meta: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    flags: Vec<String>,
}

impl PointSample {
    pub fn new(field: Field, real_dim: usize, meta_labels: Vec<String>) -> Self {
        Self { field, real_dim, meta_labels, coords: Vec::new(), meta: Vec::new(), flags: Vec::new() }
    }

    pub fn with_labels(field: Field, real_dim: usize, labels: &[&str]) -> Self {
        Self::new(field, real_dim, labels.iter().map(|s| s.to_string()).collect())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn real_dim(&self) -> usize {
        self.real_dim
    }

    pub fn dim(&self) -> usize {
        self.real_dim / self.field.width()
    }

    pub fn meta_labels(&self) -> &[String] {
        &self.meta_labels
    }

    pub fn flags(&self) -> &[String] {
        &self.flags
    }

    pub fn flag(&mut self, text: &str) {
        if !self.flags.iter().any(|f| f == text) {
            self.flags.push(text.to_string());
        }
    }

    pub fn len(&self) -> usize {
        if self.real_dim == 0 {
            self.meta.len() / self.meta_labels.len().max(1)
        } else {
            self.coords.len() / self.real_dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push(&mut self, point: &[f64], meta: &[i64]) {
        debug_assert_eq!(point.len(), self.real_dim);
        debug_assert_eq!(meta.len(), self.meta_labels.len());
        self.coords.extend_from_slice(point);
        self.meta.extend_from_slice(meta);
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.real_dim..(i + 1) * self.real_dim]
    }

    pub fn meta(&self, i: usize) -> &[i64] {
        let k = self.meta_labels.len();
        &self.meta[i * k..(i + 1) * k]
    }

    pub fn vector(&self, i: usize) -> Vector {
        Vector::from_real_coords(self.field, self.point(i).to_vec()).expect("consistent layout")
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn vectors(&self) -> impl Iterator<Item = Vector> + '_ {
        (0..self.len()).map(move |i| self.vector(i))
    }

    /// Appends `other`, which must share field, dimension and labels.
    pub fn extend(&mut self, other: &PointSample) -> Result<()> {
        if other.field != self.field || other.real_dim != self.real_dim || other.meta_labels != self.meta_labels {
            return Err(Error::InvalidInput("point samples have different layouts".into()));
        }
        self.coords.extend_from_slice(&other.coords);
        self.meta.extend_from_slice(&other.meta);
        for f in &other.flags {
            self.flag(f);
        }
        Ok(())
    }

    /// Keeps the points satisfying `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&[f64], &[i64]) -> bool) {
        let mut out = Self { coords: Vec::new(), meta: Vec::new(), ..self.clone_layout() };
        for i in 0..self.len() {
            if keep(self.point(i), self.meta(i)) {
                out.push(self.point(i), self.meta(i));
            }
        }
        *self = out;
    }

    /// Empty sample with the same field, dimension, labels and flags.
    pub fn clone_layout(&self) -> Self {
        Self {
            field: self.field,
            real_dim: self.real_dim,
            meta_labels: self.meta_labels.clone(),
            coords: Vec::new(),
            meta: Vec::new(),
            flags: self.flags.clone(),
        }
    }

    /// Same points relabelled as real vectors (the embedding φ).
    pub fn embedded(&self) -> Self {
        Self { field: Field::Real, ..self.clone() }
    }

    /// Sorts points by metadata, lexicographically.
    pub fn sort_by_meta(&mut self) {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.meta(a).cmp(self.meta(b)));
        let mut out = self.clone_layout();
        for i in order {
            out.push(self.point(i), self.meta(i));
        }
        *self = out;
    }

    fn coord_labels(&self) -> Vec<String> {
        match self.field {
            Field::Real => (1..=self.real_dim).map(|i| format!("x{i}")).collect(),
            Field::Complex => (1..=self.dim()).flat_map(|i| [format!("re{i}"), format!("im{i}")]).collect(),
        }
    }

    /// One row per point, metadata columns first.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.meta_labels.iter().cloned().chain(self.coord_labels()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.len() {
            let mut row: Vec<String> = self.meta(i).iter().map(|m| m.to_string()).collect();
            row.extend(self.point(i).iter().map(|x| format!("{x:?}")));
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("sample serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_puts_metadata_first() {
        let mut s = PointSample::with_labels(Field::Real, 2, &["s", "s1"]);
        s.push(&[0.5, -1.0], &[3, 4]);
        assert_eq!(s.to_csv(), "s,s1,x1,x2\n3,4,0.5,-1.0\n");
    }

    #[test]
    fn retain_and_sort() {
        let mut s = PointSample::with_labels(Field::Real, 1, &["k"]);
        for k in [3, 1, 2] {
            s.push(&[k as f64], &[k]);
        }
        s.sort_by_meta();
        assert_eq!(s.iter().map(|p| p[0]).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
        s.retain(|p, _| p[0] > 1.5);
        assert_eq!(s.len(), 2);
    }
}
