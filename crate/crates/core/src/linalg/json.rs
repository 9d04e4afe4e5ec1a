//! `{"field":"R"|"C","n":int,"entries":[[row],…]}` interchange format.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{Field, Matrix, QMatrix, Scalar, Surd, Vector};
use crate::error::{Error, Result};

/// A JSON scalar: number, surd string such as `"√2"` or `"1/3"`, or `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Number(f64),
    Text(String),
    List(Vec<ScalarJson>),
}

impl ScalarJson {
    pub fn to_scalar(&self) -> Result<Scalar> {
        match self {
            ScalarJson::Number(x) => Ok(Scalar::Float(*x)),
            ScalarJson::Text(t) => Ok(Scalar::Exact(Surd::parse(t)?)),
            ScalarJson::List(items) => match items.as_slice() {
                [x] => x.to_scalar(),
                [re, im] => {
                    let (re, im) = (re.to_scalar()?, im.to_scalar()?);
                    if re.is_complex() || im.is_complex() {
                        return Err(Error::Parse("nested complex entry".into()));
                    }
                    Ok(Scalar::Complex(Box::new(re), Box::new(im)))
                }
                _ => Err(Error::Parse(format!("expected scalar or [re, im], got {} items", items.len()))),
            },
        }
    }

    pub fn from_complex(z: Complex64, field: Field) -> Self {
        match field {
            Field::Real => ScalarJson::Number(z.re),
            Field::Complex => ScalarJson::List(vec![ScalarJson::Number(z.re), ScalarJson::Number(z.im)]),
        }
    }
}

fn scalar_value(s: &Scalar, field: Field) -> Result<Complex64> {
    let (re, im) = s.re_im();
    if field == Field::Real && s.is_complex() && im != 0.0 {
        return Err(Error::FieldMismatch("complex entry in a real matrix".into()));
    }
    Ok(Complex64::new(re, im))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub field: Field,
    pub n: usize,
    pub entries: Vec<Vec<ScalarJson>>,
}

impl MatrixJson {
    fn scalars(&self) -> Result<Vec<Vec<Scalar>>> {
        if self.entries.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: self.entries.len() });
        }
        self.entries
            .iter()
            .map(|row| {
                if row.len() != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, got: row.len() });
                }
                row.iter().map(ScalarJson::to_scalar).collect()
            })
            .collect()
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        let rows = self.scalars()?;
        let mut data = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                data[(i, j)] = scalar_value(&rows[i][j], self.field)?;
            }
        }
        Matrix::new(self.field, data)
    }

    /// Exact rational matrix when the field is ℝ and every entry is a rational string.
    pub fn to_rational(&self) -> Result<Option<QMatrix>> {
        if self.field != Field::Real {
            return Ok(None);
        }
        let rows = self.scalars()?;
        let mut out: Vec<Vec<BigRational>> = Vec::with_capacity(self.n);
        for row in rows {
            let mut r = Vec::with_capacity(self.n);
            for s in row {
                match s {
                    Scalar::Exact(x) => match x.as_rational() {
                        Some(q) => r.push(q),
                        None => return Ok(None),
                    },
                    _ => return Ok(None),
                }
            }
            out.push(r);
        }
        Ok(Some(QMatrix::from_rows(out)?))
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let n = m.n();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| ScalarJson::from_complex(m.get(i, j), m.field())).collect())
            .collect();
        Self { field: m.field(), n, entries }
    }
}

/// Column vector; entries may be `[[x1],[x2]]` rows or a flat list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub field: Field,
    pub n: usize,
    pub entries: Vec<ScalarJson>,
}

impl VectorJson {
    pub fn to_scalars(&self) -> Result<Vec<Scalar>> {
        if self.entries.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: self.entries.len() });
        }
        self.entries.iter().map(ScalarJson::to_scalar).collect()
    }

    pub fn to_vector(&self) -> Result<Vector> {
        let values = self
            .to_scalars()?
            .iter()
            .map(|s| scalar_value(s, self.field))
            .collect::<Result<Vec<_>>>()?;
        Ok(match self.field {
            Field::Real => Vector::real(values.iter().map(|z| z.re).collect()),
            Field::Complex => Vector::complex(&values),
        })
    }

    pub fn from_vector(v: &Vector) -> Self {
        let entries = v
            .entries()
            .into_iter()
            .map(|z| ScalarJson::List(vec![ScalarJson::from_complex(z, v.field())]))
            .collect();
        Self { field: v.field(), n: v.dim(), entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_and_surd_entries() {
        let text = r#"{"field":"C","n":2,"entries":[[[1,2],0],["√2",[0,"-1/2"]]]}"#;
        let m: MatrixJson = serde_json::from_str(text).unwrap();
        let m = m.to_matrix().unwrap();
        assert_eq!(m.get(0, 0), Complex64::new(1.0, 2.0));
        assert_eq!(m.get(1, 0), Complex64::new(2f64.sqrt(), 0.0));
        assert_eq!(m.get(1, 1), Complex64::new(0.0, -0.5));
    }

    #[test]
    fn rational_entries_give_an_exact_matrix() {
        let text = r#"{"field":"R","n":2,"entries":[["1/3","0"],["0","2"]]}"#;
        let m: MatrixJson = serde_json::from_str(text).unwrap();
        assert!(m.to_rational().unwrap().unwrap().is_diagonal());
    }

    #[test]
    fn vector_round_trip_and_flat_form() {
        let v = Vector::complex(&[Complex64::new(1.0, -1.0), Complex64::new(0.0, 3.0)]);
        let j = VectorJson::from_vector(&v);
        let back: VectorJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        assert_eq!(back.to_vector().unwrap(), v);
        let flat: VectorJson = serde_json::from_str(r#"{"field":"R","n":2,"entries":[1,"√3"]}"#).unwrap();
        assert_eq!(flat.to_vector().unwrap().coords()[1], 3f64.sqrt());
    }

    #[test]
    fn wrong_row_length_is_rejected() {
        let m: MatrixJson = serde_json::from_str(r#"{"field":"R","n":2,"entries":[[1,0],[0]]}"#).unwrap();
        assert!(matches!(m.to_matrix(), Err(Error::DimensionMismatch { .. })));
    }
}
