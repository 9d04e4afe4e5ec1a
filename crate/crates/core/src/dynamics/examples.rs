//! The rotation-scaling family `G_θ` and the two-matrix non-abelian construction.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::MatrixSemigroup;
use crate::constructions::PointSample;
use crate::density::{GridCover, Window};
use crate::error::{Error, Result};
use crate::linalg::{rational_to_f64, Field, Matrix, QMatrix, Surd, Vector};

/// `G_θ = ⟨pI, I/q, R_{πθ}⟩` on ℝ².
pub fn example_g_theta(p: u64, q: u64, theta: &Surd) -> Result<MatrixSemigroup> {
    if p < 2 || q < 2 {
        return Err(Error::InvalidInput(format!("p = {p} and q = {q} must both be at least 2")));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    if theta.is_rational() {
        return Err(Error::RationalTheta);
    }
    let t = std::f64::consts::PI * theta.to_f64();
    let b1 = Matrix::real(&[vec![p as f64, 0.0], vec![0.0, p as f64]])?;
    let b2 = Matrix::real(&[vec![1.0 / q as f64, 0.0], vec![0.0, 1.0 / q as f64]])?;
    let b3 = Matrix::real(&[vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]])?;
    MatrixSemigroup::abelian(vec![b1, b2, b3], Field::Real)
}

/// `(s·θ) mod 1`, accurate to a few ulps for `θ = r + c√d`.
///
/// The irrational part uses `√N − ⌊√N⌋ = (N − n²)/(√N + n)` with exact integers.
fn frac_of_multiple(theta: &Surd, s: u64) -> f64 {
    let terms: Vec<(u64, BigRational)> = theta.terms().map(|(r, c)| (r, c.clone())).collect();
    if terms.iter().filter(|(r, _)| *r != 1).count() > 1 {
        return (s as f64 * theta.to_f64()).rem_euclid(1.0);
    }
    let sb = BigInt::from(s);
    let mut acc = 0.0f64;
    for (r, c) in terms {
        let a = c.numer() * &sb;
        let b = c.denom().clone();
        if r == 1 {
            let m = a.mod_floor(&b);
            acc += rational_to_f64(&BigRational::new(m, b));
            continue;
        }
        let n_big: BigInt = &a * &a * BigInt::from(r);
        let n = n_big.sqrt();
        let rem = (&n_big - &n * &n).to_f64().unwrap_or(0.0);
        let f = rem / (n_big.to_f64().unwrap_or(f64::INFINITY).sqrt() + n.to_f64().unwrap_or(0.0));
        let whole = n.mod_floor(&b).to_f64().unwrap_or(0.0);
        let part = (whole + f) / b.to_f64().unwrap_or(1.0);
        acc += if a.is_negative() { -part } else { part };
    }
    acc.rem_euclid(1.0)
}

/// `|sin(π s θ)|` from the accurate fractional part.
fn abs_sin_pi_multiple(theta: &Surd, s: u64) -> f64 {
    let f = frac_of_multiple(theta, s);
    (std::f64::consts::PI * f.min(1.0 - f)).sin()
}

/// Structured trace of a `G_θ` orbit on the line through its start.
#[derive(Debug, Clone, PartialEq)]
pub struct GThetaTrace {
    /// `(k, m, p^k/q^m)` for `k, m ≤ bound`.
    pub scalars: Vec<(u32, u32, BigRational)>,
    /// `min_{1≤s≤bound} |sin(πsθ)|`; infinite for bound 0.
    pub min_sin: f64,
    pub bound: u32,
}

impl GThetaTrace {
    pub fn all_positive(&self) -> bool {
        self.scalars.iter().all(|(_, _, x)| x.is_positive())
    }

    /// Trace points `t·v` as a sample in ℝ².
    pub fn points(&self, v: &Vector) -> PointSample {
        let mut out = PointSample::with_labels(Field::Real, 2, &["k", "m"]);
        for (k, m, x) in &self.scalars {
            let t = rational_to_f64(x);
            out.push(&[t * v.coords()[0], t * v.coords()[1]], &[*k as i64, *m as i64]);
        }
        out
    }
}

/// `G_θ(v) ∩ ℝv` at exponent bound `bound`: the products with no rotation, since
/// `sin(πsθ) ≠ 0` for `1 ≤ s ≤ bound`.
pub fn line_trace_g_theta(p: u64, q: u64, theta: &Surd, v: &Vector, bound: u32) -> Result<GThetaTrace> {
    example_g_theta(p, q, theta)?;
    if v.field() != Field::Real || v.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: v.dim() });
    }
    if v.is_zero() {
        return Err(Error::AllZeroInput);
    }
    let min_sin = (1..=bound as u64).map(|s| abs_sin_pi_multiple(theta, s)).fold(f64::INFINITY, f64::min);
    if min_sin == 0.0 {
        return Err(Error::NumericalBreakdown("a rotation returned to the line".into()));
    }
    let (pb, qb) = (BigInt::from(p), BigInt::from(q));
    let mut scalars = Vec::with_capacity((bound as usize + 1).pow(2));
    for k in 0..=bound {
        for m in 0..=bound {
            let x = BigRational::new(num_traits::pow(pb.clone(), k as usize), num_traits::pow(qb.clone(), m as usize));
            scalars.push((k, m, x));
        }
    }
    Ok(GThetaTrace { scalars, min_sin, bound })
}

/// Semigroup generated by `A`, `B`, `A′ = I/a₁₁`, `B′ = I/b₁` (and optionally `−I`).
#[derive(Debug, Clone, PartialEq)]
pub struct Javaheri {
    pub a: Matrix,
    pub b: Matrix,
    pub with_sign: bool,
    pub semigroup: MatrixSemigroup,
    exact: Option<Vec<QMatrix>>,
}

impl Javaheri {
    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// `aₙₙ/a₁₁` and `bₙ/b₁`.
    pub fn ratios(&self) -> (Complex64, Complex64) {
        let n = self.n() - 1;
        (self.a.get(n, n) / self.a.get(0, 0), self.b.get(n, n) / self.b.get(0, 0))
    }

    /// `(BB′)^k (AA′)^l eₙ` in exact arithmetic, when the inputs are rational.
    pub fn subword_exact(&self, k: u32, l: u32) -> Result<Option<Vec<BigRational>>> {
        let Some(q) = &self.exact else {
            return Ok(None);
        };
        let n = self.n();
        let aa = q[0].mul(&q[2])?;
        let bb = q[1].mul(&q[3])?;
        let mut e = vec![BigRational::zero(); n];
        e[n - 1] = BigRational::one();
        let w = bb.pow(k)?.mul_vec(&aa.pow(l)?.mul_vec(&e)?)?;
        Ok(Some(w))
    }

    /// `(bₙ/b₁)^k (aₙₙ/a₁₁)^l` exactly, when the inputs are rational.
    pub fn subword_scalar_exact(&self, k: u32, l: u32) -> Option<BigRational> {
        let q = self.exact.as_ref()?;
        let n = self.n() - 1;
        let ra = q[0].get(n, n) / q[0].get(0, 0);
        let rb = q[1].get(n, n) / q[1].get(0, 0);
        Some(num_traits::pow(rb, k as usize) * num_traits::pow(ra, l as usize))
    }
}

/// Builds the four-generator semigroup from lower-triangular `A` and diagonal `B`.
pub fn javaheri_semigroup(a: &Matrix, b: &Matrix, with_sign: bool) -> Result<Javaheri> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.n() });
    }
    if a.field() != b.field() {
        return Err(Error::FieldMismatch("A and B have different fields".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if j > i && a.get(i, j) != Complex64::zero() {
                return Err(Error::InvalidInput("A must be lower triangular".into()));
            }
            if j != i && b.get(i, j) != Complex64::zero() {
                return Err(Error::InvalidInput("B must be diagonal".into()));
            }
        }
    }
    let (a11, b1) = (a.get(0, 0), b.get(0, 0));
    if a11 == Complex64::zero() || b1 == Complex64::zero() {
        return Err(Error::InvalidInput("a₁₁ and b₁ must be nonzero".into()));
    }
    let field = a.field();
    let a_prime = Matrix::scalar(field, n, Complex64::one() / a11);
    let b_prime = Matrix::scalar(field, n, Complex64::one() / b1);
    let mut gens = vec![a.clone(), b.clone(), a_prime, b_prime];
    if with_sign {
        gens.push(Matrix::scalar(field, n, Complex64::new(-1.0, 0.0)));
    }
    let semigroup = MatrixSemigroup::new(gens, field)?;
    let exact = if field == Field::Real { rational_pair(a, b, with_sign) } else { None };
    Ok(Javaheri { a: a.clone(), b: b.clone(), with_sign, semigroup, exact })
}

/// Exact generators when every float entry is a dyadic rational.
fn rational_pair(a: &Matrix, b: &Matrix, with_sign: bool) -> Option<Vec<QMatrix>> {
    let to_q = |m: &Matrix| -> Option<QMatrix> {
        let rows: Option<Vec<Vec<BigRational>>> = (0..m.n())
            .map(|i| (0..m.n()).map(|j| BigRational::from_float(m.get(i, j).re)).collect())
            .collect();
        QMatrix::from_rows(rows?).ok()
    };
    let qa = to_q(a)?;
    let qb = to_q(b)?;
    let n = a.n();
    let qa1 = QMatrix::scalar(n, qa.get(0, 0).recip());
    let qb1 = QMatrix::scalar(n, qb.get(0, 0).recip());
    let mut out = vec![qa, qb, qa1, qb1];
    if with_sign {
        out.push(QMatrix::scalar(n, -BigRational::one()));
    }
    Some(out)
}

/// Quantized key: drops the 12 low mantissa bits (relative 2⁻⁴⁰).
fn point_key(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| if *v == 0.0 { 0 } else { v.to_bits() >> 12 }).collect()
}

/// Breadth-first orbit over words of length `≤ max_len`, deduplicated by point.
///
/// Metadata: word length, then the generator index of each letter (`-1` padding).
pub fn javaheri_orbit(j: &Javaheri, max_len: usize, v: &Vector) -> Result<PointSample> {
    let g = &j.semigroup;
    if v.field() != g.field() || v.dim() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: v.dim() });
    }
    let mut labels = vec!["length".to_string()];
    labels.extend((1..=max_len).map(|i| format!("w{i}")));
    let mut out = PointSample::new(g.field(), v.real_dim(), labels);
    let meta_of = |word: &[usize]| -> Vec<i64> {
        let mut m = vec![word.len() as i64];
        m.extend((0..max_len).map(|i| word.get(i).map_or(-1, |&x| x as i64)));
        m
    };
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(point_key(v.coords()));
    out.push(v.coords(), &meta_of(&[]));
    let mut frontier: Vec<(Vec<usize>, Vector)> = vec![(Vec::new(), v.clone())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, x) in &frontier {
            for (gi, a) in g.generators().iter().enumerate() {
                let y = a.apply(x)?;
                if y.coords().iter().any(|c| !c.is_finite() || c.abs() > super::MAX_MAGNITUDE) {
                    return Err(Error::Overflow);
                }
                if seen.insert(point_key(y.coords())) {
                    let mut w = Vec::with_capacity(word.len() + 1);
                    w.push(gi);
                    w.extend_from_slice(word);
                    out.push(y.coords(), &meta_of(&w));
                    next.push((w, y));
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// The orbit of `eₙ` on the line `𝕂eₙ`, graded in `ln|t|` over `[−R, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JavaheriTrace {
    /// Scalars `t` with `point = t·eₙ`.
    pub scalars: Vec<Complex64>,
    /// Cover of `ln t` for the positive real scalars (of `ln|t|` over ℂ).
    pub cover: GridCover,
    pub negative: usize,
}

/// Traces the word orbit of `eₙ` on `𝕂eₙ` and covers `ln|t| ∈ [−log_radius, log_radius]`.
pub fn javaheri_trace(j: &Javaheri, max_len: usize, log_radius: f64, eps: f64) -> Result<JavaheriTrace> {
    let n = j.n();
    let field = j.semigroup.field();
    let e = Vector::basis(field, n, n - 1);
    let orbit = javaheri_orbit(j, max_len, &e)?;
    let window = Window::new(vec![(-log_radius, log_radius)])?;
    let mut cover = GridCover::new(&window, eps)?;
    let mut scalars = Vec::new();
    let mut negative = 0;
    for x in orbit.vectors() {
        let t = x.entry(n - 1);
        let off: f64 = (0..n - 1).map(|i| x.entry(i).norm_sqr()).sum::<f64>().sqrt();
        if off > 1e-9 * (1.0 + t.norm()) {
            continue;
        }
        scalars.push(t);
        let real_positive = t.re > 0.0 && t.im.abs() <= 1e-12 * t.re;
        if field == Field::Complex || real_positive {
            cover.insert(&[t.norm().ln()]);
        } else if t.re < 0.0 {
            negative += 1;
        }
    }
    Ok(JavaheriTrace { scalars, cover, negative })
}

/// Coverage of `{(bₙ/b₁)^k (aₙₙ/a₁₁)^l : k + l ≤ bound}` in `ln|·|` over `[−R, R]`.
pub fn javaheri_precondition(j: &Javaheri, bound: u32, log_radius: f64, eps: f64) -> Result<GridCover> {
    let (ra, rb) = j.ratios();
    let window = Window::new(vec![(-log_radius, log_radius)])?;
    let mut cover = GridCover::new(&window, eps)?;
    for k in 0..=bound {
        for l in 0..=bound - k {
            let z = rb.powu(k) * ra.powu(l);
            if z.norm() > 0.0 {
                cover.insert(&[z.norm().ln()]);
            }
        }
    }
    Ok(cover)
}

/// Two-block instance whose block spectra are both `{2^k 3^{−m} e^{iπs√2}}`-type sets.
///
/// Over ℂ (n = 2) the generators are `S·diag(λ)·S⁻¹` with six diagonal patterns:
/// block 1 takes `(2, 1/3, e^{iπ√2}, 1, 1, 1)` and block 2 takes
/// `(1, 1, 1, 2, 1/3, e^{iπ√3})`. Over ℝ (n = 3) block 1 is a 1×1 block with
/// `(2, 1/3, −1, 1, 1, 1)` and block 2 a rotation-scaling cell with
/// `(1, 1, 1, 2, 1/3, R_{π√2})`.
pub fn example_dense_spectrum(field: Field) -> Result<MatrixSemigroup> {
    let c = Complex64::new;
    let rot = |t: f64| Complex64::from_polar(1.0, std::f64::consts::PI * t);
    let (s, diags): (Matrix, Vec<Matrix>) = match field {
        Field::Complex => {
            let s = Matrix::complex(&[vec![c(1.0, 0.0), c(0.5, 0.25)], vec![c(0.3, -0.2), c(1.0, 0.0)]])?;
            let one = c(1.0, 0.0);
            let pats = [
                [c(2.0, 0.0), one],
                [c(1.0 / 3.0, 0.0), one],
                [rot(2f64.sqrt()), one],
                [one, c(2.0, 0.0)],
                [one, c(1.0 / 3.0, 0.0)],
                [one, rot(3f64.sqrt())],
            ];
            (s, pats.iter().map(|d| Matrix::diagonal(Field::Complex, d)).collect())
        }
        Field::Real => {
            let s = Matrix::real(&[vec![1.0, 0.2, -0.1], vec![0.3, 1.0, 0.2], vec![-0.2, 0.1, 1.0]])?;
            let pats = [(2.0, c(1.0, 0.0)), (1.0 / 3.0, c(1.0, 0.0)), (-1.0, c(1.0, 0.0))]
                .into_iter()
                .chain([(1.0, c(2.0, 0.0)), (1.0, c(1.0 / 3.0, 0.0)), (1.0, rot(2f64.sqrt()))]);
            let mats = pats
                .map(|(t, z)| {
                    Matrix::real(&[vec![t, 0.0, 0.0], vec![0.0, z.re, -z.im], vec![0.0, z.im, z.re]])
                })
                .collect::<Result<Vec<_>>>()?;
            (s, mats)
        }
    };
    let s_inv = s.inverse()?;
    let gens = diags.iter().map(|d| s.mul(d)?.mul(&s_inv)).collect::<Result<Vec<_>>>()?;
    MatrixSemigroup::abelian(gens, field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted() -> Javaheri {
        let a = Matrix::real(&[vec![1.0, 0.0], vec![1.0, 2.0]]).unwrap();
        let b = Matrix::real(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        javaheri_semigroup(&a, &b, false).unwrap()
    }

    #[test]
    fn g_theta_preconditions() {
        assert!(example_g_theta(2, 3, &Surd::sqrt(2)).unwrap().is_abelian());
        assert_eq!(example_g_theta(2, 4, &Surd::sqrt(2)).unwrap_err(), Error::NotCoprime { p: 2, q: 4 });
        assert_eq!(example_g_theta(2, 3, &Surd::ratio(1, 2)).unwrap_err(), Error::RationalTheta);
    }

    #[test]
    fn sin_guard_matches_high_precision() {
        let v = Vector::real(vec![1.0, 0.0]);
        let t100 = line_trace_g_theta(2, 3, &Surd::sqrt(2), &v, 100).unwrap();
        assert!((t100.min_sin - 0.015866368524169526683).abs() <= 1e-15);
        let t0 = line_trace_g_theta(2, 3, &Surd::sqrt(2), &v, 0).unwrap();
        assert_eq!(t0.scalars, vec![(0, 0, BigRational::one())]);
        let t3 = line_trace_g_theta(2, 3, &Surd::sqrt(2), &v, 3).unwrap();
        assert_eq!(t3.scalars.len(), 16);
        assert!(t3.all_positive());
    }

    #[test]
    fn frac_is_exact_enough() {
        let t = Surd::parse("1/3 + 2*sqrt(5)").unwrap();
        let f = frac_of_multiple(&t, 7);
        let want = (7.0 / 3.0 + 14.0 * 5f64.sqrt()).rem_euclid(1.0);
        assert!((f - want).abs() < 1e-12);
    }

    #[test]
    fn javaheri_is_not_abelian_and_subwords_are_exact() {
        let j = planted();
        assert!(!j.semigroup.is_abelian());
        for k in 0..4 {
            for l in 0..4 {
                let w = j.subword_exact(k, l).unwrap().unwrap();
                let s = j.subword_scalar_exact(k, l).unwrap();
                assert!(w[0].is_zero());
                assert_eq!(w[1], s);
            }
        }
    }

    #[test]
    fn empty_words_give_the_start() {
        let j = planted();
        let v = Vector::real(vec![0.5, 0.25]);
        let o = javaheri_orbit(&j, 0, &v).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o.point(0), v.coords());
    }

    #[test]
    fn trace_matches_closed_form() {
        let j = planted();
        let t = javaheri_trace(&j, 12, 2.0, 0.1).unwrap();
        let pre = javaheri_precondition(&j, 12, 2.0, 0.1).unwrap();
        assert_eq!(t.cover.hit_indices(), pre.hit_indices());
        assert_eq!(t.cover.hit_count(), 27);
    }
}
