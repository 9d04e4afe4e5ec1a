//! Exact arithmetic in the ring ℚ[√2, √3, √5, …].
//!
//! A [`Surd`] is a finite ℚ-linear combination of square roots of distinct
//! squarefree integers. Square roots of distinct squarefree integers are
//! linearly independent over ℚ, so two surds are equal exactly when their
//! coefficient maps agree. The ring is closed under products because
//! `√a·√b = g·√(ab/g²)` with `g = gcd(a, b)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Returns true when no square of a prime divides `n`.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Splits `n = a²·b` with `b` squarefree.
pub fn squarefree_decompose(n: u64) -> (u64, u64) {
    let mut outer = 1u64;
    let mut inner = 1u64;
    let mut m = n;
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        let mut e = 0;
        while m % d == 0 {
            m /= d;
            e += 1;
        }
        outer *= d.pow(e / 2);
        if e % 2 == 1 {
            inner *= d;
        }
        d += 1;
    }
    inner *= m;
    (outer, inner)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    // radicand (squarefree, 1 = rational part) -> nonzero coefficient
    terms: BTreeMap<u64, BigRational>,
}

impl Surd {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut s = Self::zero();
        s.add_term(1, q);
        s
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `√n` for any `n ≥ 0`, reduced to `a·√b` with `b` squarefree.
    pub fn sqrt(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let (outer, inner) = squarefree_decompose(n);
        let mut s = Self::zero();
        s.add_term(inner, BigRational::from_integer(BigInt::from(outer)));
        s
    }

    fn add_term(&mut self, radicand: u64, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(radicand).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&radicand);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&r| r == 1)
    }

    /// Rational value when the surd has no irrational part.
    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.is_rational() {
            return None;
        }
        Some(self.terms.get(&1).cloned().unwrap_or_else(BigRational::zero))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(r, c)| (*r, c))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = Self::zero();
        for (r, c) in &self.terms {
            out.add_term(*r, c * q);
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| rational_to_f64(c) * (*r as f64).sqrt())
            .sum()
    }

    /// Parses sums of terms like `2`, `-1/3`, `√2`, `sqrt(3)`, `2√5`, `3/2*sqrt(7)`.
    pub fn parse(text: &str) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let mut out = Self::zero();
        let mut start = 0;
        let bytes: Vec<(usize, char)> = cleaned.char_indices().collect();
        let mut depth = 0i32;
        let mut pieces = Vec::new();
        for (pos, &(i, ch)) in bytes.iter().enumerate() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 && pos > 0 => {
                    let prev = bytes[pos - 1].1;
                    if prev != 'e' && prev != 'E' && prev != '*' && prev != '/' {
                        pieces.push(&cleaned[start..i]);
                        start = i;
                    }
                }
                _ => {}
            }
        }
        pieces.push(&cleaned[start..]);
        for piece in pieces {
            let term = parse_term(piece)?;
            out = out + term;
        }
        Ok(out)
    }
}

fn parse_term(piece: &str) -> Result<Surd> {
    let (sign, body) = match piece.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, piece.strip_prefix('+').unwrap_or(piece)),
    };
    if body.is_empty() {
        return Err(Error::Parse(format!("dangling sign in '{piece}'")));
    }
    let (coeff_text, root) = if let Some(idx) = body.find('√') {
        let rad = &body[idx + '√'.len_utf8()..];
        let rad = rad.trim_start_matches('(').trim_end_matches(')');
        (&body[..idx], Some(rad))
    } else if let Some(idx) = body.find("sqrt(") {
        let rad = body[idx + 5..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("unclosed sqrt in '{piece}'")))?;
        (&body[..idx], Some(rad))
    } else {
        (body, None)
    };
    let coeff_text = coeff_text.trim_end_matches('*');
    let coeff = if coeff_text.is_empty() {
        BigRational::one()
    } else {
        parse_rational(coeff_text)?
    };
    let coeff = if sign < 0 { -coeff } else { coeff };
    match root {
        None => Ok(Surd::from_rational(coeff)),
        Some(rad) => {
            let n: u64 = rad
                .parse()
                .map_err(|_| Error::Parse(format!("radicand '{rad}' is not a nonnegative integer")))?;
            Ok(Surd::sqrt(n).scale(&coeff))
        }
    }
}

/// Parses `p`, `p/q`, or a terminating decimal into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("'{text}' is not a rational number"));
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.chars().any(|c| !c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let num: BigInt = digits.parse().map_err(|_| err())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let q = BigRational::new(num, den);
        return Ok(if neg { -q } else { q });
    }
    let n: BigInt = text.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    // huge numerator/denominator: shift both down before dividing
    let bits = q.numer().bits().max(q.denom().bits()) as i64 - 1000;
    let shift = bits.max(0) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, rhs: Surd) -> Surd {
        for (r, c) in rhs.terms {
            self.add_term(r, c);
        }
        self
    }
}

impl<'a> Add<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (r, c) in &rhs.terms {
            out.add_term(*r, c.clone());
        }
        out
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(mut self) -> Surd {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl<'a> Sub<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        self + &(-rhs.clone())
    }
}

impl<'a> Mul<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (ra, ca) in &self.terms {
            for (rb, cb) in &rhs.terms {
                let g = ra.gcd(rb);
                let radicand = (ra / g) * (rb / g);
                out.add_term(radicand, ca * cb * BigRational::from_integer(BigInt::from(g)));
            }
        }
        out
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        &self * &rhs
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            match (*r, mag.is_one()) {
                (1, _) => write!(f, "{mag}")?,
                (r, true) => write!(f, "√{r}")?,
                (r, false) => write!(f, "{mag}√{r}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Surd({self})")
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

impl Surd {
    /// Galois conjugate sending `√p ↦ −√p` for the prime `p`.
    pub fn conjugate_at(&self, p: u64) -> Self {
        let mut out = Self::zero();
        for (r, c) in &self.terms {
            if r % p == 0 {
                out.add_term(*r, -c.clone());
            } else {
                out.add_term(*r, c.clone());
            }
        }
        out
    }

    /// Multiplicative inverse, computed by clearing one prime at a time with conjugates.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut y = self.clone();
        let mut num = Self::one();
        while let Some(&r) = y.terms.keys().find(|&&r| r != 1) {
            let c = y.conjugate_at(smallest_prime_factor(r));
            num = &num * &c;
            y = &y * &c;
        }
        let q = y.as_rational()?;
        Some(num.scale(&q.recip()))
    }

    /// Exact sign: −1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let approx = self.to_f64();
        let mag: f64 = self.terms.iter().map(|(r, c)| (rational_to_f64(c) * (*r as f64).sqrt()).abs()).sum();
        if approx.abs() > 1e-9 * mag {
            return if approx > 0.0 { 1 } else { -1 };
        }
        // Near-cancellation: decide through x·conj products, whose sign is known recursively.
        let p = match self.terms.keys().find(|&&r| r != 1) {
            Some(&r) => smallest_prime_factor(r),
            None => return if self.as_rational().unwrap().is_positive() { 1 } else { -1 },
        };
        // x = a + b√p with a, b free of √p; sign(x) from sign(a), sign(b), sign(a² − p b²).
        let mut a = Self::zero();
        let mut b = Self::zero();
        for (r, c) in &self.terms {
            if r % p == 0 {
                b.add_term(r / p, c.clone());
            } else {
                a.add_term(*r, c.clone());
            }
        }
        let sa = a.signum();
        let sb = b.signum();
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        let disc = &(&a * &a) - &(&(&b * &b) * &Surd::from_int(p as i64));
        sa * disc.signum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_checks() {
        assert!(is_squarefree(2));
        assert!(is_squarefree(30));
        assert!(!is_squarefree(8));
        assert!(!is_squarefree(12));
        assert_eq!(squarefree_decompose(72), (6, 2));
        assert_eq!(squarefree_decompose(13), (1, 13));
    }

    #[test]
    fn products_reduce_radicands() {
        let r2 = Surd::sqrt(2);
        let r6 = Surd::sqrt(6);
        let r3 = Surd::sqrt(3);
        assert_eq!(&r2 * &r2, Surd::from_int(2));
        assert_eq!(&r2 * &r3, r6.clone());
        assert_eq!(&r6 * &r2, Surd::sqrt(3).scale(&BigRational::from_integer(2.into())));
        assert_eq!(Surd::sqrt(8), r2.scale(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn distinct_radicands_never_cancel() {
        let x = Surd::sqrt(2) - Surd::sqrt(3);
        assert!(!x.is_zero());
        assert!((x.to_f64() - (2f64.sqrt() - 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Surd::parse("√2").unwrap(), Surd::sqrt(2));
        assert_eq!(Surd::parse("sqrt(2)").unwrap(), Surd::sqrt(2));
        assert_eq!(Surd::parse("-√3").unwrap(), -Surd::sqrt(3));
        assert_eq!(Surd::parse("1/3").unwrap(), Surd::ratio(1, 3));
        assert_eq!(Surd::parse("0.25").unwrap(), Surd::ratio(1, 4));
        assert_eq!(
            Surd::parse("2/3 + 1/6√2 - 1/6*sqrt(6)").unwrap(),
            Surd::ratio(2, 3) + Surd::sqrt(2).scale(&BigRational::new(1.into(), 6.into()))
                - Surd::sqrt(6).scale(&BigRational::new(1.into(), 6.into()))
        );
        assert!(Surd::parse("abc").is_err());
        assert!(Surd::parse("1/0").is_err());
    }

    #[test]
    fn display_round_trips_through_parse() {
        let x = Surd::ratio(-5, 7) + Surd::sqrt(5).scale(&BigRational::new(3.into(), 2.into())) - Surd::sqrt(2);
        assert_eq!(Surd::parse(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn inverse_clears_every_radical() {
        let x = Surd::parse("1 + √2 - 3√3 + 1/2*√30").unwrap();
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, Surd::one());
        assert!(Surd::zero().inverse().is_none());
    }

    #[test]
    fn exact_sign_under_cancellation() {
        // 1393² = 1940449 < 2·985² = 1940450, so 1393 − 985√2 < 0.
        let x = Surd::parse("1393 - 985√2").unwrap();
        assert_eq!(x.signum(), -1);
        assert_eq!((-x).signum(), 1);
        let y = Surd::parse("√2 + √3 - √10").unwrap();
        assert_eq!(y.signum(), if 2f64.sqrt() + 3f64.sqrt() > 10f64.sqrt() { 1 } else { -1 });
        assert_eq!(Surd::zero().signum(), 0);
        let base = &Surd::sqrt(2) - &Surd::one();
        let mut tiny = Surd::one();
        for _ in 0..30 {
            tiny = &tiny * &base;
        }
        assert!(tiny.to_f64().abs() < 1e-6);
        assert_eq!(tiny.signum(), 1);
        assert_eq!((&tiny * &Surd::sqrt(3)).signum(), 1);
        assert_eq!((-tiny).signum(), -1);
    }
}
