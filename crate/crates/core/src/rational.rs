//! Exact rational scalars and vectors.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `p/q` or a plain integer.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let r = Rational::from_str(s.trim()).map_err(|e| format!("invalid rational `{s}`: {e}"))?;
    Ok(r)
}

/// `p/q` form, always with a denominator (`2/1`, `-3/4`).
pub fn fmt_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Integer when the denominator is one, `p/q` otherwise.
pub fn fmt_compact(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        fmt_pq(r)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator overflows f64: shift both down first
        let (n, d) = (r.numer(), r.denom());
        let sign = if n.sign() == Sign::Minus { -1.0 } else { 1.0 };
        let bits = n.bits().max(d.bits()) as i64 - 1000;
        let shift = bits.max(0) as usize;
        let nn = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
        let dd = (d >> shift).to_f64().unwrap_or(f64::INFINITY);
        sign * nn / dd
    })
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales a rational row by a positive factor so that it becomes a primitive
/// integer row (gcd one). Zero rows stay zero.
pub fn primitive_integer_row(row: &[Rational]) -> Vec<BigInt> {
    let den = common_denominator(row);
    let mut ints: Vec<BigInt> = row.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    normalize_primitive(&mut ints);
    ints
}

pub fn normalize_primitive(v: &mut [BigInt]) {
    let small: Option<Vec<u64>> = v.iter().map(|x| x.magnitude().to_u64()).collect();
    let g = match small {
        Some(xs) => BigInt::from(xs.into_iter().fold(0u64, |acc, x| acc.gcd(&x))),
        None => v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)),
    };
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]` (Stern–Brocot descent via continued fractions).
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi, "simplest_between: empty interval");
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl < hi.floor() {
        return fl + Rational::one();
    }
    // same integer part: recurse on reciprocals of the fractional parts
    let frac_lo = lo - &fl;
    let frac_hi = hi - &fl;
    let inner = simplest_positive(&frac_hi.recip(), &frac_lo.recip());
    fl + inner.recip()
}

/// A point of `R^n` with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        RationalVector(vec![Rational::zero(); dim])
    }

    /// The coordinate unit vector `e_axis` (zero-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = Rational::one();
        v
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RationalVector(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [Rational] {
        &mut self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn dot(&self, other: &RationalVector) -> Rational {
        dot(&self.0, &other.0)
    }

    pub fn scale(&self, s: &Rational) -> RationalVector {
        RationalVector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Copy with coordinate `axis` removed.
    pub fn drop_axis(&self, axis: usize) -> RationalVector {
        let mut c = self.0.clone();
        c.remove(axis);
        RationalVector(c)
    }

    /// Copy with `value` inserted at position `axis`.
    pub fn insert_axis(&self, axis: usize, value: Rational) -> RationalVector {
        let mut c = self.0.clone();
        c.insert(axis, value);
        RationalVector(c)
    }

    pub fn with_coord(&self, axis: usize, value: Rational) -> RationalVector {
        let mut c = self.0.clone();
        c[axis] = value;
        RationalVector(c)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn midpoint(&self, other: &RationalVector) -> RationalVector {
        let half = rat(1, 2);
        (self + other).scale(&half)
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RationalVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl<'a> Add<&'a RationalVector> for &'a RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a RationalVector> for &'a RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl<'a> Mul<&'a Rational> for &'a RationalVector {
    type Output = RationalVector;
    fn mul(self, rhs: &Rational) -> RationalVector {
        self.scale(rhs)
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|c| -c).collect())
    }
}

impl From<Vec<Rational>> for RationalVector {
    fn from(v: Vec<Rational>) -> Self {
        RationalVector(v)
    }
}

impl FromStr for RationalVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split_whitespace()
            .map(parse_rational)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|reason| Error::Parse { line: 0, reason })?;
        Ok(RationalVector(coords))
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_compact(c))?;
        }
        write!(f, ")")
    }
}
