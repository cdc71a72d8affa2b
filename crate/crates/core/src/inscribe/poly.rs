//! Univariate polynomials over the rationals: interpolation, exact division,
//! sign-change bisection and (for tests) Sturm-sequence root isolation.

use num::{One, Signed, Zero};

use crate::rational::{simplest_between, Rational};

/// Coefficients in ascending order, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    /// Quotient by `x - c`, for a root `c`.
    pub fn deflate(&self, c: &Rational) -> Poly {
        let mut quot = vec![Rational::zero(); self.0.len().saturating_sub(1)];
        let mut carry = Rational::zero();
        for i in (1..self.0.len()).rev() {
            carry = &carry * c + &self.0[i];
            quot[i - 1] = carry.clone();
        }
        debug_assert!((&carry * c + &self.0[0]).is_zero(), "not a root");
        Poly::new(quot)
    }

    /// `self` with every root at `lo` or `hi` divided out, rescaled so that
    /// the sign on `(lo, hi)` is unchanged.
    pub fn strip_endpoint_roots(&self, lo: &Rational, hi: &Rational) -> Poly {
        let mut p = self.clone();
        let mut flip = false;
        while !p.is_zero() && p.eval(lo).is_zero() {
            p = p.deflate(lo);
        }
        while !p.is_zero() && p.eval(hi).is_zero() {
            p = p.deflate(hi);
            flip = !flip;
        }
        if flip {
            Poly(p.0.into_iter().map(|c| -c).collect())
        } else {
            p
        }
    }

    /// Multiplication by `x`.
    pub fn shift(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![Rational::zero()];
        c.extend(self.0.iter().cloned());
        Poly(c)
    }

    /// The unique polynomial of degree `< xs.len()` through the given points
    /// (Newton divided differences).
    pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Poly {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd: Vec<Rational> = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        // Horner-style expansion of the Newton form
        let mut acc = Poly(Vec::new());
        for i in (0..n).rev() {
            // acc = acc * (x - xs[i]) + dd[i]
            let mut next = vec![Rational::zero(); acc.0.len() + 1];
            for (j, c) in acc.0.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c * &xs[i];
            }
            next[0] += &dd[i];
            acc = Poly::new(next);
        }
        acc
    }
}

#[cfg(test)]
impl Poly {
    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &Rational {
        self.0.last().expect("nonzero polynomial")
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut rem = self.0.clone();
        let dd = d.degree();
        if rem.len() < d.0.len() {
            return (Poly(Vec::new()), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / d.lead();
            for (j, dc) in d.0.iter().enumerate() {
                let delta = &c * dc;
                rem[i + j] -= delta;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    fn monic(&self) -> Poly {
        let l = self.lead().clone();
        Poly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// The product of the distinct irreducible factors.
    pub fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }
}

#[cfg(test)]
struct Sturm(Vec<Poly>);

#[cfg(test)]
impl Sturm {
    fn new(p: &Poly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().unwrap().is_zero() {
            let k = seq.len();
            let r = seq[k - 2].div_rem(&seq[k - 1]).1;
            seq.push(Poly(r.0.into_iter().map(|c| -c).collect()));
        }
        seq.pop();
        Sturm(seq)
    }

    fn sign_changes(&self, x: &Rational) -> usize {
        let mut last = 0;
        let mut changes = 0;
        for p in &self.0 {
            let s = p.eval(x);
            let s = if s.is_positive() {
                1
            } else if s.is_negative() {
                -1
            } else {
                continue;
            };
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    /// Distinct roots in the half-open interval `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.sign_changes(a) - self.sign_changes(b)
    }
}

/// The root of `p` in `(lo, hi)` given `p(lo) > 0 > p(hi)` and a single
/// sign change in between, to within `tol`. Exact under the same condition
/// as [`roots_between`].
pub(crate) fn descending_root(p: &Poly, lo: &Rational, hi: &Rational, tol: &Rational) -> Rational {
    debug_assert!(p.eval(lo).is_positive() && p.eval(hi).is_negative());
    let two = Rational::from_integer(2.into());
    let (mut a, mut b) = (lo.clone(), hi.clone());
    while &(&b - &a) > tol {
        let m = (&a + &b) / &two;
        let s = p.eval(&m);
        if s.is_zero() {
            return m;
        }
        if s.is_positive() {
            a = m;
        } else {
            b = m;
        }
    }
    simplest_between(&a, &b)
}

/// Real roots of `p` in the open interval `(lo, hi)`, each to within
/// `tol`. A root is returned exactly whenever it is the simplest rational of
/// its final isolating interval, which includes every rational root once
/// `tol` is below the square of its inverse denominator.
#[cfg(test)]
pub(crate) fn roots_between(
    p: &Poly,
    lo: &Rational,
    hi: &Rational,
    tol: &Rational,
) -> Vec<Rational> {
    if p.degree() == 0 || lo >= hi {
        return Vec::new();
    }
    let q = p.squarefree();
    let s = Sturm::new(&q);
    let two = Rational::from_integer(2.into());
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let c = s.count(&a, &b);
        if c == 0 {
            continue;
        }
        if c > 1 {
            let m = (&a + &b) / &two;
            stack.push((a, m.clone()));
            stack.push((m, b));
            continue;
        }
        // exactly one root in (a, b]
        let (mut a, mut b) = (a, b);
        let root = loop {
            if q.eval(&b).is_zero() {
                break b;
            }
            if &(&b - &a) <= tol {
                break simplest_between(&a, &b);
            }
            let m = (&a + &b) / &two;
            if s.count(&a, &m) == 1 {
                b = m;
            } else {
                a = m;
            }
        };
        if &root < hi && &root > lo {
            out.push(root);
        }
    }
    out.sort();
    out
}

/// `2^-bits` as a rational.
pub(crate) fn pow2_inv(bits: u32) -> Rational {
    Rational::new(One::one(), num::BigInt::one() << bits)
}
