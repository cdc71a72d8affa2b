//! Anti-blocking and locally anti-blocking polytopes.
//!
//! A polytope `P ⊆ R^n_{>=0}` is anti-blocking when it contains the box
//! `[0, x_1] × … × [0, x_n]` of each of its points. It is locally
//! anti-blocking when every orthant piece `σ(P) ∩ R^n_{>=0}` is anti-blocking.
//! Both conditions reduce to closure under zeroing one coordinate of a vertex,
//! since that map is linear and composes to arbitrary coordinate subsets.

use std::fmt;
use std::str::FromStr;

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{Hyperplane, Polytope};
use crate::rational::{rat, Rational, RationalVector};

/// Largest ambient dimension for which the orthant enumeration is attempted.
pub const MAX_ORTHANT_DIM: usize = 10;

/// Attempts made by [`generate`] before giving up.
pub const RETRY_BUDGET: usize = 100;

/// An anti-blocking polytope (validated on construction).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiBlockingPolytope(Polytope);

impl AntiBlockingPolytope {
    pub fn new(p: Polytope) -> Result<Self> {
        if is_anti_blocking(&p) {
            Ok(Self(p))
        } else {
            Err(Error::precondition(
                "AntiBlockingPolytope::new",
                "polytope is not anti-blocking",
            ))
        }
    }

    pub fn polytope(&self) -> &Polytope {
        &self.0
    }

    pub fn into_polytope(self) -> Polytope {
        self.0
    }
}

/// A locally anti-blocking polytope (validated on construction).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocallyAntiBlockingPolytope(Polytope);

impl LocallyAntiBlockingPolytope {
    /// Validates with [`closed_under_zeroing`], which agrees with
    /// [`is_locally_anti_blocking`] but needs only `n · |V|` membership tests.
    pub fn new(p: Polytope) -> Result<Self> {
        if closed_under_zeroing(&p) {
            Ok(Self(p))
        } else {
            Err(Error::precondition(
                "LocallyAntiBlockingPolytope::new",
                "polytope is not locally anti-blocking",
            ))
        }
    }

    pub fn polytope(&self) -> &Polytope {
        &self.0
    }

    pub fn into_polytope(self) -> Polytope {
        self.0
    }
}

impl From<AntiBlockingPolytope> for LocallyAntiBlockingPolytope {
    fn from(p: AntiBlockingPolytope) -> Self {
        Self(p.0)
    }
}

/// The box with opposite corners `0` and `anchor`, in any orthant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignBox {
    anchor: RationalVector,
}

impl SignBox {
    pub fn new(anchor: RationalVector) -> Self {
        Self { anchor }
    }

    pub fn anchor(&self) -> &RationalVector {
        &self.anchor
    }

    pub fn dims_kept(&self) -> usize {
        self.anchor.dim()
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        x.dim() == self.anchor.dim()
            && x.iter().zip(self.anchor.iter()).all(|(xi, yi)| {
                if yi.is_negative() {
                    yi <= xi && !xi.is_positive()
                } else {
                    !xi.is_negative() && xi <= yi
                }
            })
    }

    pub fn to_polytope(&self) -> Polytope {
        let (lo, hi): (Vec<Rational>, Vec<Rational>) = self
            .anchor
            .iter()
            .map(|y| {
                if y.is_negative() {
                    (y.clone(), Rational::zero())
                } else {
                    (Rational::zero(), y.clone())
                }
            })
            .unzip();
        Polytope::box_from_bounds(&lo, &hi).expect("ordered bounds")
    }
}

/// Above this many zeroed points the closure is built axis by axis.
const ONE_SHOT_POINTS: usize = 4096;

/// Closes a point set under single-coordinate zeroing.
fn zeroing_closure(p: &Polytope) -> Result<Polytope> {
    let n = p.dim_ambient();
    let fits = n < usize::BITS as usize
        && p.num_vertices()
            .checked_mul(1 << n)
            .is_some_and(|c| c <= ONE_SHOT_POINTS);
    if fits {
        Polytope::from_points(box_corners(p.vertices()))
    } else {
        zeroing_closure_by_axis(p)
    }
}

/// All zeroings of the given points, without those that sit in the box
/// `[0, y]` of another point `y` without being one of its corners (such a
/// point is a convex combination of the corners).
fn box_corners(points: &[RationalVector]) -> Vec<RationalVector> {
    let mut all: Vec<RationalVector> = Vec::new();
    for y in points {
        let support: Vec<usize> = (0..y.dim()).filter(|&i| !y[i].is_zero()).collect();
        for mask in 0u64..1 << support.len() {
            let mut x = y.clone();
            for (b, &i) in support.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    x[i] = Rational::zero();
                }
            }
            all.push(x);
        }
    }
    all.sort();
    all.dedup();
    let interior = |x: &RationalVector, y: &RationalVector| {
        let inside = x.iter().zip(y.iter()).all(|(a, b)| {
            a.is_zero()
                || (a.is_positive() == b.is_positive() && !b.is_zero() && a.abs() <= b.abs())
        });
        inside && x.iter().zip(y.iter()).any(|(a, b)| !a.is_zero() && a != b)
    };
    all.into_iter()
        .filter(|x| !points.iter().any(|y| interior(x, y)))
        .collect()
}

/// Zeroing closure one axis at a time, keeping only hull vertices after
/// each axis.
fn zeroing_closure_by_axis(p: &Polytope) -> Result<Polytope> {
    let mut cur = p.clone();
    for axis in 0..p.dim_ambient() {
        let mut pts = cur.vertices().to_vec();
        pts.extend(
            cur.vertices()
                .iter()
                .map(|v| v.with_coord(axis, Rational::zero())),
        );
        cur = Polytope::from_points(pts)?;
    }
    Ok(cur)
}

/// Every vertex with one coordinate zeroed stays in `p`. Equivalent to the
/// locally anti-blocking property: the orthant piece containing `x` also
/// contains `x` with a coordinate zeroed, and conversely closure under
/// zeroing puts the box `[0, σx]` in each piece.
pub fn closed_under_zeroing(p: &Polytope) -> bool {
    p.vertices().iter().all(|v| {
        (0..v.dim())
            .all(|i| v[i].is_zero() || p.contains_unchecked(&v.with_coord(i, Rational::zero())))
    })
}

fn is_nonnegative(p: &Polytope) -> bool {
    p.vertices()
        .iter()
        .all(|v| v.iter().all(|x| !x.is_negative()))
}

/// Smallest anti-blocking polytope containing `p`.
pub fn down_closure(p: &Polytope) -> Result<AntiBlockingPolytope> {
    if !is_nonnegative(p) {
        return Err(Error::precondition(
            "down_closure",
            "polytope has a negative coordinate",
        ));
    }
    Ok(AntiBlockingPolytope(zeroing_closure(p)?))
}

/// Hull of `p` with all sign boxes `[0, v]` of its vertices.
pub fn local_down_closure(p: &Polytope) -> Result<LocallyAntiBlockingPolytope> {
    let q = zeroing_closure(p)?;
    if !closed_under_zeroing(&q) {
        return Err(Error::precondition(
            "local_down_closure",
            "closure fails the locally anti-blocking check",
        ));
    }
    Ok(LocallyAntiBlockingPolytope(q))
}

pub fn is_anti_blocking(p: &Polytope) -> bool {
    is_nonnegative(p) && closed_under_zeroing(p)
}

/// Checks every orthant piece `σ(P) ∩ R^n_{>=0}` for the anti-blocking
/// property. Enumerates `2^n` sign vectors, so `n` is capped at
/// [`MAX_ORTHANT_DIM`].
pub fn is_locally_anti_blocking(p: &Polytope) -> Result<bool> {
    let n = p.dim_ambient();
    if n > MAX_ORTHANT_DIM {
        return Err(Error::precondition(
            "is_locally_anti_blocking",
            format!("dimension {n} exceeds the enumeration limit {MAX_ORTHANT_DIM}"),
        ));
    }
    let orthant: Vec<Hyperplane> = (0..n)
        .map(|i| Hyperplane::new(-&RationalVector::unit(n, i), Rational::zero()).unwrap())
        .collect();
    for mask in 0u32..(1 << n) {
        let flipped = p.map_vertices(|v| {
            let mut w = v.clone();
            for i in (0..n).filter(|i| mask >> i & 1 == 1) {
                w[i] = -w[i].clone();
            }
            w
        })?;
        let piece = match flipped.intersect_halfspaces(&orthant) {
            Ok(q) => q,
            Err(Error::Precondition { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        if !is_anti_blocking(&piece) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Instance families produced by [`generate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BodyKind {
    /// Down-closure of random points in `[0,1]^n`.
    Ab,
    /// Local down-closure of random points in `[-1,1]^n`.
    Lab,
    /// Hull of random points in `[0,1]^n` and all their sign flips.
    Unc,
    /// Hull of `n + 2` random points with exactly `n + 2` vertices.
    Np2,
}

impl FromStr for BodyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ab" => Ok(Self::Ab),
            "lab" => Ok(Self::Lab),
            "unc" => Ok(Self::Unc),
            "np2" => Ok(Self::Np2),
            _ => Err(Error::precondition(
                "generate",
                format!("unknown body kind `{s}` (expected ab, lab, unc or np2)"),
            )),
        }
    }
}

impl fmt::Display for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ab => "ab",
            Self::Lab => "lab",
            Self::Unc => "unc",
            Self::Np2 => "np2",
        })
    }
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, lo: i64) -> RationalVector {
    RationalVector::new(
        (0..dim)
            .map(|_| rat(rng.random_range(lo..=1000), 1000))
            .collect(),
    )
}

/// Deterministic random instance of the given kind.
pub fn generate(kind: BodyKind, dim: usize, seed: u64) -> Result<Polytope> {
    if dim < 2 {
        return Err(Error::precondition(
            "generate",
            "dimension must be at least 2",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 2 * dim;
    for _ in 0..RETRY_BUDGET {
        let attempt = match kind {
            BodyKind::Ab => {
                let pts: Vec<_> = (0..m).map(|_| random_point(&mut rng, dim, 0)).collect();
                Polytope::from_points(pts)
                    .and_then(|p| down_closure(&p))
                    .map(AntiBlockingPolytope::into_polytope)
            }
            BodyKind::Lab => {
                let pts: Vec<_> = (0..m).map(|_| random_point(&mut rng, dim, -1000)).collect();
                Polytope::from_points(pts)
                    .and_then(|p| local_down_closure(&p))
                    .map(LocallyAntiBlockingPolytope::into_polytope)
            }
            BodyKind::Unc => {
                let mut pts = Vec::new();
                for _ in 0..m {
                    let v = random_point(&mut rng, dim, 0);
                    for mask in 0u32..(1 << dim) {
                        let mut w = v.clone();
                        for i in (0..dim).filter(|i| mask >> i & 1 == 1) {
                            w[i] = -w[i].clone();
                        }
                        pts.push(w);
                    }
                }
                Polytope::from_points(pts)
            }
            BodyKind::Np2 => {
                let pts: Vec<_> = (0..dim + 2)
                    .map(|_| random_point(&mut rng, dim, 0))
                    .collect();
                Polytope::from_points(pts)
            }
        };
        let Ok(p) = attempt else { continue };
        let ok = p.is_full_dimensional()
            && match kind {
                BodyKind::Np2 => p.num_vertices() == dim + 2,
                _ => true,
            };
        if ok {
            return Ok(p);
        }
    }
    Err(Error::precondition(
        "generate",
        format!("no valid {kind} instance after {RETRY_BUDGET} attempts"),
    ))
}
