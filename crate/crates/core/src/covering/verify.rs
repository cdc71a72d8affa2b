//! Cell-by-cell covering certification.
//!
//! In basis coordinates `u = B^{-1} x` the lattice becomes `Z^n` and `K`
//! becomes `K' = B^{-1} K`, with facets `(B^T a) · u <= b`. The unit cube is
//! cut into cells `(j + [0,1]^n) / m`. A cell lies in `K' + z` iff for every
//! facet `α · u <= β`
//!
//! ```text
//! α · (j - m z) + Σ max(α_i, 0) <= m β,
//! ```
//!
//! the left side being the maximum over the cell corners. Candidate `z` are
//! exactly those whose translated bounding box of `K'` contains the cell.

use std::ops::{Add, Mul, Sub};

use num::{BigInt, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::LatticeBasis;
use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::linalg;
use crate::rational::{primitive_integer_row, rat, Rational, RationalVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertifiedCovered,
    Counterexample,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CertifiedCovered => "certified_covered",
            Verdict::Counterexample => "counterexample",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoveringCertificate {
    pub verdict: Verdict,
    /// Cell side `δ = 1/m` in basis coordinates.
    pub resolution: Rational,
    /// Uncovered points (only for [`Verdict::Counterexample`]).
    pub witnesses: Vec<RationalVector>,
    pub cells_checked: usize,
    /// Cells not inside a single translate.
    pub uncertified_cells: usize,
}

/// Most witnesses kept in a certificate.
const MAX_WITNESSES: usize = 8;

/// Default cell side: 1/16 up to dimension 2, 1/8 in dimension 3, 1/4 above.
pub fn default_delta(n: usize) -> Rational {
    match n {
        0..=2 => rat(1, 16),
        3 => rat(1, 8),
        _ => rat(1, 4),
    }
}

trait Num:
    Clone
    + Ord
    + Zero
    + From<i64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
{
}
impl Num for i128 {}
impl Num for BigInt {}

struct Cells<T> {
    n: usize,
    m: i64,
    /// `(α, Σ max(α_i, 0), m β, 2 m β)` per facet.
    facets: Vec<(Vec<T>, T, T, T)>,
    /// Candidate translate ranges for a cell / a cell center, per axis and
    /// cell index along that axis.
    cell_z: Vec<Vec<(i64, i64)>>,
    center_z: Vec<Vec<(i64, i64)>>,
}

enum CellResult {
    Certified,
    Uncovered(Vec<i64>),
    Unknown,
}

impl<T: Num> Cells<T> {
    fn digits(&self, mut idx: usize) -> Vec<i64> {
        let m = self.m as usize;
        (0..self.n)
            .map(|_| {
                let d = idx % m;
                idx /= m;
                d as i64
            })
            .collect()
    }

    /// Calls `f` on each `z` in the product of ranges until it returns true.
    fn any_z(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64]) -> bool) -> bool {
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            return false;
        }
        let mut z: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            if f(&z) {
                return true;
            }
            let mut i = 0;
            loop {
                if i == z.len() {
                    return false;
                }
                if z[i] < ranges[i].1 {
                    z[i] += 1;
                    break;
                }
                z[i] = ranges[i].0;
                i += 1;
            }
        }
    }

    fn cell_in(&self, j: &[i64], z: &[i64]) -> bool {
        let m = T::from(self.m);
        self.facets.iter().all(|(a, pos, mb, _)| {
            let mut s = pos.clone();
            for i in 0..self.n {
                s = s + a[i].clone() * (T::from(j[i]) - m.clone() * T::from(z[i]));
            }
            s <= *mb
        })
    }

    fn center_in(&self, j: &[i64], z: &[i64]) -> bool {
        let m2 = T::from(2 * self.m);
        self.facets.iter().all(|(a, _, _, mb2)| {
            let mut s = T::zero();
            for i in 0..self.n {
                s = s + a[i].clone() * (T::from(2 * j[i] + 1) - m2.clone() * T::from(z[i]));
            }
            s <= *mb2
        })
    }

    fn ranges(&self, table: &[Vec<(i64, i64)>], j: &[i64]) -> Vec<(i64, i64)> {
        (0..self.n).map(|i| table[i][j[i] as usize]).collect()
    }

    fn certified(&self, j: &[i64]) -> bool {
        Self::any_z(&self.ranges(&self.cell_z, j), |z| self.cell_in(j, z))
    }

    fn classify(&self, j: &[i64]) -> CellResult {
        if self.certified(j) {
            return CellResult::Certified;
        }
        if Self::any_z(&self.ranges(&self.center_z, j), |z| self.center_in(j, z)) {
            CellResult::Unknown
        } else {
            CellResult::Uncovered(j.to_vec())
        }
    }

    fn count(&self) -> usize {
        (self.m as usize).pow(self.n as u32)
    }

    /// `Some(true)` if every cell is certified, `Some(false)` if the first
    /// failing cell found has an uncovered center, `None` otherwise.
    fn decide(&self) -> Option<bool> {
        let failing = (0..self.count())
            .into_par_iter()
            .map(|c| self.digits(c))
            .find_any(|j| !self.certified(j));
        match failing.map(|j| self.classify(&j)) {
            None => Some(true),
            Some(CellResult::Uncovered(_)) => Some(false),
            Some(_) => None,
        }
    }

    fn run(&self) -> Vec<CellResult> {
        (0..self.count())
            .into_par_iter()
            .map(|c| self.classify(&self.digits(c)))
            .collect()
    }
}

/// Everything the cell checks need, with integer facet data.
enum Prepared {
    Small(Cells<i128>),
    Big(Cells<BigInt>),
}

fn ceil_int(r: &Rational) -> i64 {
    r.ceil()
        .to_integer()
        .to_i64()
        .expect("translate index fits i64")
}

fn floor_int(r: &Rational) -> i64 {
    r.floor()
        .to_integer()
        .to_i64()
        .expect("translate index fits i64")
}

fn prepare(
    k: &Polytope,
    l: &LatticeBasis,
    delta: &Rational,
) -> Result<(Prepared, Vec<Vec<Rational>>)> {
    let n = k.dim_ambient();
    if n != l.dim() {
        return Err(Error::DimensionMismatch {
            op: "verify_covering",
            expected: n,
            found: l.dim(),
        });
    }
    if !k.is_full_dimensional() {
        return Err(Error::Degenerate {
            op: "verify_covering",
            affine_dim: k.affine_dim(),
            required: n,
        });
    }
    if !delta.is_positive() || !delta.numer().to_i64().is_some_and(|v| v == 1) {
        return Err(Error::precondition(
            "verify_covering",
            format!("δ = {delta} must be 1/m for a positive integer m"),
        ));
    }
    let m = delta
        .denom()
        .to_i64()
        .filter(|&m| m <= 1 << 20)
        .ok_or_else(|| Error::precondition("verify_covering", "δ is too small"))?;
    let b = l.matrix();
    let bt = linalg::transpose(&b);
    let binv = linalg::inverse(&b).expect("lattice basis is invertible");

    // K' = B^{-1} K: bounding box from the mapped vertices
    let verts: Vec<Vec<Rational>> = k
        .vertices()
        .iter()
        .map(|v| linalg::mat_vec(&binv, v.coords()))
        .collect();
    let lo: Vec<Rational> = (0..n)
        .map(|i| verts.iter().map(|v| &v[i]).min().unwrap().clone())
        .collect();
    let hi: Vec<Rational> = (0..n)
        .map(|i| verts.iter().map(|v| &v[i]).max().unwrap().clone())
        .collect();
    // z ranges reduce to integer floor/ceil: for integer t and rational x,
    // floor((t - x) / q) = floor((t - ceil x) / q), and likewise for ceil
    let scaled = |x: &Rational, q: i64| x * Rational::from_integer(q.into());
    let table = |q: i64, t: &dyn Fn(i64) -> (i64, i64)| -> Vec<Vec<(i64, i64)>> {
        (0..n)
            .map(|i| {
                let h = floor_int(&scaled(&hi[i], q));
                let l = ceil_int(&scaled(&lo[i], q));
                (0..m)
                    .map(|j| {
                        let (a, b) = t(j);
                        (-(h - a).div_euclid(q), (b - l).div_euclid(q))
                    })
                    .collect()
            })
            .collect()
    };
    let cell_z = table(m, &|j| (j + 1, j));
    let center_z = table(2 * m, &|j| (2 * j + 1, 2 * j + 1));

    let rows: Vec<Vec<BigInt>> = k
        .facets()
        .iter()
        .map(|f| {
            let mut row = linalg::mat_vec(&bt, f.normal().coords());
            row.push(f.offset().clone());
            primitive_integer_row(&row)
        })
        .collect();
    let zmax = cell_z
        .iter()
        .chain(&center_z)
        .flatten()
        .map(|(a, b)| a.abs().max(b.abs()))
        .max()
        .unwrap_or(0) as u64
        + 1;
    let amax = rows
        .iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_default();
    // |α·(2j+1 - 2m z)| + Σ|α| + 2m|β| bound
    let bound =
        amax * BigInt::from(n as u64 + 1) * BigInt::from(2 * m as u64) * BigInt::from(zmax + 2);
    let mk = |row: &Vec<BigInt>| -> (Vec<BigInt>, BigInt, BigInt, BigInt) {
        let a = row[..n].to_vec();
        let pos = a.iter().filter(|x| x.is_positive()).cloned().sum();
        let beta = &row[n];
        (a, pos, beta * m, beta * (2 * m))
    };
    let big: Vec<(Vec<BigInt>, BigInt, BigInt, BigInt)> = rows.iter().map(mk).collect();
    let prepared = if bound.bits() < 120 {
        let to = |x: &BigInt| x.to_i128().expect("bounded");
        Prepared::Small(Cells {
            n,
            m,
            facets: big
                .iter()
                .map(|(a, p, mb, mb2)| (a.iter().map(to).collect(), to(p), to(mb), to(mb2)))
                .collect(),
            cell_z,
            center_z,
        })
    } else {
        Prepared::Big(Cells {
            n,
            m,
            facets: big,
            cell_z,
            center_z,
        })
    };
    Ok((prepared, b))
}

/// Quick decision for search: see `Cells::decide`.
pub(crate) fn decide(k: &Polytope, l: &LatticeBasis, delta: &Rational) -> Result<Option<bool>> {
    Ok(match prepare(k, l, delta)?.0 {
        Prepared::Small(c) => c.decide(),
        Prepared::Big(c) => c.decide(),
    })
}

/// Certifies or refutes `K + Λ = R^n` at cell side `δ = 1/m`.
pub fn verify_covering(
    k: &Polytope,
    l: &LatticeBasis,
    delta: &Rational,
) -> Result<CoveringCertificate> {
    let (prepared, b) = prepare(k, l, delta)?;
    let (results, m) = match &prepared {
        Prepared::Small(c) => (c.run(), c.m),
        Prepared::Big(c) => (c.run(), c.m),
    };
    let cells_checked = results.len();
    let mut uncertified = 0;
    let mut unknown = false;
    let mut witnesses = Vec::new();
    let two_m = Rational::from_integer((2 * m).into());
    for r in results {
        match r {
            CellResult::Certified => {}
            CellResult::Unknown => {
                uncertified += 1;
                unknown = true;
            }
            CellResult::Uncovered(j) => {
                uncertified += 1;
                if witnesses.len() < MAX_WITNESSES {
                    let u: Vec<Rational> = j
                        .iter()
                        .map(|&ji| Rational::from_integer((2 * ji + 1).into()) / &two_m)
                        .collect();
                    witnesses.push(RationalVector::new(linalg::mat_vec(&b, &u)));
                }
            }
        }
    }
    let verdict = if !witnesses.is_empty() {
        Verdict::Counterexample
    } else if unknown {
        Verdict::Inconclusive
    } else {
        Verdict::CertifiedCovered
    };
    Ok(CoveringCertificate {
        verdict,
        resolution: delta.clone(),
        witnesses,
        cells_checked,
        uncertified_cells: uncertified,
    })
}

/// Runs [`verify_covering`] at `δ`, halving `δ` up to `refinements` times
/// while the verdict is inconclusive.
pub fn verify_refining(
    k: &Polytope,
    l: &LatticeBasis,
    delta: &Rational,
    refinements: usize,
) -> Result<CoveringCertificate> {
    let mut d = delta.clone();
    let mut cert = verify_covering(k, l, &d)?;
    for _ in 0..refinements {
        if cert.verdict != Verdict::Inconclusive {
            break;
        }
        d = d / Rational::from_integer(2.into());
        cert = verify_covering(k, l, &d)?;
    }
    Ok(cert)
}
