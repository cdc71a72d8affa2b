//! Randomized local search for low-density covering lattices in small
//! dimensions.
//!
//! Bases live on a grid: entry `(i, j)` is an integer multiple of
//! `w_i / 2^GRID_BITS`, with `w_i` the width of the body along axis `i`.
//! A proposal moves one entry by a step from the schedule `w_i / 4, w_i / 8,
//! …` and then inflates the whole basis as far as the covering still
//! certifies. Proposals that do not raise the density are accepted, so the walk can
//! drift along plateaus.

use num::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::verify::decide;
use super::{default_delta, density, verify_refining, CoveringCertificate, LatticeBasis};
use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::rational::{to_f64, Rational};

const GRID_BITS: u32 = 12;
const FIRST_LEVEL: u32 = 2;
const LAST_LEVEL: u32 = 10;
const REFINEMENTS: usize = 2;

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub lattice: LatticeBasis,
    pub density: Rational,
    pub certificate: CoveringCertificate,
    /// Proposals evaluated (at most the budget).
    pub proposals: usize,
    pub accepted: usize,
}

struct Grid<'a> {
    body: &'a Polytope,
    cell: Vec<Rational>,
    volume: Rational,
    delta: Rational,
}

impl Grid<'_> {
    fn basis(&self, k: &[Vec<i64>]) -> Option<LatticeBasis> {
        let m: Vec<Vec<Rational>> = k
            .iter()
            .zip(&self.cell)
            .map(|(row, g)| {
                row.iter()
                    .map(|&x| g * Rational::from_integer(x.into()))
                    .collect()
            })
            .collect();
        LatticeBasis::from_matrix(&m).ok()
    }

    fn density(&self, k: &[Vec<i64>]) -> Option<Rational> {
        self.basis(k).map(|b| &self.volume / b.det())
    }

    /// Certification at `δ`, then at up to [`REFINEMENTS`] halvings while
    /// no uncovered point turns up.
    fn certifies(&self, k: &[Vec<i64>]) -> bool {
        let Some(b) = self.basis(k) else {
            return false;
        };
        let mut d = self.delta.clone();
        for _ in 0..=REFINEMENTS {
            match decide(self.body, &b, &d) {
                Ok(Some(ok)) => return ok,
                Ok(None) => {}
                Err(_) => return false,
            }
            d /= Rational::from_integer(2.into());
        }
        false
    }

    fn scaled(k: &[Vec<i64>], s: f64) -> Vec<Vec<i64>> {
        k.iter()
            .map(|row| row.iter().map(|&x| (x as f64 * s).round() as i64).collect())
            .collect()
    }

    /// The largest inflation `s K` (found by growth then bisection) that
    /// still certifies, provided some inflation reaches `target` density.
    fn inflate(&self, k: &[Vec<i64>], target: &Rational) -> Option<(Vec<Vec<i64>>, Rational)> {
        let n = k.len() as f64;
        let d = self.density(k)?;
        let mut lo = (to_f64(&d) / to_f64(target)).powf(1.0 / n);
        let mut cand = Self::scaled(k, lo);
        let mut tries = 0;
        while self.density(&cand).is_none_or(|dc| &dc > target) {
            tries += 1;
            if tries > 8 {
                return None;
            }
            lo *= 1.0 + 1.0 / f64::from(1 << GRID_BITS);
            cand = Self::scaled(k, lo);
        }
        if !self.certifies(&cand) {
            return None;
        }
        let mut hi = lo * 1.25;
        let mut grow = 0;
        while self.certifies(&Self::scaled(k, hi)) {
            lo = hi;
            hi *= 1.25;
            grow += 1;
            if grow > 40 {
                break;
            }
        }
        for _ in 0..10 {
            let mid = 0.5 * (lo + hi);
            if self.certifies(&Self::scaled(k, mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let best = Self::scaled(k, lo);
        let d = self.density(&best)?;
        (&d <= target).then_some((best, d))
    }
}

/// The box of the body's bounding-box shape, centred at the vertex
/// centroid and scaled as large as fits: returns the scale and widths.
fn inscribed_box(k: &Polytope) -> (Rational, Vec<Rational>) {
    let (lo, hi) = k.bounding_box();
    let w: Vec<Rational> = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
    let c = k.vertex_centroid();
    let two = Rational::from_integer(2.into());
    let lambda = k
        .facets()
        .iter()
        .map(|f| {
            let reach: Rational = f
                .normal()
                .iter()
                .zip(&w)
                .map(|(a, wi)| a.abs() * wi / &two)
                .sum();
            (f.offset() - f.normal().dot(&c)) / reach
        })
        .min()
        .expect("full-dimensional body has facets");
    (lambda, w)
}

/// Searches for a covering lattice of `k` with small density using
/// `budget` proposals. Falls back to (and always returns at least) the
/// half-size inscribed-box lattice, which covers at any cell size.
pub fn search_covering_lattice(k: &Polytope, budget: usize, seed: u64) -> Result<SearchResult> {
    let n = k.dim_ambient();
    if !(1..=3).contains(&n) {
        return Err(Error::precondition(
            "search_covering_lattice",
            format!("dimension {n} outside 1..=3"),
        ));
    }
    if !k.is_full_dimensional() {
        return Err(Error::Degenerate {
            op: "search_covering_lattice",
            affine_dim: k.affine_dim(),
            required: n,
        });
    }
    let delta = default_delta(n);
    let (lambda, w) = inscribed_box(k);
    let unit = Rational::from_integer((1i64 << GRID_BITS).into());
    let grid = Grid {
        body: k,
        cell: w.iter().map(|wi| wi / &unit).collect(),
        volume: k.volume()?,
        delta: delta.clone(),
    };
    // half the inscribed box, rounded down onto the grid
    let half = (&lambda * &unit / Rational::from_integer(2.into())).floor();
    let d0 = half.to_integer().to_i64().unwrap_or(1).max(1);
    let mut cur: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { d0 } else { 0 }).collect())
        .collect();
    let mut cur_density = grid.density(&cur).expect("diagonal basis");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut proposals = 0;
    let mut accepted = 0;
    if let Some((b, d)) = grid.inflate(&cur, &cur_density) {
        cur = b;
        cur_density = d;
    }
    let mut level = FIRST_LEVEL;
    let mut stale = 0;
    let patience = 8 * n * n;
    while proposals < budget {
        proposals += 1;
        let step = 1i64 << (GRID_BITS - level);
        let mut cand = cur.clone();
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        cand[i][j] += if rng.random_bool(0.5) { step } else { -step };
        if rng.random_bool(0.5) {
            for row in cand.iter_mut() {
                for x in row.iter_mut() {
                    *x += rng.random_range(-1..=1) * step;
                }
            }
        }
        if let Some((b, d)) = grid.inflate(&cand, &cur_density) {
            accepted += 1;
            cur = b;
            if d < cur_density {
                cur_density = d;
                stale = 0;
                continue;
            }
        }
        stale += 1;
        if stale >= patience {
            stale = 0;
            level = if level < LAST_LEVEL {
                level + 1
            } else {
                FIRST_LEVEL
            };
        }
    }
    let lattice = grid.basis(&cur).expect("nonsingular");
    let certificate = verify_refining(k, &lattice, &delta, REFINEMENTS)?;
    let density = density(k, &lattice)?;
    debug_assert_eq!(density, cur_density);
    Ok(SearchResult {
        lattice,
        density,
        certificate,
        proposals,
        accepted,
    })
}
