//! Inscribed cylinders.
//!
//! For a body closed under pushing points down to `x_axis = 0`, the slice at
//! height `a` times `[0, a]` is inscribed. [`best_slice_cylinder`] maximizes
//! its volume `g(a) = a · V(slice at a)` exactly: the slice volume is a
//! polynomial between consecutive vertex heights, recovered by interpolation,
//! and `g` is maximized over the interval endpoints and the real roots of
//! `g'`. `g` is log-concave, so only the two windows next to the best vertex
//! height are interpolated. Chains repeat this along the last axes.

mod np2;
mod poly;

use num::{One, Signed, Zero};
use rand::Rng;

use crate::bodies::{AntiBlockingPolytope, LocallyAntiBlockingPolytope};
use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::rational::{rat, simplest_between, Rational, RationalVector};

pub use np2::{
    classify_np2, kfold_chain_np2, lemma5_cylinder, AffineMap, Lemma5Cylinder, Np2Classification,
    Np2Kind,
};
use poly::{descending_root, pow2_inv, Poly};

/// `(1 + 1/(n-1))^(n-1)`, taken as 1 for `n = 1`.
pub fn lemma2_factor(n: usize) -> Rational {
    if n <= 1 {
        return Rational::one();
    }
    let m = Rational::from_integer((n - 1).into());
    (Rational::one() + m.recip()).pow((n - 1) as i32)
}

/// `∏_{i=n-k}^{n-1} (1 + 1/i)^i`, the term for `i = 0` being 1.
pub fn guarantee_product(n: usize, k: usize) -> Rational {
    (n - k..n).map(|i| lemma2_factor(i + 1)).product()
}

/// `B × [lo_1, hi_1] × … × [lo_k, hi_k]`, with the interval coordinates on
/// `axes`. The base is stored in the full space with those coordinates set
/// to the lower interval ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KFoldCylinder {
    base: Polytope,
    axes: Vec<usize>,
    intervals: Vec<(Rational, Rational)>,
}

impl KFoldCylinder {
    pub fn new(
        base: Polytope,
        axes: Vec<usize>,
        intervals: Vec<(Rational, Rational)>,
    ) -> Result<Self> {
        let n = base.dim_ambient();
        if axes.len() != intervals.len() {
            return Err(Error::precondition(
                "cylinder",
                "one interval per axis required",
            ));
        }
        for (i, &a) in axes.iter().enumerate() {
            if a >= n {
                return Err(Error::AxisOutOfRange {
                    op: "cylinder",
                    axis: a,
                    dim: n,
                });
            }
            if axes[..i].contains(&a) {
                return Err(Error::precondition("cylinder", "repeated axis"));
            }
            let (lo, hi) = &intervals[i];
            if lo >= hi {
                return Err(Error::precondition("cylinder", "interval has no length"));
            }
            if base.vertices().iter().any(|v| &v[a] != lo) {
                return Err(Error::precondition(
                    "cylinder",
                    "base must sit at the lower end of each interval",
                ));
            }
        }
        let cyl = KFoldCylinder {
            base,
            axes,
            intervals,
        };
        let free = n - cyl.k();
        if cyl.base.affine_dim() != free {
            return Err(Error::Degenerate {
                op: "cylinder",
                affine_dim: cyl.base.affine_dim(),
                required: free,
            });
        }
        Ok(cyl)
    }

    pub fn dim(&self) -> usize {
        self.base.dim_ambient()
    }

    pub fn k(&self) -> usize {
        self.axes.len()
    }

    pub fn base(&self) -> &Polytope {
        &self.base
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn heights(&self) -> Vec<Rational> {
        self.intervals.iter().map(|(lo, hi)| hi - lo).collect()
    }

    /// The base in `R^(n-k)`, with the cylinder axes removed.
    pub fn base_projected(&self) -> Polytope {
        let mut axes = self.axes.clone();
        axes.sort_unstable_by(|a, b| b.cmp(a));
        let mut b = self.base.clone();
        for a in axes {
            b = b.project_drop_axis(a).expect("axis in range");
        }
        b
    }

    pub fn base_volume(&self) -> Result<Rational> {
        self.base_projected().volume()
    }

    pub fn volume(&self) -> Result<Rational> {
        Ok(self.base_volume()? * self.heights().into_iter().product::<Rational>())
    }

    /// Base vertices combined with every choice of interval ends.
    pub fn vertices(&self) -> Vec<RationalVector> {
        let mut out = Vec::new();
        for v in self.base.vertices() {
            for mask in 0u64..(1 << self.k()) {
                let mut w = v.clone();
                for (i, &a) in self.axes.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        w[a] = self.intervals[i].1.clone();
                    }
                }
                out.push(w);
            }
        }
        out
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        let mut y = x.clone();
        for (&a, (lo, hi)) in self.axes.iter().zip(&self.intervals) {
            if &x[a] < lo || &x[a] > hi {
                return false;
            }
            y[a] = lo.clone();
        }
        self.base.contains(&y).unwrap_or(false)
    }

    /// Certifies `self ⊆ body` by exact membership of every vertex.
    pub fn is_inside(&self, body: &Polytope) -> bool {
        body.dim_ambient() == self.dim()
            && self
                .vertices()
                .iter()
                .all(|v| body.contains(v).unwrap_or(false))
    }

    /// A random point: a random convex combination of base vertices with
    /// random interval coordinates (grid `1/1000`).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> RationalVector {
        let vs = self.base.vertices();
        let w: Vec<i64> = vs.iter().map(|_| rng.random_range(1..=1000)).collect();
        let total = Rational::from_integer(w.iter().sum::<i64>().into());
        let mut p = RationalVector::zeros(self.dim());
        for (v, wi) in vs.iter().zip(&w) {
            p = &p + &v.scale(&(Rational::from_integer((*wi).into()) / &total));
        }
        for (&a, (lo, hi)) in self.axes.iter().zip(&self.intervals) {
            let t = rat(rng.random_range(0..=1000), 1000);
            p[a] = lo + (hi - lo) * t;
        }
        p
    }
}

/// Result of [`best_slice_cylinder`].
#[derive(Clone, Debug)]
pub struct SliceCylinder {
    /// The maximizing height `a*`.
    pub height: Rational,
    /// The slice at `a*` with the axis coordinate removed.
    pub base: Polytope,
    /// `g(a*) = a* · V(base)`.
    pub value: Rational,
}

/// Maximizes `a · V(P ∩ {x_axis = a})` over `a ∈ [0, h]` for a full-
/// dimensional `P` whose extent along `axis` is `[0, h]`.
fn optimal_slice(p: &Polytope, axis: usize) -> Result<SliceCylinder> {
    let n = p.dim_ambient();
    if !p.is_full_dimensional() {
        return Err(Error::Degenerate {
            op: "best_slice_cylinder",
            affine_dim: p.affine_dim(),
            required: n,
        });
    }
    let (lo, _) = p.axis_extent(axis)?;
    if !lo.is_zero() {
        return Err(Error::precondition(
            "best_slice_cylinder",
            format!("axis extent must start at 0, found {lo}"),
        ));
    }
    half_slice(p, axis, false)
}

/// Maximizes `a · V(P ∩ {x_axis = ±a})` over `a >= 0` for a full-dimensional
/// `P` whose extent along `axis` contains 0. For `a > 0` the slices of `P`
/// and of its half `{±x_axis >= 0}` agree, so the half is never built.
fn half_slice(p: &Polytope, axis: usize, negative: bool) -> Result<SliceCylinder> {
    let n = p.dim_ambient();
    let signed = |t: &Rational| if negative { -t } else { t.clone() };
    let mut breaks: Vec<Rational> = p
        .vertices()
        .iter()
        .map(|v| signed(&v[axis]))
        .filter(|h| h.is_positive())
        .collect();
    breaks.push(Rational::zero());
    breaks.sort();
    breaks.dedup();
    let slice_volume = |p: &Polytope, axis: usize, t: &Rational| p.slice_volume(axis, &signed(t));

    // g is log-concave (Brunn), hence strictly increasing up to its first
    // maximum and nonincreasing after it: binary search the breakpoints for
    // the first i with g(i) >= g(i+1). Only the two windows around that
    // breakpoint can hold a larger interior value.
    let mut memo: Vec<Option<Rational>> = vec![None; breaks.len()];
    let mut vol_at = |i: usize| -> Result<Rational> {
        if memo[i].is_none() {
            memo[i] = Some(slice_volume(p, axis, &breaks[i])?);
        }
        Ok(memo[i].clone().unwrap())
    };
    let (mut lo_i, mut hi_i) = (0, breaks.len() - 1);
    while lo_i < hi_i {
        let m = (lo_i + hi_i) / 2;
        if &breaks[m] * vol_at(m)? >= &breaks[m + 1] * vol_at(m + 1)? {
            hi_i = m;
        } else {
            lo_i = m + 1;
        }
    }
    let top = lo_i;

    let mut best = (breaks[top].clone(), &breaks[top] * vol_at(top)?);
    let first = top.saturating_sub(1);
    let last = (top + 1).min(breaks.len() - 1);
    for w in first..last {
        let (a, b) = (&breaks[w], &breaks[w + 1]);
        let width = b - a;
        // V is a polynomial of degree n - 1 on the window and continuous at
        // its ends; the interior nodes get small denominators
        let inner = n.saturating_sub(2);
        let q = 4 * inner as i64;
        let mut xs: Vec<Rational> = (1..=inner as i64)
            .map(|j| {
                simplest_between(
                    &(a + &width * rat(4 * j - 3, q)),
                    &(a + &width * rat(4 * j - 1, q)),
                )
            })
            .collect();
        let signed_xs: Vec<Rational> = xs.iter().map(signed).collect();
        let mut ys = p.slice_volumes_in_window(axis, &signed_xs)?;
        xs.extend([a.clone(), b.clone()]);
        ys.extend([vol_at(w)?, vol_at(w + 1)?]);
        let g = Poly::interpolate(&xs, &ys).shift();
        // g > 0 and log-concave inside the window, so g' changes sign at
        // most once there; roots at the ends carry no information
        let dg = g.derivative().strip_endpoint_roots(a, b);
        if dg.eval(a).is_positive() && dg.eval(b).is_negative() {
            let r = descending_root(&dg, a, b, &(&width * pow2_inv(64)));
            let val = g.eval(&r);
            if val > best.1 {
                best = (r, val);
            }
        }
    }
    let (height, _) = best;
    if height.is_zero() {
        return Err(Error::Degenerate {
            op: "best_slice_cylinder",
            affine_dim: 0,
            required: 1,
        });
    }
    let base = p.section(axis, &signed(&height))?;
    if !base.is_full_dimensional() {
        return Err(Error::Degenerate {
            op: "best_slice_cylinder",
            affine_dim: base.affine_dim(),
            required: n - 1,
        });
    }
    let value = &height * base.volume()?;
    Ok(SliceCylinder {
        height,
        base,
        value,
    })
}

/// The largest cylinder `slice(F, axis, a) × [0, a]` inscribed in `F`.
pub fn best_slice_cylinder(f: &AntiBlockingPolytope, axis: usize) -> Result<SliceCylinder> {
    let p = f.polytope();
    if axis >= p.dim_ambient() {
        return Err(Error::AxisOutOfRange {
            op: "best_slice_cylinder",
            axis,
            dim: p.dim_ambient(),
        });
    }
    optimal_slice(p, axis)
}

/// One step of a cylinder chain.
#[derive(Clone, Debug)]
pub struct ChainStep {
    pub axis: usize,
    /// Length of the new interval.
    pub height: Rational,
    /// Coordinate of the slice that became the next base.
    pub slice_height: Rational,
    /// Volume of the new base.
    pub base_volume: Rational,
    /// Volume of the body this step was applied to.
    pub body_volume: Rational,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub cylinder: KFoldCylinder,
    pub steps: Vec<ChainStep>,
    /// `V(body) / V(cylinder)`.
    pub volume_ratio: Rational,
    /// The proved upper bound on `volume_ratio`.
    pub guarantee: Rational,
    /// Every cylinder vertex lies in the body.
    pub certified: bool,
    /// For `n + 2`-vertex chains: the affine map into the coordinates the
    /// cylinder is expressed in. `None` means the identity.
    pub transform: Option<AffineMap>,
}

fn check_k(op: &'static str, n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::precondition(op, format!("k = {k} outside 1..={n}")));
    }
    Ok(())
}

/// Assembles the cylinder from the final base (in `R^(n-k)`) and the
/// intervals of axes `n-1, n-2, …`.
fn assemble(
    body: &Polytope,
    base: Polytope,
    intervals: Vec<(Rational, Rational)>,
    steps: Vec<ChainStep>,
    guarantee: Rational,
) -> Result<ChainReport> {
    let n = body.dim_ambient();
    let k = intervals.len();
    let mut b = base;
    for (j, (lo, _)) in intervals.iter().enumerate().rev() {
        b = b.insert_axis(n - 1 - j, lo)?;
    }
    let cylinder = KFoldCylinder::new(b, (0..k).map(|j| n - 1 - j).collect(), intervals)?;
    let volume_ratio = body.volume()? / cylinder.volume()?;
    let certified = cylinder.is_inside(body);
    Ok(ChainReport {
        cylinder,
        steps,
        volume_ratio,
        guarantee,
        certified,
        transform: None,
    })
}

/// `k` nested slice cylinders along axes `n-1, n-2, …, n-k`.
pub fn kfold_chain_ab(f: &AntiBlockingPolytope, k: usize) -> Result<ChainReport> {
    Ok(kfold_chains_ab(f, k)?.pop().expect("k >= 1"))
}

/// The reports of [`kfold_chain_ab`] for `1, …, k` from a single pass: the
/// chain for `j` is the first `j` steps of the chain for `k`.
pub fn kfold_chains_ab(f: &AntiBlockingPolytope, k: usize) -> Result<Vec<ChainReport>> {
    let p = f.polytope();
    let n = p.dim_ambient();
    check_k("kfold_chain_ab", n, k)?;
    let mut body = p.clone();
    let mut intervals = Vec::with_capacity(k);
    let mut steps = Vec::with_capacity(k);
    let mut reports = Vec::with_capacity(k);
    for j in 0..k {
        let axis = n - 1 - j;
        let body_volume = body.volume()?;
        let sc = optimal_slice(&body, axis)?;
        steps.push(ChainStep {
            axis,
            height: sc.height.clone(),
            slice_height: sc.height.clone(),
            base_volume: sc.base.volume()?,
            body_volume,
        });
        intervals.push((Rational::zero(), sc.height));
        body = sc.base;
        reports.push(assemble(
            p,
            body.clone(),
            intervals.clone(),
            steps.clone(),
            guarantee_product(n, j + 1),
        )?);
    }
    Ok(reports)
}

/// Best slice cylinder of `body ∩ {x_axis >= 0}` (or of the reflected
/// negative half), if that half is full-dimensional.
fn half_cylinder(body: &Polytope, axis: usize, negative: bool) -> Option<SliceCylinder> {
    let (lo, hi) = body.axis_extent(axis).ok()?;
    let (near, far) = if negative { (hi, -lo) } else { (-lo, hi) };
    if !body.is_full_dimensional() || near.is_negative() || !far.is_positive() {
        return None;
    }
    half_slice(body, axis, negative).ok()
}

/// Like [`kfold_chain_ab`], but each step splits the body at `x_axis = 0`
/// and keeps the larger of the two half cylinders.
pub fn kfold_chain_lab(l: &LocallyAntiBlockingPolytope, k: usize) -> Result<ChainReport> {
    Ok(kfold_chains_lab(l, k)?.pop().expect("k >= 1"))
}

/// The reports of [`kfold_chain_lab`] for `1, …, k` from a single pass.
pub fn kfold_chains_lab(l: &LocallyAntiBlockingPolytope, k: usize) -> Result<Vec<ChainReport>> {
    let p = l.polytope();
    let n = p.dim_ambient();
    check_k("kfold_chain_lab", n, k)?;
    let mut body = p.clone();
    let mut intervals = Vec::with_capacity(k);
    let mut steps = Vec::with_capacity(k);
    let mut reports = Vec::with_capacity(k);
    for j in 0..k {
        let axis = n - 1 - j;
        let body_volume = body.volume()?;
        let pos = half_cylinder(&body, axis, false);
        let neg = half_cylinder(&body, axis, true);
        let (sc, negative) = match (pos, neg) {
            (Some(a), Some(b)) if b.value > a.value => (b, true),
            (Some(a), _) => (a, false),
            (None, Some(b)) => (b, true),
            (None, None) => {
                return Err(Error::Degenerate {
                    op: "kfold_chain_lab",
                    affine_dim: body.affine_dim(),
                    required: body.dim_ambient(),
                })
            }
        };
        let interval = if negative {
            (-sc.height.clone(), Rational::zero())
        } else {
            (Rational::zero(), sc.height.clone())
        };
        steps.push(ChainStep {
            axis,
            height: sc.height.clone(),
            slice_height: if negative {
                -sc.height.clone()
            } else {
                sc.height.clone()
            },
            base_volume: sc.base.volume()?,
            body_volume,
        });
        intervals.push(interval);
        body = sc.base;
        let guarantee = Rational::from_integer(num::BigInt::from(2).pow(j as u32 + 1))
            * guarantee_product(n, j + 1);
        reports.push(assemble(
            p,
            body.clone(),
            intervals.clone(),
            steps.clone(),
            guarantee,
        )?);
    }
    Ok(reports)
}

/// Checks a chain report against its body: exact vertex membership plus
/// `samples` random cylinder points.
pub fn certify_inclusion<R: Rng>(
    report: &ChainReport,
    body: &Polytope,
    samples: usize,
    rng: &mut R,
) -> Result<bool> {
    let image = match &report.transform {
        Some(t) => t.apply_polytope(body)?,
        None => body.clone(),
    };
    if !report.cylinder.is_inside(&image) {
        return Ok(false);
    }
    for _ in 0..samples {
        if !image.contains(&report.cylinder.sample(rng))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `V(body) / V(cylinder)` and whether it respects the guarantee.
pub fn within_guarantee(report: &ChainReport) -> bool {
    report.volume_ratio <= report.guarantee && report.volume_ratio.is_positive()
}

#[cfg(test)]
mod tests;
