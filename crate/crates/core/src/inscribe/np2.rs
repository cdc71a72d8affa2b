//! Polytopes with `n + 2` vertices: pyramid / generalized bipyramid
//! classification and the exact inscribed cylinder.

use std::cmp::Ordering;

use num::{One, Zero};

use super::{guarantee_product, lemma2_factor, ChainReport, ChainStep, KFoldCylinder};
use crate::error::{Error, Result};
use crate::geom::{affine_rank, Hyperplane, Polytope};
use crate::linalg::{self, Matrix};
use crate::rational::{Rational, RationalVector};

/// The affine map `x -> A x + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    linear: Matrix,
    offset: RationalVector,
}

impl AffineMap {
    pub fn new(linear: Matrix, offset: RationalVector) -> Result<Self> {
        let n = offset.dim();
        if linear.len() != n || linear.iter().any(|r| r.len() != n) {
            return Err(Error::precondition("affine_map", "matrix is not n x n"));
        }
        Ok(AffineMap { linear, offset })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: linalg::identity(n),
            offset: RationalVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn linear(&self) -> &Matrix {
        &self.linear
    }

    pub fn offset(&self) -> &RationalVector {
        &self.offset
    }

    pub fn apply(&self, x: &RationalVector) -> RationalVector {
        &RationalVector::new(linalg::mat_vec(&self.linear, x.coords())) + &self.offset
    }

    pub fn apply_linear(&self, x: &RationalVector) -> RationalVector {
        RationalVector::new(linalg::mat_vec(&self.linear, x.coords()))
    }

    pub fn apply_polytope(&self, p: &Polytope) -> Result<Polytope> {
        if p.dim_ambient() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "affine_map",
                expected: self.dim(),
                found: p.dim_ambient(),
            });
        }
        p.map_vertices(|v| self.apply(v))
    }

    pub fn det(&self) -> Rational {
        linalg::det(&self.linear)
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = linalg::inverse(&self.linear)
            .ok_or_else(|| Error::precondition("affine_map", "map is singular"))?;
        let offset = -&RationalVector::new(linalg::mat_vec(&inv, self.offset.coords()));
        Ok(AffineMap {
            linear: inv,
            offset,
        })
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &AffineMap) -> AffineMap {
        AffineMap {
            linear: linalg::mat_mul(&then.linear, &self.linear),
            offset: then.apply(&self.offset),
        }
    }

    /// `self ⊕ id`: acts as `self` on the leading coordinates and fixes
    /// `extra` trailing ones.
    pub fn extend_identity(&self, extra: usize) -> AffineMap {
        let n = self.dim();
        let linear = (0..n + extra)
            .map(|i| {
                (0..n + extra)
                    .map(|j| match (i < n, j < n) {
                        (true, true) => self.linear[i][j].clone(),
                        (false, false) if i == j => Rational::one(),
                        _ => Rational::zero(),
                    })
                    .collect()
            })
            .collect();
        let mut offset = self.offset.clone().into_coords();
        offset.extend(std::iter::repeat_n(Rational::zero(), extra));
        AffineMap {
            linear,
            offset: RationalVector::new(offset),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Np2Kind {
    Pyramid,
    GeneralizedBipyramid,
}

/// Structure of a polytope with `n + 2` vertices.
#[derive(Clone, Debug)]
pub struct Np2Classification {
    pub kind: Np2Kind,
    /// `[apex]` for a pyramid, `[v, w]` for a generalized bipyramid.
    pub apex_or_pair: Vec<RationalVector>,
    pub base_hyperplane: Hyperplane,
    pub base: Polytope,
}

/// Classifies a full-dimensional polytope with `n + 2` vertices.
pub fn classify_np2(p: &Polytope) -> Result<Np2Classification> {
    classify(p, false)
}

fn classify(p: &Polytope, allow_simplex: bool) -> Result<Np2Classification> {
    let n = p.dim_ambient();
    if !p.is_full_dimensional() {
        return Err(Error::Degenerate {
            op: "classify_np2",
            affine_dim: p.affine_dim(),
            required: n,
        });
    }
    let nv = p.num_vertices();
    if nv != n + 2 && !(allow_simplex && nv == n + 1) {
        return Err(Error::precondition(
            "classify_np2",
            format!("expected {} vertices, found {nv}", n + 2),
        ));
    }
    let verts = p.vertices();
    let without = |skip: &[usize]| -> Vec<RationalVector> {
        verts
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(_, v)| v.clone())
            .collect()
    };

    for i in 0..nv {
        let rest = without(&[i]);
        if affine_rank(&rest) + 1 == n {
            return Ok(Np2Classification {
                kind: Np2Kind::Pyramid,
                apex_or_pair: vec![verts[i].clone()],
                base_hyperplane: Hyperplane::through(&rest)?,
                base: Polytope::from_points(rest)?,
            });
        }
    }

    // not a pyramid: find v and a facet F of the simplex of the other
    // vertices whose hyperplane strictly separates v from the vertex w of
    // the simplex opposite F
    for i in 0..nv {
        for j in (0..nv).filter(|&j| j != i) {
            let f = without(&[i, j]);
            let h = Hyperplane::through(&f)?;
            let (sv, sw) = (h.side(&verts[i]), h.side(&verts[j]));
            if sv != Ordering::Equal && sw != Ordering::Equal && sv != sw {
                return Ok(Np2Classification {
                    kind: Np2Kind::GeneralizedBipyramid,
                    apex_or_pair: vec![verts[i].clone(), verts[j].clone()],
                    base_hyperplane: h,
                    base: Polytope::from_points(f)?,
                });
            }
        }
    }
    Err(Error::NotApplicable {
        op: "classify_np2",
        reason: "no strictly separating base hyperplane".into(),
    })
}

/// One step of the construction: the cylinder lives in the coordinates
/// `transform(x)`, with its height along the last axis.
#[derive(Clone, Debug)]
pub struct Lemma5Cylinder {
    pub cylinder: KFoldCylinder,
    pub transform: AffineMap,
    /// `V(P) / V(C)`, equal to `(1 + 1/(n-1))^(n-1)`.
    pub ratio: Rational,
    pub classification: Np2Classification,
}

/// The matrix `E^{-1}` where the columns of `E` are `cols`.
fn inverse_of_columns(cols: &[RationalVector]) -> Result<Matrix> {
    let e: Matrix =
        linalg::transpose(&cols.iter().map(|c| c.coords().to_vec()).collect::<Vec<_>>());
    linalg::inverse(&e).ok_or_else(|| Error::precondition("lemma5_cylinder", "singular frame"))
}

/// Affinely independent difference vectors `p_i - p_0`, greedily.
fn independent_edges(points: &[RationalVector], want: usize) -> Vec<RationalVector> {
    let mut chosen: Vec<RationalVector> = Vec::new();
    for p in &points[1..] {
        let d = p - &points[0];
        let mut trial: Vec<Vec<Rational>> = chosen.iter().map(|c| c.coords().to_vec()).collect();
        trial.push(d.coords().to_vec());
        if linalg::rank(&trial) > chosen.len() {
            chosen.push(d);
            if chosen.len() == want {
                break;
            }
        }
    }
    chosen
}

/// Inscribes `C = (1 - 1/n) P' + [0, e_n / n]` after normalizing `P` so that
/// the two apexes (or apex and a base vertex) sit at `0` and `e_n`. Simplices
/// are accepted and treated as pyramids.
pub fn lemma5_cylinder(p: &Polytope) -> Result<Lemma5Cylinder> {
    let classification = classify(p, true)?;
    let n = p.dim_ambient();
    let nr = Rational::from_integer(n.into());
    let shrink = Rational::one() - nr.recip();
    let base_verts = classification.base.vertices().to_vec();
    let edges = independent_edges(&base_verts, n - 1);

    let bipyramid = classification.kind == Np2Kind::GeneralizedBipyramid;
    let (origin, top) = if bipyramid {
        let pair = &classification.apex_or_pair;
        (pair[0].clone(), pair[1].clone())
    } else {
        // base vertex -> 0 keeps 0 inside the base, so the shrunken base
        // stays inside P
        (
            base_verts[0].clone(),
            classification.apex_or_pair[0].clone(),
        )
    };
    let mut cols = edges;
    cols.push(&top - &origin);
    let m = inverse_of_columns(&cols)?;
    let offset = -&RationalVector::new(linalg::mat_vec(&m, origin.coords()));
    let transform = AffineMap::new(m, offset)?;

    let mut section: Vec<RationalVector> = base_verts.iter().map(|b| transform.apply(b)).collect();
    let xi = section[0][n - 1].clone();
    if bipyramid {
        // the point where [v, w] crosses the base hyperplane
        section.push(RationalVector::unit(n, n - 1).scale(&xi));
    }
    let lo = &shrink * &xi;
    let hi = &lo + nr.recip();
    let base = Polytope::from_points(section.iter().map(|x| x.scale(&shrink)))?;
    let cylinder = KFoldCylinder::new(base, vec![n - 1], vec![(lo, hi)])?;

    let body_volume = transform.apply_polytope(p)?.volume()?;
    let ratio = body_volume / cylinder.volume()?;
    if ratio != lemma2_factor(n) {
        return Err(Error::NotApplicable {
            op: "lemma5_cylinder",
            reason: format!("volume identity failed (ratio {ratio})"),
        });
    }
    Ok(Lemma5Cylinder {
        cylinder,
        transform,
        ratio,
        classification,
    })
}

/// Repeats [`lemma5_cylinder`] on the cylinder base `k` times. The report's
/// cylinder and transform live in the composed normalized coordinates.
pub fn kfold_chain_np2(p: &Polytope, k: usize) -> Result<ChainReport> {
    let n = p.dim_ambient();
    if k == 0 || k >= n {
        return Err(Error::precondition(
            "kfold_chain_np2",
            format!("k = {k} outside 1..={}", n.saturating_sub(1)),
        ));
    }
    let mut total = AffineMap::identity(n);
    let mut body = p.clone();
    let mut intervals = Vec::with_capacity(k);
    let mut steps = Vec::with_capacity(k);
    for j in 0..k {
        let m = n - j;
        let l5 = lemma5_cylinder(&body)?;
        total = total.then(&l5.transform.extend_identity(j));
        let (lo, hi) = l5.cylinder.intervals()[0].clone();
        let next = l5.cylinder.base().project_drop_axis(m - 1)?;
        steps.push(ChainStep {
            axis: m - 1,
            height: &hi - &lo,
            slice_height: lo.clone(),
            base_volume: next.volume()?,
            body_volume: l5.transform.apply_polytope(&body)?.volume()?,
        });
        intervals.push((lo, hi));
        body = next;
    }
    let mut base = body;
    for (j, (lo, _)) in intervals.iter().enumerate().rev() {
        base = base.insert_axis(n - 1 - j, lo)?;
    }
    let axes = (0..k).map(|j| n - 1 - j).collect();
    let cylinder = KFoldCylinder::new(base, axes, intervals)?;
    let image = total.apply_polytope(p)?;
    let volume_ratio = image.volume()? / cylinder.volume()?;
    let certified = cylinder.is_inside(&image);
    Ok(ChainReport {
        cylinder,
        steps,
        volume_ratio,
        guarantee: guarantee_product(n, k),
        certified,
        transform: Some(total),
    })
}
