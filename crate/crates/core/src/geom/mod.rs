//! Exact-rational polytopes given by their vertices.
//!
//! A [`Polytope`] is built from any finite point set. Construction reduces the
//! points to the irredundant vertex set and derives the facet description in
//! the affine hull, so vertex counts and facet incidences are always
//! well-defined. Lower-dimensional polytopes are first-class: slices, faces
//! and cylinder bases live in affine subspaces of the ambient space, and
//! their volume is measured relative to that subspace.

mod dd;
mod faces;
pub mod io;

use std::cmp::Ordering;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{common_denominator, dot, Rational, RationalVector};

pub use faces::affine_rank;

/// The affine hyperplane `{x : normal · x = offset}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    normal: RationalVector,
    offset: Rational,
}

impl Hyperplane {
    pub fn new(normal: RationalVector, offset: Rational) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::precondition("hyperplane", "normal vector is zero"));
        }
        Ok(Hyperplane { normal, offset })
    }

    /// Hyperplane through `dim` affinely independent points of `R^dim`.
    pub fn through(points: &[RationalVector]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Empty { op: "hyperplane" });
        };
        let n = first.dim();
        let diffs: Vec<Vec<Rational>> = points[1..]
            .iter()
            .map(|p| (p - first).into_coords())
            .collect();
        let ns = linalg::null_space(&diffs, n);
        if ns.len() != 1 {
            return Err(Error::precondition(
                "hyperplane",
                "points do not span a unique hyperplane",
            ));
        }
        let normal = RationalVector::new(ns.into_iter().next().unwrap());
        let offset = normal.dot(first);
        Hyperplane::new(normal, offset)
    }

    pub fn normal(&self) -> &RationalVector {
        &self.normal
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    /// `normal · x - offset`; its sign says which side `x` lies on.
    pub fn evaluate(&self, x: &RationalVector) -> Rational {
        self.normal.dot(x) - &self.offset
    }

    pub fn side(&self, x: &RationalVector) -> Ordering {
        self.evaluate(x).cmp(&Rational::zero())
    }
}

/// A facet inequality `normal · x <= offset` together with the indices of
/// the vertices it contains.
#[derive(Clone, Debug)]
pub struct Facet {
    normal: RationalVector,
    offset: Rational,
    incidence: FixedBitSet,
}

impl Facet {
    pub fn normal(&self) -> &RationalVector {
        &self.normal
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn contains_vertex(&self, index: usize) -> bool {
        self.incidence.contains(index)
    }

    pub fn vertex_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.incidence.ones()
    }

    pub(crate) fn incidence(&self) -> &FixedBitSet {
        &self.incidence
    }
}

/// Affine hull `origin + span(basis)`, with `basis` in reduced row echelon
/// form. The pivot coordinates of a point in the hull are a chart for it.
#[derive(Clone, Debug)]
struct Flat {
    origin: RationalVector,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Flat {
    fn of(points: &[RationalVector]) -> Flat {
        let origin = points[0].clone();
        let diffs: Vec<Vec<Rational>> = points[1..]
            .iter()
            .map(|p| (p - &origin).into_coords())
            .collect();
        // a spanning subset first, so the reduction runs on few rows
        let ambient = origin.dim();
        let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
        for d in diffs {
            let mut d = d;
            for (c, row) in &echelon {
                if !d[*c].is_zero() {
                    let f = d[*c].clone();
                    for (x, y) in d.iter_mut().zip(row) {
                        *x -= &f * y;
                    }
                }
            }
            if let Some(c) = d.iter().position(|x| !x.is_zero()) {
                let inv = d[c].recip();
                d.iter_mut().for_each(|x| *x *= &inv);
                echelon.push((c, d));
                if echelon.len() == ambient {
                    break;
                }
            }
        }
        let rows: Vec<Vec<Rational>> = echelon.into_iter().map(|(_, r)| r).collect();
        let (basis, pivots) = if rows.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            linalg::rref(&rows)
        };
        Flat {
            origin,
            basis,
            pivots,
        }
    }

    fn dim(&self) -> usize {
        self.pivots.len()
    }

    fn chart(&self, x: &RationalVector) -> Vec<Rational> {
        self.pivots.iter().map(|&p| x[p].clone()).collect()
    }

    fn lift(&self, y: &[Rational]) -> RationalVector {
        let mut x = self.origin.clone();
        for ((yi, &p), b) in y.iter().zip(&self.pivots).zip(&self.basis) {
            let c = yi - &self.origin[p];
            if c.is_zero() {
                continue;
            }
            for (xj, bj) in x.coords_mut().iter_mut().zip(b) {
                *xj += &c * bj;
            }
        }
        x
    }

    fn contains(&self, x: &RationalVector) -> bool {
        self.lift(&self.chart(x)) == *x
    }

    /// `h · x` as an affine function of chart coordinates: returns
    /// `(coefficients, constant)` with `h · x = coefficients · y + constant`.
    fn pull_back(&self, h: &RationalVector) -> (Vec<Rational>, Rational) {
        let coeffs: Vec<Rational> = self.basis.iter().map(|b| dot(h.coords(), b)).collect();
        let mut constant = h.dot(&self.origin);
        for (c, &p) in coeffs.iter().zip(&self.pivots) {
            constant -= c * &self.origin[p];
        }
        (coeffs, constant)
    }

    /// Squared Euclidean volume scale of the chart: `det(B B^T)`.
    fn gram_det(&self) -> Rational {
        let g: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|a| self.basis.iter().map(|b| dot(a, b)).collect())
            .collect();
        linalg::det(&g)
    }
}

/// A convex polytope with exact rational vertices.
#[derive(Clone, Debug)]
pub struct Polytope {
    ambient: usize,
    vertices: Vec<RationalVector>,
    flat: Flat,
    facets: Vec<Facet>,
    edges: OnceLock<Vec<(usize, usize)>>,
    volume: OnceLock<Rational>,
}

impl Polytope {
    /// Convex hull of a finite point set. Redundant and repeated points are
    /// dropped; the remaining vertices are sorted lexicographically.
    pub fn from_points(points: impl IntoIterator<Item = RationalVector>) -> Result<Self> {
        let mut pts: Vec<RationalVector> = points.into_iter().collect();
        let Some(first) = pts.first() else {
            return Err(Error::Empty { op: "convex_hull" });
        };
        let ambient = first.dim();
        if let Some(bad) = pts.iter().find(|p| p.dim() != ambient) {
            return Err(Error::DimensionMismatch {
                op: "convex_hull",
                expected: ambient,
                found: bad.dim(),
            });
        }
        pts.sort();
        pts.dedup();
        let flat = Flat::of(&pts);
        let d = flat.dim();
        if d == 0 {
            pts.truncate(1);
            return Ok(Polytope {
                ambient,
                vertices: pts,
                flat,
                facets: Vec::new(),
                edges: OnceLock::new(),
                volume: OnceLock::new(),
            });
        }

        let rows: Vec<Vec<BigInt>> = pts
            .iter()
            .map(|p| {
                let y = flat.chart(p);
                let q = common_denominator(&y);
                let mut row = Vec::with_capacity(d + 1);
                row.push(q.clone());
                row.extend(y.iter().map(|v| -(v.numer() * (&q / v.denom()))));
                row
            })
            .collect();
        let rays = dd::extreme_rays(&rows).expect("points span their affine hull");

        let nf = rays.len();
        let mut inc = vec![FixedBitSet::with_capacity(nf); pts.len()];
        for (f, ray) in rays.iter().enumerate() {
            for i in ray.zero.ones() {
                inc[i].insert(f);
            }
        }
        let keep: Vec<bool> = (0..pts.len())
            .map(|i| !(0..pts.len()).any(|j| j != i && inc[i].is_subset(&inc[j])))
            .collect();
        let mut new_index = vec![usize::MAX; pts.len()];
        let mut vertices = Vec::new();
        for (i, p) in pts.into_iter().enumerate() {
            if keep[i] {
                new_index[i] = vertices.len();
                vertices.push(p);
            }
        }
        let facets = rays
            .into_iter()
            .map(|ray| {
                let mut normal = RationalVector::zeros(ambient);
                for (k, &p) in flat.pivots.iter().enumerate() {
                    normal[p] = Rational::from_integer(ray.coords[k + 1].clone());
                }
                let mut incidence = FixedBitSet::with_capacity(vertices.len());
                for i in ray.zero.ones() {
                    if keep[i] {
                        incidence.insert(new_index[i]);
                    }
                }
                Facet {
                    normal,
                    offset: Rational::from_integer(ray.coords[0].clone()),
                    incidence,
                }
            })
            .collect();
        Ok(Polytope {
            ambient,
            vertices,
            flat,
            facets,
            edges: OnceLock::new(),
            volume: OnceLock::new(),
        })
    }

    /// Full-dimensional polytope from a known vertex set and facet list
    /// (inequality plus incident vertex indices). Facets with equal
    /// incidence sets are merged.
    fn from_incidences(
        vertices: Vec<RationalVector>,
        facets: Vec<(RationalVector, Rational, Vec<usize>)>,
    ) -> Polytope {
        let ambient = vertices[0].dim();
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by(|&a, &b| vertices[a].cmp(&vertices[b]));
        let mut new_index = vec![0; vertices.len()];
        for (k, &i) in order.iter().enumerate() {
            new_index[i] = k;
        }
        let mut slots: Vec<Option<RationalVector>> = vertices.into_iter().map(Some).collect();
        let vertices: Vec<RationalVector> =
            order.iter().map(|&i| slots[i].take().unwrap()).collect();
        let mut seen = std::collections::HashSet::new();
        let facets = facets
            .into_iter()
            .filter_map(|(normal, offset, inc)| {
                let mut incidence = FixedBitSet::with_capacity(vertices.len());
                for i in inc {
                    incidence.insert(new_index[i]);
                }
                if !seen.insert(incidence.clone()) {
                    return None;
                }
                let mut row = vec![offset];
                row.extend(normal.into_coords());
                let ints = crate::rational::primitive_integer_row(&row);
                Some(Facet {
                    normal: RationalVector::new(
                        ints[1..]
                            .iter()
                            .cloned()
                            .map(Rational::from_integer)
                            .collect(),
                    ),
                    offset: Rational::from_integer(ints[0].clone()),
                    incidence,
                })
            })
            .collect();
        Polytope {
            ambient,
            flat: Flat::of(&vertices),
            vertices,
            facets,
            edges: OnceLock::new(),
            volume: OnceLock::new(),
        }
    }

    /// Axis-parallel box `[lo_1, hi_1] x ... x [lo_n, hi_n]`.
    pub fn box_from_bounds(lo: &[Rational], hi: &[Rational]) -> Result<Self> {
        let n = lo.len();
        let corners = (0..1usize << n).map(|mask| {
            RationalVector::new(
                (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            hi[i].clone()
                        } else {
                            lo[i].clone()
                        }
                    })
                    .collect(),
            )
        });
        Polytope::from_points(corners)
    }

    pub fn unit_cube(n: usize) -> Self {
        let lo = vec![Rational::zero(); n];
        let hi = vec![Rational::one(); n];
        Polytope::box_from_bounds(&lo, &hi).expect("cube")
    }

    /// `conv{0, e_1, ..., e_n}`.
    pub fn standard_simplex(n: usize) -> Self {
        let mut pts = vec![RationalVector::zeros(n)];
        pts.extend((0..n).map(|i| RationalVector::unit(n, i)));
        Polytope::from_points(pts).expect("simplex")
    }

    /// `conv{+-e_1, ..., +-e_n}`.
    pub fn cross_polytope(n: usize) -> Self {
        let pts = (0..n).flat_map(|i| {
            let e = RationalVector::unit(n, i);
            let m = -&e;
            [e, m]
        });
        Polytope::from_points(pts).expect("cross-polytope")
    }

    pub fn dim_ambient(&self) -> usize {
        self.ambient
    }

    pub fn affine_dim(&self) -> usize {
        self.flat.dim()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == self.ambient
    }

    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Facets relative to the affine hull. Together with the affine hull
    /// they describe the polytope exactly.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    fn check_dim(&self, op: &'static str, x: &RationalVector) -> Result<()> {
        if x.dim() != self.ambient {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.ambient,
                found: x.dim(),
            });
        }
        Ok(())
    }

    fn check_axis(&self, op: &'static str, axis: usize) -> Result<()> {
        if axis >= self.ambient {
            return Err(Error::AxisOutOfRange {
                op,
                axis,
                dim: self.ambient,
            });
        }
        Ok(())
    }

    /// Exact membership; boundary points count as inside.
    pub fn contains(&self, x: &RationalVector) -> Result<bool> {
        self.check_dim("contains", x)?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &RationalVector) -> bool {
        if !self.is_full_dimensional() && !self.flat.contains(x) {
            return false;
        }
        // facet normals and offsets are integral (primitive ray coordinates)
        let q = common_denominator(x.coords());
        let xs: Vec<BigInt> = x
            .coords()
            .iter()
            .map(|v| v.numer() * (&q / v.denom()))
            .collect();
        self.facets.iter().all(|f| {
            debug_assert!(
                f.offset.is_integer() && f.normal.coords().iter().all(Rational::is_integer)
            );
            let lhs = f
                .normal
                .coords()
                .iter()
                .zip(&xs)
                .filter(|(a, _)| !a.is_zero())
                .fold(BigInt::zero(), |acc, (a, b)| acc + a.numer() * b);
            lhs <= f.offset.numer() * &q
        })
    }

    /// Volume relative to the affine hull (a segment has its length, a point
    /// has content one). Fails when the affine hull is tilted so that the
    /// relative volume is irrational.
    pub fn volume(&self) -> Result<Rational> {
        if let Some(v) = self.volume.get() {
            return Ok(v.clone());
        }
        let v = self.compute_volume()?;
        Ok(self.volume.get_or_init(|| v).clone())
    }

    fn compute_volume(&self) -> Result<Rational> {
        let chart = faces::chart_volume(self);
        if self.affine_dim() == 0 || self.is_full_dimensional() {
            return Ok(chart);
        }
        let scale =
            linalg::rational_sqrt(&self.flat.gram_det()).ok_or_else(|| Error::NotApplicable {
                op: "volume",
                reason: "relative volume of this tilted lower-dimensional polytope is irrational"
                    .into(),
            })?;
        Ok(chart * scale)
    }

    /// `d`-dimensional content: the relative volume if the polytope has
    /// affine dimension `d`, zero if it is smaller.
    pub fn content(&self, d: usize) -> Result<Rational> {
        match self.affine_dim().cmp(&d) {
            Ordering::Less => Ok(Rational::zero()),
            Ordering::Equal => self.volume(),
            Ordering::Greater => Err(Error::precondition(
                "content",
                format!("polytope has affine dimension {} > {d}", self.affine_dim()),
            )),
        }
    }

    /// Vertex index pairs `(i, j)`, `i < j`, spanning an edge.
    pub fn edges(&self) -> &[(usize, usize)] {
        self.edges.get_or_init(|| faces::edges(self))
    }

    /// Number of edges at each vertex, in the order of [`Polytope::vertices`].
    pub fn vertex_degrees(&self) -> Result<Vec<usize>> {
        if !self.is_full_dimensional() {
            return Err(Error::Degenerate {
                op: "vertex_degrees",
                affine_dim: self.affine_dim(),
                required: self.ambient,
            });
        }
        let mut deg = vec![0; self.vertices.len()];
        for &(i, j) in self.edges() {
            deg[i] += 1;
            deg[j] += 1;
        }
        Ok(deg)
    }

    /// Smallest and largest value of coordinate `axis` over the polytope.
    pub fn axis_extent(&self, axis: usize) -> Result<(Rational, Rational)> {
        self.check_axis("axis_extent", axis)?;
        let lo = self
            .vertices
            .iter()
            .map(|v| &v[axis])
            .min()
            .unwrap()
            .clone();
        let hi = self
            .vertices
            .iter()
            .map(|v| &v[axis])
            .max()
            .unwrap()
            .clone();
        Ok((lo, hi))
    }

    pub fn bounding_box(&self) -> (Vec<Rational>, Vec<Rational>) {
        (0..self.ambient)
            .map(|a| self.axis_extent(a).expect("axis in range"))
            .unzip()
    }

    /// Average of the vertices (a relative interior point).
    pub fn vertex_centroid(&self) -> RationalVector {
        let n = Rational::from_integer(BigInt::from(self.vertices.len()));
        let mut sum = RationalVector::zeros(self.ambient);
        for v in &self.vertices {
            sum = &sum + v;
        }
        sum.scale(&n.recip())
    }

    /// The section `P ∩ {x_axis = value}`, kept in the ambient space.
    pub fn slice(&self, axis: usize, value: &Rational) -> Result<Polytope> {
        self.check_axis("slice", axis)?;
        let (lo, hi) = self.axis_extent(axis)?;
        if value < &lo || value > &hi {
            return Err(Error::precondition(
                "slice",
                format!("value {value} outside the axis extent [{lo}, {hi}]"),
            ));
        }
        let mut pts: Vec<RationalVector> = self
            .vertices
            .iter()
            .filter(|v| &v[axis] == value)
            .cloned()
            .collect();
        for &(i, j) in self.edges() {
            let (u, w) = (&self.vertices[i], &self.vertices[j]);
            let (a, b) = (&u[axis], &w[axis]);
            if (a < value && value < b) || (b < value && value < a) {
                let t = (value - a) / (b - a);
                let mut p = u + &(w - u).scale(&t);
                p[axis] = value.clone();
                pts.push(p);
            }
        }
        Polytope::from_points(pts)
    }

    /// `slice(axis, value)` with the axis coordinate removed.
    pub fn section(&self, axis: usize, value: &Rational) -> Result<Polytope> {
        self.check_axis("section", axis)?;
        let (lo, hi) = self.axis_extent(axis)?;
        if !self.is_full_dimensional() || value <= &lo || value >= &hi {
            return self.slice(axis, value)?.project_drop_axis(axis);
        }
        let mut pts: Vec<RationalVector> = Vec::new();
        let mut sources: Vec<(usize, usize)> = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if &v[axis] == value {
                pts.push(v.drop_axis(axis));
                sources.push((i, i));
            }
        }
        for &(i, j) in self.edges() {
            let (u, w) = (&self.vertices[i], &self.vertices[j]);
            let (a, b) = (&u[axis], &w[axis]);
            if (a < value && value < b) || (b < value && value < a) {
                let t = (value - a) / (b - a);
                pts.push((u + &(w - u).scale(&t)).drop_axis(axis));
                sources.push((i, j));
            }
        }
        let d = self.ambient - 1;
        let mut facets = Vec::new();
        for f in &self.facets {
            let below = f.incidence.ones().any(|i| &self.vertices[i][axis] < value);
            let above = f.incidence.ones().any(|i| &self.vertices[i][axis] > value);
            let inc: Vec<usize> = sources
                .iter()
                .enumerate()
                .filter(|(_, &(i, j))| f.incidence.contains(i) && f.incidence.contains(j))
                .map(|(k, _)| k)
                .collect();
            if !(below && above) {
                // touches the hyperplane from one side: a facet of the
                // section only if the contact has full dimension
                let contact: Vec<Vec<Rational>> =
                    inc.iter().map(|&k| pts[k].coords().to_vec()).collect();
                if inc.len() < d || faces::affine_rank_of(&contact) + 1 < d {
                    continue;
                }
            }
            let offset = &f.offset - &f.normal[axis] * value;
            facets.push((f.normal.drop_axis(axis), offset, inc));
        }
        Ok(Polytope::from_incidences(pts, facets))
    }

    /// Keeps the part on the nonpositive side of `h` (`normal · x <= offset`).
    pub fn cut(&self, h: &Hyperplane) -> Result<Polytope> {
        self.check_dim("cut", h.normal())?;
        let vals: Vec<Rational> = self.vertices.iter().map(|v| h.evaluate(v)).collect();
        let mut pts: Vec<RationalVector> = self
            .vertices
            .iter()
            .zip(&vals)
            .filter(|(_, s)| !s.is_positive())
            .map(|(v, _)| v.clone())
            .collect();
        if pts.is_empty() {
            return Err(Error::precondition("cut", "halfspace misses the polytope"));
        }
        let kept = pts.len();
        let mut sources: Vec<(usize, usize)> = Vec::new();
        for &(i, j) in self.edges() {
            let (si, sj) = (&vals[i], &vals[j]);
            if si.is_negative() && sj.is_positive() || si.is_positive() && sj.is_negative() {
                let t = si / (si - sj);
                let (u, w) = (&self.vertices[i], &self.vertices[j]);
                pts.push(u + &(w - u).scale(&t));
                sources.push((i, j));
            }
        }
        if kept == self.vertices.len() {
            return Ok(self.clone());
        }
        if !self.is_full_dimensional() || !vals.iter().any(Signed::is_negative) {
            return Polytope::from_points(pts);
        }
        // an old facet survives iff it reaches strictly into the kept side;
        // the cut hyperplane itself passes through the interior
        let kept_old: Vec<usize> = (0..self.vertices.len())
            .filter(|&i| !vals[i].is_positive())
            .collect();
        let mut facets = Vec::new();
        for f in &self.facets {
            if !f.incidence.ones().any(|i| vals[i].is_negative()) {
                continue;
            }
            let mut inc: Vec<usize> = kept_old
                .iter()
                .enumerate()
                .filter(|(_, &i)| f.incidence.contains(i))
                .map(|(k, _)| k)
                .collect();
            inc.extend(
                sources
                    .iter()
                    .enumerate()
                    .filter(|(_, &(i, j))| f.incidence.contains(i) && f.incidence.contains(j))
                    .map(|(k, _)| kept + k),
            );
            facets.push((f.normal.clone(), f.offset.clone(), inc));
        }
        let mut inc: Vec<usize> = kept_old
            .iter()
            .enumerate()
            .filter(|(_, &i)| vals[i].is_zero())
            .map(|(k, _)| k)
            .collect();
        inc.extend(kept..pts.len());
        facets.push((h.normal.clone(), h.offset.clone(), inc));
        Ok(Polytope::from_incidences(pts, facets))
    }

    /// [`Polytope::slice_volume`] at several values that no vertex height
    /// separates, or equals: the slices then share their combinatorics.
    pub fn slice_volumes_in_window(
        &self,
        axis: usize,
        values: &[Rational],
    ) -> Result<Vec<Rational>> {
        self.check_axis("slice_volumes_in_window", axis)?;
        let (Some(lo), Some(hi)) = (values.iter().min(), values.iter().max()) else {
            return Ok(Vec::new());
        };
        if !self.is_full_dimensional()
            || self
                .vertices
                .iter()
                .any(|v| &v[axis] >= lo && &v[axis] <= hi)
        {
            return values.iter().map(|t| self.slice_volume(axis, t)).collect();
        }
        let crossing: Vec<(usize, usize)> = self
            .edges()
            .iter()
            .copied()
            .filter(|&(i, j)| {
                let (a, b) = (&self.vertices[i][axis], &self.vertices[j][axis]);
                (a < lo && hi < b) || (b < lo && hi < a)
            })
            .collect();
        let d = self.ambient - 1;
        if crossing.len() <= d {
            return Ok(vec![Rational::zero(); values.len()]);
        }
        let placements: Vec<Vec<Vec<Rational>>> = values
            .iter()
            .map(|value| {
                crossing
                    .iter()
                    .map(|&(i, j)| {
                        let (u, w) = (&self.vertices[i], &self.vertices[j]);
                        let t = (value - &u[axis]) / (&w[axis] - &u[axis]);
                        (u + &(w - u).scale(&t)).drop_axis(axis).into_coords()
                    })
                    .collect()
            })
            .collect();
        if faces::affine_rank_of(&placements[0]) < d {
            return Ok(vec![Rational::zero(); values.len()]);
        }
        let facets: Vec<FixedBitSet> = self
            .facets
            .iter()
            .map(|f| {
                let mut inc = FixedBitSet::with_capacity(crossing.len());
                for (k, &(i, j)) in crossing.iter().enumerate() {
                    if f.incidence.contains(i) && f.incidence.contains(j) {
                        inc.insert(k);
                    }
                }
                inc
            })
            .collect();
        Ok(faces::volumes_from_incidences(&placements, &facets, d))
    }

    /// `(n-1)`-volume of `slice(axis, value)` of a full-dimensional polytope,
    /// without a hull computation: the slice vertices are edge crossings and
    /// vertices at `value`, and each facet `F` contributes the incidence set
    /// `F ∩ {x_axis = value}`.
    pub fn slice_volume(&self, axis: usize, value: &Rational) -> Result<Rational> {
        self.check_axis("slice_volume", axis)?;
        if !self.is_full_dimensional() {
            return Err(Error::Degenerate {
                op: "slice_volume",
                affine_dim: self.affine_dim(),
                required: self.ambient,
            });
        }
        let (lo, hi) = self.axis_extent(axis)?;
        if value < &lo || value > &hi {
            return Err(Error::precondition(
                "slice_volume",
                format!("value {value} outside the axis extent [{lo}, {hi}]"),
            ));
        }
        // each slice vertex with the polytope vertices it comes from
        let mut coords: Vec<Vec<Rational>> = Vec::new();
        let mut sources: Vec<(usize, usize)> = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if &v[axis] == value {
                coords.push(v.drop_axis(axis).into_coords());
                sources.push((i, i));
            }
        }
        for &(i, j) in self.edges() {
            let (u, w) = (&self.vertices[i], &self.vertices[j]);
            let (a, b) = (&u[axis], &w[axis]);
            if (a < value && value < b) || (b < value && value < a) {
                let t = (value - a) / (b - a);
                coords.push((u + &(w - u).scale(&t)).drop_axis(axis).into_coords());
                sources.push((i, j));
            }
        }
        let d = self.ambient - 1;
        if coords.len() <= d || faces::affine_rank_of(&coords) < d {
            return Ok(Rational::zero());
        }
        let facets: Vec<FixedBitSet> = self
            .facets
            .iter()
            .map(|f| {
                let mut inc = FixedBitSet::with_capacity(coords.len());
                for (k, &(i, j)) in sources.iter().enumerate() {
                    if f.incidence.contains(i) && f.incidence.contains(j) {
                        inc.insert(k);
                    }
                }
                inc
            })
            .collect();
        Ok(faces::volume_from_incidences(&coords, &facets, d))
    }

    /// Intersection with the halfspaces `normal · x <= offset`, computed from
    /// the combined inequality system.
    pub fn intersect_halfspaces(&self, halfspaces: &[Hyperplane]) -> Result<Polytope> {
        for h in halfspaces {
            self.check_dim("intersect_halfspaces", h.normal())?;
        }
        let empty = || Error::precondition("intersect_halfspaces", "intersection is empty");
        let d = self.affine_dim();
        if d == 0 {
            let p = &self.vertices[0];
            if halfspaces.iter().all(|h| !h.evaluate(p).is_positive()) {
                return Ok(self.clone());
            }
            return Err(empty());
        }
        // inequalities a·y <= b in chart coordinates, homogenised to (b, -a)
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for f in &self.facets {
            let mut row = vec![f.offset.clone()];
            row.extend(self.flat.pivots.iter().map(|&p| -f.normal[p].clone()));
            rows.push(row);
        }
        for h in halfspaces {
            let (coeffs, constant) = self.flat.pull_back(&h.normal);
            let mut row = vec![&h.offset - constant];
            row.extend(coeffs.into_iter().map(|c| -c));
            rows.push(row);
        }
        let mut t_row = vec![Rational::one()];
        t_row.extend(std::iter::repeat_n(Rational::zero(), d));
        rows.push(t_row);
        let int_rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| crate::rational::primitive_integer_row(r))
            .collect();
        let rays = dd::extreme_rays(&int_rows).expect("bounded polytope gives a pointed cone");
        let pts: Vec<RationalVector> = rays
            .into_iter()
            .filter(|r| r.coords[0].is_positive())
            .map(|r| {
                let t = Rational::from_integer(r.coords[0].clone());
                let y: Vec<Rational> = r.coords[1..]
                    .iter()
                    .map(|c| Rational::from_integer(c.clone()) / &t)
                    .collect();
                self.flat.lift(&y)
            })
            .collect();
        if pts.is_empty() {
            return Err(empty());
        }
        Polytope::from_points(pts)
    }

    /// Orthogonal projection onto `{x_axis = 0}` with that coordinate removed.
    pub fn project_drop_axis(&self, axis: usize) -> Result<Polytope> {
        self.check_axis("project_drop_axis", axis)?;
        Polytope::from_points(self.vertices.iter().map(|v| v.drop_axis(axis)))
    }

    /// Embeds into one more dimension with coordinate `axis` fixed to `value`.
    pub fn insert_axis(&self, axis: usize, value: &Rational) -> Result<Polytope> {
        if axis > self.ambient {
            return Err(Error::AxisOutOfRange {
                op: "insert_axis",
                axis,
                dim: self.ambient + 1,
            });
        }
        Polytope::from_points(
            self.vertices
                .iter()
                .map(|v| v.insert_axis(axis, value.clone())),
        )
    }

    /// Image of the polytope under a map that must be affine.
    pub fn map_vertices(&self, f: impl Fn(&RationalVector) -> RationalVector) -> Result<Polytope> {
        Polytope::from_points(self.vertices.iter().map(f))
    }

    /// Image under the sign flip `x_axis -> -x_axis`.
    pub fn reflect_axis(&self, axis: usize) -> Result<Polytope> {
        self.check_axis("reflect_axis", axis)?;
        let flip = |v: &RationalVector| v.with_coord(axis, -v[axis].clone());
        if !self.is_full_dimensional() {
            return self.map_vertices(flip);
        }
        let facets = self
            .facets
            .iter()
            .map(|f| {
                (
                    flip(&f.normal),
                    f.offset.clone(),
                    f.incidence.ones().collect(),
                )
            })
            .collect();
        Ok(Polytope::from_incidences(
            self.vertices.iter().map(flip).collect(),
            facets,
        ))
    }

    pub fn translate(&self, t: &RationalVector) -> Result<Polytope> {
        self.check_dim("translate", t)?;
        self.map_vertices(|v| v + t)
    }

    pub fn scale(&self, s: &Rational) -> Result<Polytope> {
        self.map_vertices(|v| v.scale(s))
    }

    /// `P + Q = {p + q}` as the hull of pairwise vertex sums.
    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        if other.ambient != self.ambient {
            return Err(Error::DimensionMismatch {
                op: "minkowski_sum",
                expected: self.ambient,
                found: other.ambient,
            });
        }
        Polytope::from_points(
            self.vertices
                .iter()
                .flat_map(|p| other.vertices.iter().map(move |q| p + q)),
        )
    }

    /// True when the two polytopes have the same vertex set.
    pub fn same_vertices(&self, other: &Polytope) -> bool {
        self.vertices == other.vertices
    }

    /// Every vertex of `other` lies in `self`.
    pub fn contains_polytope(&self, other: &Polytope) -> bool {
        other.ambient == self.ambient && other.vertices.iter().all(|v| self.contains_unchecked(v))
    }
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.vertices == other.vertices
    }
}

impl Eq for Polytope {}
