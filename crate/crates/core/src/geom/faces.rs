//! Combinatorial face computations on top of the facet-vertex incidences:
//! pulling triangulation, exact volume and the edge graph.

use std::collections::HashMap;
use std::rc::Rc;

use fixedbitset::FixedBitSet;
use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use super::Polytope;
use crate::linalg;
use crate::rational::{Rational, RationalVector};

/// Affine dimension of a point set (rank of the difference vectors).
pub fn affine_rank(points: &[RationalVector]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| (p - first).into_coords())
        .collect();
    if diffs.is_empty() {
        0
    } else {
        linalg::rank(&diffs)
    }
}

/// Affine dimension of a point set given as coordinate rows.
pub(crate) fn affine_rank_of(points: &[Vec<Rational>]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() {
        0
    } else {
        linalg::rank(&diffs)
    }
}

/// Facets of the face with vertex set `face`: the inclusion-maximal proper
/// nonempty intersections of `face` with facets of the polytope.
fn facets_of_face(
    face: &FixedBitSet,
    facets: &[FixedBitSet],
    vert_facets: &[FixedBitSet],
) -> Vec<FixedBitSet> {
    let mut touching = FixedBitSet::with_capacity(facets.len());
    for v in face.ones() {
        touching.union_with(&vert_facets[v]);
    }
    let mut cands: Vec<FixedBitSet> = Vec::new();
    for f in touching.ones().map(|i| &facets[i]) {
        if face.is_subset(f) {
            continue;
        }
        let mut g = face.clone();
        g.intersect_with(f);
        if cands.contains(&g) {
            continue;
        }
        cands.push(g);
    }
    let maximal: Vec<bool> = cands
        .iter()
        .enumerate()
        .map(|(i, g)| {
            !cands
                .iter()
                .enumerate()
                .any(|(j, h)| i != j && g.is_subset(h))
        })
        .collect();
    cands
        .into_iter()
        .zip(maximal)
        .filter_map(|(g, m)| m.then_some(g))
        .collect()
}

struct Triangulator<'a> {
    facets: &'a [FixedBitSet],
    vert_facets: Vec<FixedBitSet>,
    memo: HashMap<FixedBitSet, Rc<Vec<Vec<usize>>>>,
}

impl Triangulator<'_> {
    /// Pulling triangulation: cone from the lowest-index vertex over the
    /// triangulations of the facets that miss it.
    fn run(&mut self, face: &FixedBitSet) -> Rc<Vec<Vec<usize>>> {
        if let Some(t) = self.memo.get(face) {
            return Rc::clone(t);
        }
        let apex = face.minimum().expect("nonempty face");
        let out = if face.count_ones(..) == 1 {
            vec![vec![apex]]
        } else {
            let mut out = Vec::new();
            for sub in facets_of_face(face, self.facets, &self.vert_facets) {
                if sub.contains(apex) {
                    continue;
                }
                for s in self.run(&sub).iter() {
                    let mut simplex = Vec::with_capacity(s.len() + 1);
                    simplex.push(apex);
                    simplex.extend_from_slice(s);
                    out.push(simplex);
                }
            }
            out
        };
        let out = Rc::new(out);
        self.memo.insert(face.clone(), Rc::clone(&out));
        out
    }
}

/// Simplices (as vertex index lists) of a triangulation of the polytope.
pub(crate) fn triangulation(p: &Polytope) -> Vec<Vec<usize>> {
    if p.affine_dim() == 0 {
        return vec![vec![0]];
    }
    let facets: Vec<FixedBitSet> = p.facets().iter().map(|f| f.incidence().clone()).collect();
    triangulate(p.num_vertices(), &facets)
}

/// Pulling triangulation from facet incidences alone. `facets` may also list
/// lower-dimensional faces: only inclusion-maximal sets act as facets.
fn triangulate(nv: usize, facets: &[FixedBitSet]) -> Vec<Vec<usize>> {
    let mut all = FixedBitSet::with_capacity(nv);
    all.insert_range(..);
    let mut vert_facets = vec![FixedBitSet::with_capacity(facets.len()); nv];
    for (f, inc) in facets.iter().enumerate() {
        for v in inc.ones() {
            vert_facets[v].insert(f);
        }
    }
    let mut t = Triangulator {
        facets,
        vert_facets,
        memo: HashMap::new(),
    };
    let res = t.run(&all);
    res.as_ref().clone()
}

/// Volume measured in the pivot-coordinate chart of the affine hull.
pub(crate) fn chart_volume(p: &Polytope) -> Rational {
    let d = p.affine_dim();
    if d == 0 {
        return Rational::from_integer(BigInt::from(1));
    }
    let charts: Vec<Vec<Rational>> = p.vertices().iter().map(|v| p.flat.chart(v)).collect();
    simplex_volume_sum(&charts, &triangulation(p), d)
}

/// Volume of a `d`-polytope given by full-dimensional coordinates of its
/// vertices and the vertex sets of its facets (plus possibly smaller faces).
pub(crate) fn volume_from_incidences(
    coords: &[Vec<Rational>],
    facets: &[FixedBitSet],
    d: usize,
) -> Rational {
    if d == 0 {
        return Rational::from_integer(BigInt::from(1));
    }
    simplex_volume_sum(coords, &triangulate(coords.len(), facets), d)
}

/// [`volume_from_incidences`] for several placements of the same vertices
/// sharing one face lattice, triangulated once.
pub(crate) fn volumes_from_incidences(
    placements: &[Vec<Vec<Rational>>],
    facets: &[FixedBitSet],
    d: usize,
) -> Vec<Rational> {
    let Some(first) = placements.first() else {
        return Vec::new();
    };
    let simplices = triangulate(first.len(), facets);
    placements
        .iter()
        .map(|c| simplex_volume_sum(c, &simplices, d))
        .collect()
}

fn simplex_volume_sum(charts: &[Vec<Rational>], simplices: &[Vec<usize>], d: usize) -> Rational {
    // homogeneous rows (q, q·x) with q the denominator of the point, so that
    // d! · vol(s) = |det[(q_i, q_i x_i)]| / ∏ q_i; the sum is kept over the
    // running lcm of those products
    let rows: Vec<Vec<BigInt>> = charts
        .iter()
        .map(|c| {
            let q = c.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            let mut row = Vec::with_capacity(d + 1);
            row.push(q.clone());
            row.extend(c.iter().map(|x| x.numer() * (&q / x.denom())));
            row
        })
        .collect();
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|c| c.iter().map(|x| x.to_i128()).collect())
        .collect();
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for s in simplices {
        let det = small
            .as_ref()
            .and_then(|v| linalg::bareiss_i128(s.iter().map(|&i| v[i].clone()).collect()))
            .map(BigInt::from)
            .unwrap_or_else(|| linalg::bareiss(s.iter().map(|&i| rows[i].clone()).collect()))
            .abs();
        let weight: BigInt = s.iter().map(|&i| &rows[i][0]).product();
        let (cofactor, rem) = den.div_rem(&weight);
        if rem.is_zero() {
            num += det * cofactor;
        } else {
            let g = den.gcd(&weight);
            let grow = &weight / &g;
            num = num * &grow + det * (&den / &g);
            den *= grow;
        }
    }
    let fact: BigInt = (1..=d).map(BigInt::from).product();
    Rational::new(num, den * fact)
}

/// Vertex pairs whose smallest common face has exactly those two vertices.
pub(crate) fn edges(p: &Polytope) -> Vec<(usize, usize)> {
    let nv = p.num_vertices();
    let d = p.affine_dim();
    match d {
        0 => return Vec::new(),
        1 => return vec![(0, 1)],
        _ => {}
    }
    let nf = p.facets().len();
    let mut vert_facets = vec![FixedBitSet::with_capacity(nf); nv];
    for (f, facet) in p.facets().iter().enumerate() {
        for v in facet.incidence().ones() {
            vert_facets[v].insert(f);
        }
    }
    let mut out = Vec::new();
    for i in 0..nv {
        for j in i + 1..nv {
            let mut common = vert_facets[i].clone();
            common.intersect_with(&vert_facets[j]);
            if common.count_ones(..) + 1 < d {
                continue;
            }
            let mut face = FixedBitSet::with_capacity(nv);
            face.insert_range(..);
            for f in common.ones() {
                face.intersect_with(p.facets()[f].incidence());
            }
            if face.count_ones(..) == 2 {
                out.push((i, j));
            }
        }
    }
    out
}
