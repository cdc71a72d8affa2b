//! Double description method: extreme rays of a pointed polyhedral cone
//! `{y : A y >= 0}` with exact integer arithmetic.
//!
//! Used in both directions: facets from points (rows `(1, -v)`) and vertices
//! from inequalities (rows `(b, -a)` plus `t >= 0`).

use fixedbitset::FixedBitSet;
use num::{BigInt, Signed, Zero};

use crate::linalg;
use crate::rational::{normalize_primitive, Rational};

#[derive(Clone, Debug)]
pub(crate) struct Ray {
    pub coords: Vec<BigInt>,
    /// Rows of the input that vanish on this ray.
    pub zero: FixedBitSet,
}

fn eval(row: &[BigInt], ray: &[BigInt]) -> BigInt {
    row.iter()
        .zip(ray)
        .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
}

/// Extreme rays of `{y : rows · y >= 0}`. Returns `None` when the rows do not
/// have full column rank (the cone is not pointed).
pub(crate) fn extreme_rays(rows: &[Vec<BigInt>]) -> Option<Vec<Ray>> {
    let m = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    if width == 0 {
        return None;
    }

    // greedy choice of `width` independent rows
    let as_rat = |r: &Vec<BigInt>| -> Vec<Rational> {
        r.iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect()
    };
    let mut basis_idx: Vec<usize> = Vec::with_capacity(width);
    let mut echelon: Vec<Vec<Rational>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial = echelon.clone();
        trial.push(as_rat(r));
        let (red, piv) = linalg::rref(&trial);
        if piv.len() > echelon.len() {
            echelon = red;
            basis_idx.push(i);
            if basis_idx.len() == width {
                break;
            }
        }
    }
    if basis_idx.len() < width {
        return None;
    }

    let a0: Vec<Vec<Rational>> = basis_idx.iter().map(|&i| as_rat(&rows[i])).collect();
    let inv = linalg::inverse(&a0)?;
    let mut rays: Vec<Ray> = (0..width)
        .map(|j| {
            let col: Vec<Rational> = inv.iter().map(|row| row[j].clone()).collect();
            let den = crate::rational::common_denominator(&col);
            let mut coords: Vec<BigInt> =
                col.iter().map(|v| v.numer() * (&den / v.denom())).collect();
            normalize_primitive(&mut coords);
            let mut zero = FixedBitSet::with_capacity(m);
            for (k, &bi) in basis_idx.iter().enumerate() {
                if k != j {
                    zero.insert(bi);
                }
            }
            Ray { coords, zero }
        })
        .collect();

    let mut in_basis = FixedBitSet::with_capacity(m);
    for &i in &basis_idx {
        in_basis.insert(i);
    }

    for (i, row) in rows.iter().enumerate() {
        if in_basis.contains(i) {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| eval(row, &r.coords)).collect();
        let plus: Vec<usize> = (0..rays.len())
            .filter(|&k| values[k].is_positive())
            .collect();
        let minus: Vec<usize> = (0..rays.len())
            .filter(|&k| values[k].is_negative())
            .collect();
        if minus.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if values[k].is_zero() {
                    r.zero.insert(i);
                }
            }
            continue;
        }

        let mut fresh = Vec::new();
        for &p in &plus {
            for &q in &minus {
                let shared: u32 = rays[p]
                    .zero
                    .as_slice()
                    .iter()
                    .zip(rays[q].zero.as_slice())
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                if shared as usize + 2 < width {
                    continue;
                }
                let mut common = rays[p].zero.clone();
                common.intersect_with(&rays[q].zero);
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != p && k != q && common.is_subset(&r.zero));
                if blocked {
                    continue;
                }
                let vp = &values[p];
                let vq = -&values[q];
                let mut coords: Vec<BigInt> = rays[q]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(cq, cp)| vp * cq + &vq * cp)
                    .collect();
                normalize_primitive(&mut coords);
                common.insert(i);
                fresh.push(Ray {
                    coords,
                    zero: common,
                });
            }
        }

        let mut next: Vec<Ray> = Vec::with_capacity(plus.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if values[k].is_positive() {
                next.push(r);
            } else if values[k].is_zero() {
                r.zero.insert(i);
                next.push(r);
            }
        }
        next.extend(fresh);
        rays = next;
    }
    Some(rays)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[i64]]) -> Vec<Vec<BigInt>> {
        r.iter()
            .map(|x| x.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn square_facets() {
        // points of [0,1]^2 lifted as (1, -x, -y)
        let r = rows(&[&[1, 0, 0], &[1, -1, 0], &[1, 0, -1], &[1, -1, -1]]);
        let rays = extreme_rays(&r).unwrap();
        assert_eq!(rays.len(), 4);
        for ray in &rays {
            assert_eq!(ray.zero.count_ones(..), 2);
        }
    }

    #[test]
    fn redundant_point_gives_no_extra_facets() {
        let r = rows(&[&[1, 0, 0], &[2, -1, -1], &[1, -1, 0], &[1, 0, -1]]);
        let rays = extreme_rays(&r).unwrap();
        assert_eq!(rays.len(), 3);
    }

    #[test]
    fn rank_deficient_rows_are_rejected() {
        let r = rows(&[&[1, 1], &[2, 2]]);
        assert!(extreme_rays(&r).is_none());
    }
}
