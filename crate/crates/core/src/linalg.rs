//! Small dense exact linear algebra over the rationals.

use num::{BigInt, One, Signed, Zero};

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<Rational>]) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// Rank by incremental elimination, stopping once it reaches the column count.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
    for r in rows {
        let mut d = r.clone();
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
            if echelon.len() == ncols {
                break;
            }
        }
    }
    echelon.len()
}

/// Determinant by fraction-free-ish Gaussian elimination.
pub fn det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &piv;
            for j in c..n {
                let delta = &f * &a[c][j];
                a[i][j] -= delta;
            }
        }
    }
    d
}

/// Integer determinant by Bareiss elimination.
pub fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            a.swap(p, c);
            sign = -sign;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                a[i][j] = (&a[i][j] * &a[c][c] - &a[i][c] * &a[c][j]) / &prev;
            }
        }
        prev = a[c][c].clone();
    }
    if n == 0 {
        return sign;
    }
    sign * &a[n - 1][n - 1]
}

/// [`bareiss`] in `i128`, `None` on overflow.
pub fn bareiss_i128(mut a: Vec<Vec<i128>>) -> Option<i128> {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| a[i][c] != 0) else {
            return Some(0);
        };
        if p != c {
            a.swap(p, c);
            sign = -sign;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                let x = a[i][j]
                    .checked_mul(a[c][c])?
                    .checked_sub(a[i][c].checked_mul(a[c][j])?)?;
                a[i][j] = x / prev;
            }
        }
        prev = a[c][c];
    }
    if n == 0 {
        return Some(sign);
    }
    Some(sign * a[n - 1][n - 1])
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(m: &[Vec<Rational>]) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    let (red, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose(m: &[Vec<Rational>]) -> Matrix {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

pub fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| crate::rational::dot(row, v)).collect()
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Matrix {
    let bt = transpose(b);
    a.iter()
        .map(|row| {
            bt.iter()
                .map(|col| crate::rational::dot(row, col))
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Basis of the null space `{x : m x = 0}`.
pub fn null_space(m: &[Vec<Rational>], ncols: usize) -> Matrix {
    let (red, pivots) = rref(m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &p) in red.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    #[test]
    fn bareiss_matches_rational_det() {
        let rows: [&[i64]; 4] = [
            &[0, 2, -1, 3],
            &[4, 1, 0, -2],
            &[1, -3, 5, 1],
            &[2, 2, 2, 7],
        ];
        let expected = det(&m(&rows));
        let big = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        assert_eq!(Rational::from_integer(bareiss(big)), expected);
        let small = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        assert_eq!(
            Rational::from_integer(bareiss_i128(small).unwrap().into()),
            expected
        );
        assert_eq!(
            bareiss_i128(vec![vec![i128::MAX, 2], vec![2, i128::MAX]]),
            None
        );
        assert_eq!(
            bareiss(vec![
                vec![BigInt::from(1), BigInt::from(2)],
                vec![BigInt::from(2), BigInt::from(4)]
            ]),
            BigInt::zero()
        );
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(det(&a), int(18));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn rank_and_null_space() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = null_space(&a, 3);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&a, &ns[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn perfect_square_roots() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&int(2)), None);
    }
}
