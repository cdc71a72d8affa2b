//! Lattice coverings: `K + Λ = R^n`.
//!
//! [`verify_covering`] certifies a covering exactly by cutting the
//! fundamental cell of the lattice into small boxes (in basis coordinates)
//! and finding, for each, one lattice translate of `K` that contains it.

mod chain;
mod search;
mod verify;

use std::fmt::Write;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::io::parse_rows;
use crate::geom::Polytope;
use crate::linalg::{self, Matrix};
use crate::rational::{fmt_compact, Rational, RationalVector};

pub use chain::{cover_body_via_chain, lift_covering, ChainCover};
pub use search::{search_covering_lattice, SearchResult};
pub use verify::{default_delta, verify_covering, verify_refining, CoveringCertificate, Verdict};

/// A full-rank lattice `Λ = B Z^n`, stored by its generating columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    columns: Vec<RationalVector>,
    det: Rational,
}

impl LatticeBasis {
    pub fn new(columns: Vec<RationalVector>) -> Result<Self> {
        let n = columns.len();
        if let Some(c) = columns.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch {
                op: "lattice",
                expected: n,
                found: c.dim(),
            });
        }
        let rows: Matrix = linalg::transpose(
            &columns
                .iter()
                .map(|c| c.coords().to_vec())
                .collect::<Vec<_>>(),
        );
        let det = if n == 0 {
            Rational::from_integer(1.into())
        } else {
            linalg::det(&rows).abs()
        };
        if det.is_zero() {
            return Err(Error::precondition("lattice", "basis is singular"));
        }
        Ok(LatticeBasis { columns, det })
    }

    /// Lattice from a row-major matrix whose columns are the generators.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        let cols = linalg::transpose(m);
        Self::new(cols.into_iter().map(RationalVector::new).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Rational::from_integer(1.into()); n]).expect("identity")
    }

    pub fn diagonal(d: &[Rational]) -> Result<Self> {
        let n = d.len();
        Self::new(
            (0..n)
                .map(|i| RationalVector::unit(n, i).scale(&d[i]))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[RationalVector] {
        &self.columns
    }

    /// Row-major matrix `B` with the generators as columns.
    pub fn matrix(&self) -> Matrix {
        linalg::transpose(
            &self
                .columns
                .iter()
                .map(|c| c.coords().to_vec())
                .collect::<Vec<_>>(),
        )
    }

    /// `|det B|`, the volume of a fundamental cell.
    pub fn det(&self) -> &Rational {
        &self.det
    }

    pub fn point(&self, z: &[i64]) -> RationalVector {
        let mut p = RationalVector::zeros(self.dim());
        for (c, &zi) in self.columns.iter().zip(z) {
            p = &p + &c.scale(&Rational::from_integer(zi.into()));
        }
        p
    }

    /// `M Λ` for an invertible matrix `M`.
    pub fn transform(&self, m: &Matrix) -> Result<Self> {
        Self::new(
            self.columns
                .iter()
                .map(|c| RationalVector::new(linalg::mat_vec(m, c.coords())))
                .collect(),
        )
    }

    /// `Λ ⊕ Λ'` on the coordinates of `self` followed by those of `other`.
    pub fn direct_sum(&self, other: &LatticeBasis) -> LatticeBasis {
        let (a, b) = (self.dim(), other.dim());
        let mut cols = Vec::with_capacity(a + b);
        for c in &self.columns {
            let mut v = c.coords().to_vec();
            v.extend(std::iter::repeat_n(Rational::zero(), b));
            cols.push(RationalVector::new(v));
        }
        for c in &other.columns {
            let mut v = vec![Rational::zero(); a];
            v.extend(c.iter().cloned());
            cols.push(RationalVector::new(v));
        }
        LatticeBasis::new(cols).expect("direct sum of bases is a basis")
    }

    /// Parses `dim n` followed by `n` basis columns.
    pub fn parse(text: &str) -> Result<Self> {
        let (n, rows) = parse_rows(text)?;
        if rows.len() != n {
            return Err(Error::Parse {
                line: rows.last().map_or(1, |r| r.0),
                reason: format!("expected {n} basis columns, found {}", rows.len()),
            });
        }
        Self::new(rows.into_iter().map(|(_, v)| v).collect())
    }

    pub fn format(&self) -> String {
        let mut out = format!("dim {}\n", self.dim());
        for c in &self.columns {
            let line: Vec<String> = c.iter().map(fmt_compact).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }
}

/// `V(K) / |det Λ|`.
pub fn density(k: &Polytope, l: &LatticeBasis) -> Result<Rational> {
    if k.dim_ambient() != l.dim() {
        return Err(Error::DimensionMismatch {
            op: "density",
            expected: k.dim_ambient(),
            found: l.dim(),
        });
    }
    Ok(k.content(k.dim_ambient())? / l.det())
}
