//! Built-in bodies used by the CLI and the acceptance suite.

use std::fmt;
use std::str::FromStr;

use num::BigInt;

use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::rational::{int, simplest_between, Rational, RationalVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixture {
    UnitCube,
    Simplex,
    CrossPolytope,
    /// Rational approximation of a regular simplex.
    RegularSimplex,
    /// `conv(T × {0} ∪ {0} × T)` in `R^4`, `T = conv{(1,0), (0,1), (-1,-1)}`.
    Remark1Q,
    /// `conv{(0,0), (2,0), (0,1)}`.
    Triangle,
}

impl Fixture {
    pub const ALL: [Fixture; 6] = [
        Fixture::UnitCube,
        Fixture::Simplex,
        Fixture::CrossPolytope,
        Fixture::RegularSimplex,
        Fixture::Remark1Q,
        Fixture::Triangle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Fixture::UnitCube => "unit-cube",
            Fixture::Simplex => "simplex",
            Fixture::CrossPolytope => "cross-polytope",
            Fixture::RegularSimplex => "regular-simplex",
            Fixture::Remark1Q => "remark1-Q",
            Fixture::Triangle => "triangle",
        }
    }

    /// Dimension when the fixture has only one.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            Fixture::Remark1Q => Some(4),
            Fixture::Triangle => Some(2),
            _ => None,
        }
    }

    /// The fixture in dimension `dim` (ignored by fixed-dimension fixtures,
    /// unless it conflicts).
    pub fn build(&self, dim: usize) -> Result<Polytope> {
        if let Some(d) = self.fixed_dim() {
            if dim != d {
                return Err(Error::precondition(
                    "fixture",
                    format!("{} exists only in dimension {d}", self.name()),
                ));
            }
        } else if dim == 0 {
            return Err(Error::precondition("fixture", "dimension must be positive"));
        }
        match self {
            Fixture::UnitCube => Ok(Polytope::unit_cube(dim)),
            Fixture::Simplex => Ok(Polytope::standard_simplex(dim)),
            Fixture::CrossPolytope => Ok(Polytope::cross_polytope(dim)),
            Fixture::RegularSimplex => regular_simplex(dim),
            Fixture::Remark1Q => remark1_q(),
            Fixture::Triangle => Polytope::from_points([
                RationalVector::from_ints(&[0, 0]),
                RationalVector::from_ints(&[2, 0]),
                RationalVector::from_ints(&[0, 1]),
            ]),
        }
    }

    /// [`Fixture::build`] at the fixed dimension, or at `default` otherwise.
    pub fn build_default(&self, default: usize) -> Result<Polytope> {
        self.build(self.fixed_dim().unwrap_or(default))
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Fixture::ALL.iter().map(|f| f.name()).collect();
                Error::precondition(
                    "fixture",
                    format!("unknown fixture {s:?} ({})", names.join(", ")),
                )
            })
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `e_1, …, e_n` and `t (1, …, 1)`: all edges have length `sqrt 2` when
/// `n t^2 - 2t - 1 = 0`, i.e. `t = (1 + sqrt(n + 1)) / n`. `t` is replaced
/// by the simplest rational within `10^-9`; exact when `n + 1` is a square.
pub fn regular_simplex(n: usize) -> Result<Polytope> {
    let scale = BigInt::from(10u64.pow(9));
    let s = (BigInt::from(n + 1) * &scale * &scale).sqrt();
    let lo = Rational::new(s.clone(), scale.clone());
    let hi = Rational::new(s + 1, scale);
    let nn = int(n as i64);
    let t = simplest_between(&((int(1) + lo) / &nn), &((int(1) + hi) / &nn));
    let mut pts: Vec<RationalVector> = (0..n).map(|i| RationalVector::unit(n, i)).collect();
    pts.push(RationalVector::new(vec![t; n]));
    Polytope::from_points(pts)
}

fn remark1_q() -> Result<Polytope> {
    let t = [[1, 0], [0, 1], [-1, -1]];
    let pts = t.iter().flat_map(|&[a, b]| {
        [
            RationalVector::from_ints(&[a, b, 0, 0]),
            RationalVector::from_ints(&[0, 0, a, b]),
        ]
    });
    Polytope::from_points(pts)
}
