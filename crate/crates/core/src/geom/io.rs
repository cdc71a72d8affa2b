//! Plain-text polytope format.
//!
//! ```text
//! # unit square
//! dim 2
//! 0 0
//! 1 0
//! 0 1
//! 1 1
//! ```
//!
//! Coordinates are exact rationals written `p/q` or as integers. Blank lines
//! and everything after `#` are ignored.

use std::fmt::Write;

use super::Polytope;
use crate::error::{Error, Result};
use crate::rational::{fmt_compact, parse_rational, RationalVector};

/// Parses a `dim <n>` header followed by rows of `n` rationals. Returns the
/// dimension and the rows with their 1-based line numbers.
pub fn parse_rows(text: &str) -> Result<(usize, Vec<(usize, RationalVector)>)> {
    let mut dim = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(n) = dim else {
            let mut it = line.split_whitespace();
            let (Some("dim"), Some(v), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("expected `dim <n>` header, found `{line}`"),
                });
            };
            let n: usize = v.parse().map_err(|_| Error::Parse {
                line: line_no,
                reason: format!("invalid dimension `{v}`"),
            })?;
            dim = Some(n);
            continue;
        };
        let coords = line
            .split_whitespace()
            .map(parse_rational)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|reason| Error::Parse {
                line: line_no,
                reason,
            })?;
        if coords.len() != n {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("expected {n} coordinates, found {}", coords.len()),
            });
        }
        rows.push((line_no, RationalVector::new(coords)));
    }
    let Some(n) = dim else {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            reason: "missing `dim <n>` header".into(),
        });
    };
    Ok((n, rows))
}

pub fn parse_polytope(text: &str) -> Result<Polytope> {
    let (n, rows) = parse_rows(text)?;
    if rows.is_empty() {
        if n == 0 {
            return Polytope::from_points([RationalVector::zeros(0)]);
        }
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            reason: "polytope file lists no vertices".into(),
        });
    }
    Polytope::from_points(rows.into_iter().map(|(_, v)| v))
}

pub fn format_rows<'a>(dim: usize, rows: impl IntoIterator<Item = &'a RationalVector>) -> String {
    let mut out = format!("dim {dim}\n");
    for r in rows {
        let line: Vec<String> = r.iter().map(fmt_compact).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

pub fn format_polytope(p: &Polytope) -> String {
    format_rows(p.dim_ambient(), p.vertices())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn parses_comments_and_fractions() {
        let text = "# a triangle\n\ndim 2\n0 0 # origin\n2 0\n0 1/2\n1/2 1/8\n";
        let p = parse_polytope(text).unwrap();
        assert_eq!(p.num_vertices(), 3);
        assert_eq!(p.volume().unwrap(), rat(1, 2));
        let again = parse_polytope(&format_polytope(&p)).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_polytope("dim 2\n0 0\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_polytope("dim 2\n0 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_polytope("0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }
}
