//! Coverings of a body obtained from a covering of a cylinder base.

use num::Signed;

use super::{default_delta, density, verify_refining, CoveringCertificate, LatticeBasis, Verdict};
use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::inscribe::ChainReport;
use crate::rational::{Rational, RationalVector};

/// Halvings of `δ` tried when a verification is inconclusive.
pub(crate) const REFINEMENTS: usize = 3;

/// `Λ ⊕ diag(a_1, …, a_k)`: covers `T × [0,a_1] × … × [0,a_k]` whenever
/// `Λ` covers `T`, at the same density.
pub fn lift_covering(base: &LatticeBasis, heights: &[Rational]) -> Result<LatticeBasis> {
    if heights.iter().any(|h| !h.is_positive()) {
        return Err(Error::precondition(
            "lift_covering",
            "heights must be positive",
        ));
    }
    Ok(base.direct_sum(&LatticeBasis::diagonal(heights)?))
}

#[derive(Clone, Debug)]
pub struct ChainCover {
    /// Lattice covering the original body.
    pub lattice: LatticeBasis,
    /// `V(body) / det`, equal to the chain's volume ratio times the base
    /// covering density.
    pub density_bound: Rational,
    /// The lifted lattice in the cylinder's coordinates.
    pub cylinder_lattice: LatticeBasis,
    pub certificate: CoveringCertificate,
}

/// Lifts `base_cover` through the chain's heights, maps it back to the
/// body's coordinates and re-verifies the covering of `body`. The check
/// runs on a translate of `body`, which covers iff `body` does.
pub fn cover_body_via_chain(
    body: &Polytope,
    report: &ChainReport,
    base_cover: &LatticeBasis,
) -> Result<ChainCover> {
    let cyl = &report.cylinder;
    let n = cyl.dim();
    let k = cyl.k();
    if body.dim_ambient() != n {
        return Err(Error::DimensionMismatch {
            op: "cover_body_via_chain",
            expected: n,
            found: body.dim_ambient(),
        });
    }
    let mut axes: Vec<(usize, Rational)> = cyl.axes().iter().copied().zip(cyl.heights()).collect();
    axes.sort_by_key(|(a, _)| *a);
    if axes.iter().enumerate().any(|(i, (a, _))| *a != n - k + i) {
        return Err(Error::precondition(
            "cover_body_via_chain",
            "cylinder axes must be the last k coordinates",
        ));
    }
    let base = cyl.base_projected();
    if base_cover.dim() != n - k {
        return Err(Error::DimensionMismatch {
            op: "cover_body_via_chain",
            expected: n - k,
            found: base_cover.dim(),
        });
    }
    let base_density = if n > k {
        let cert = verify_refining(&base, base_cover, &default_delta(n - k), REFINEMENTS)?;
        if cert.verdict != Verdict::CertifiedCovered {
            return Err(Error::precondition(
                "cover_body_via_chain",
                format!("base cover is not certified ({})", cert.verdict.as_str()),
            ));
        }
        density(&base, base_cover)?
    } else {
        Rational::from_integer(1.into()) / base_cover.det()
    };
    let heights: Vec<Rational> = axes.into_iter().map(|(_, h)| h).collect();
    let cylinder_lattice = lift_covering(base_cover, &heights)?;
    // the cylinder's corner `o` (base coordinates kept, interval starts on
    // the chain axes) maps to T^{-1}(o); shifting the body back by it puts
    // the cylinder on the cell grid of the lattice coordinates
    let mut corner = RationalVector::zeros(n);
    for (&a, (lo, _)) in cyl.axes().iter().zip(cyl.intervals()) {
        corner[a] = lo.clone();
    }
    let (lattice, shift) = match &report.transform {
        Some(t) => {
            let inv = t.inverse()?;
            (
                cylinder_lattice.transform(inv.linear())?,
                inv.apply(&corner),
            )
        }
        None => (cylinder_lattice.clone(), corner),
    };
    let density_bound = density(body, &lattice)?;
    if density_bound != &report.volume_ratio * &base_density {
        return Err(Error::NotApplicable {
            op: "cover_body_via_chain",
            reason: "density does not factor through the chain".into(),
        });
    }
    let shifted = body.translate(&shift.scale(&Rational::from_integer((-1).into())))?;
    let mut certificate = verify_refining(&shifted, &lattice, &default_delta(n), REFINEMENTS)?;
    for w in &mut certificate.witnesses {
        *w = &*w + &shift;
    }
    Ok(ChainCover {
        lattice,
        density_bound,
        cylinder_lattice,
        certificate,
    })
}
