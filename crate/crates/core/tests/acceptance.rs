//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use astro_float::{BigFloat, RoundingMode};
use num::{BigInt, One, Signed, Zero};

use lattice_cover::bodies::{
    generate, AntiBlockingPolytope, BodyKind, LocallyAntiBlockingPolytope,
};
use lattice_cover::bounds::{choose_k, lemma1_bound, theorem_bound, Variant};
use lattice_cover::covering::{
    cover_body_via_chain, density, search_covering_lattice, verify_covering, LatticeBasis, Verdict,
};
use lattice_cover::fixtures::Fixture;
use lattice_cover::inscribe::{
    best_slice_cylinder, kfold_chain_ab, kfold_chain_lab, kfold_chains_ab, kfold_chains_lab,
    lemma5_cylinder,
};
use lattice_cover::linalg;
use lattice_cover::{Error, Hyperplane, Polytope, Rational, RationalVector};

const SEEDS: u64 = 50;
const DIMS: std::ops::RangeInclusive<usize> = 2..=6;

type Outcome = Result<String, String>;

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn int(p: i64) -> Rational {
    Rational::from_integer(p.into())
}

/// `(1 + 1/m)^m` by repeated multiplication, `1` for `m = 0`.
fn factor(m: usize) -> Rational {
    if m == 0 {
        return Rational::one();
    }
    let base = Rational::new(BigInt::from(m + 1), BigInt::from(m));
    std::iter::repeat_n(base, m).product()
}

fn ab_bound(n: usize, k: usize) -> Rational {
    (n - k..n).map(factor).product()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T>(r: lattice_cover::Result<T>, ctx: impl FnOnce() -> String) -> Result<T, String> {
    r.map_err(|err| format!("{}: {err}", ctx()))
}

fn lemma5_identity() -> Outcome {
    let mut count = 0;
    for n in DIMS {
        let expected = factor(n - 1);
        for seed in 0..SEEDS {
            let p = e(generate(BodyKind::Np2, n, seed), || {
                format!("n={n} seed={seed}")
            })?;
            let c = e(lemma5_cylinder(&p), || format!("n={n} seed={seed}"))?;
            check(c.ratio == expected, || {
                format!("n={n} seed={seed}: ratio {}", c.ratio)
            })?;
            // second route: V(P) |det T| / V(C)
            let det = linalg::det(c.transform.linear()).abs();
            let via_det = e(p.volume(), || "volume".into())? * det
                / e(c.cylinder.volume(), || "volume".into())?;
            check(via_det == expected, || {
                format!("n={n} seed={seed}: det route {via_det}")
            })?;
            let image = e(c.transform.apply_polytope(&p), || "transform".into())?;
            check(c.cylinder.is_inside(&image), || {
                format!("n={n} seed={seed}: cylinder escapes")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} bodies, ratio = (1+1/(n-1))^(n-1) exactly"))
}

fn ab_chains() -> Outcome {
    let mut chains = 0;
    for n in DIMS {
        for seed in 0..SEEDS {
            let f = e(
                generate(BodyKind::Ab, n, seed).and_then(AntiBlockingPolytope::new),
                || format!("n={n} seed={seed}"),
            )?;
            let reports = e(kfold_chains_ab(&f, n), || format!("n={n} seed={seed}"))?;
            for (k, r) in (1..=n).zip(reports) {
                let bound = ab_bound(n, k);
                check(r.certified && r.volume_ratio <= bound, || {
                    format!(
                        "n={n} seed={seed} k={k}: ratio {} bound {bound}",
                        r.volume_ratio
                    )
                })?;
                chains += 1;
            }
        }
        let s = e(
            AntiBlockingPolytope::new(Polytope::standard_simplex(n)),
            || "simplex".into(),
        )?;
        let r = e(kfold_chain_ab(&s, 1), || format!("simplex n={n}"))?;
        check(r.volume_ratio == factor(n - 1), || {
            format!("simplex n={n}: {}", r.volume_ratio)
        })?;
    }
    Ok(format!(
        "{chains} chains within the product bound, simplex step 1 tight"
    ))
}

fn half_volume(p: &Polytope, axis: usize, negative: bool) -> Result<Rational, String> {
    let n = p.dim_ambient();
    let mut normal = RationalVector::unit(n, axis);
    if !negative {
        normal = -&normal;
    }
    let h = e(Hyperplane::new(normal, Rational::zero()), || {
        "halfspace".into()
    })?;
    e(p.cut(&h).and_then(|c| c.volume()), || "half volume".into())
}

fn lab_chains() -> Outcome {
    let mut chains = 0;
    for kind in [BodyKind::Lab, BodyKind::Unc] {
        for n in DIMS {
            for seed in 0..SEEDS {
                let l = e(
                    generate(kind, n, seed).and_then(LocallyAntiBlockingPolytope::new),
                    || format!("{kind} n={n} seed={seed}"),
                )?;
                let reports = e(kfold_chains_lab(&l, n), || {
                    format!("{kind} n={n} seed={seed}")
                })?;
                for (k, r) in (1..=n).zip(reports) {
                    let bound = int(1 << k) * ab_bound(n, k);
                    check(r.certified && r.volume_ratio <= bound, || {
                        format!(
                            "{kind} n={n} seed={seed} k={k}: ratio {} bound {bound}",
                            r.volume_ratio
                        )
                    })?;
                    chains += 1;
                }
            }
        }
    }
    // sign-symmetric fixtures: the kept half has exactly half the volume
    let mut symmetric: Vec<(String, Polytope)> = Vec::new();
    for n in DIMS {
        let lo = vec![int(-1); n];
        let hi = vec![int(1); n];
        symmetric.push((
            format!("cube n={n}"),
            Polytope::box_from_bounds(&lo, &hi).map_err(|x| x.to_string())?,
        ));
        symmetric.push((format!("cross n={n}"), Polytope::cross_polytope(n)));
        for seed in 0..5 {
            symmetric.push((
                format!("unc n={n} seed={seed}"),
                generate(BodyKind::Unc, n, seed).map_err(|x| x.to_string())?,
            ));
        }
    }
    for (name, p) in &symmetric {
        let n = p.dim_ambient();
        let l = e(LocallyAntiBlockingPolytope::new(p.clone()), || name.clone())?;
        let r = e(kfold_chain_lab(&l, 1), || name.clone())?;
        let step = &r.steps[0];
        let half = half_volume(p, step.axis, step.slice_height.is_negative())?;
        let split = &step.body_volume / half;
        check(split <= int(2) && split == int(2), || {
            format!("{name}: split factor {split}")
        })?;
        check(r.volume_ratio <= int(2) * factor(n - 1), || {
            format!("{name}: ratio {}", r.volume_ratio)
        })?;
    }
    Ok(format!(
        "{chains} chains within 2^k times the product, split factor 2 on {} symmetric bodies",
        symmetric.len()
    ))
}

fn lemma2_realization() -> Outcome {
    let mut cases = 0;
    for n in DIMS {
        let lower = factor(n - 1);
        for seed in 0..SEEDS {
            let f = e(
                generate(BodyKind::Ab, n, seed).and_then(AntiBlockingPolytope::new),
                || format!("n={n} seed={seed}"),
            )?;
            let v = e(f.polytope().volume(), || "volume".into())?;
            for axis in 0..n {
                let sc = e(best_slice_cylinder(&f, axis), || {
                    format!("n={n} seed={seed} axis={axis}")
                })?;
                check(&sc.value * &lower >= v, || {
                    format!("n={n} seed={seed} axis={axis}: value {}", sc.value)
                })?;
                cases += 1;
            }
        }
        let s = e(
            AntiBlockingPolytope::new(Polytope::standard_simplex(n)),
            || "simplex".into(),
        )?;
        // V(simplex) = 1/n!
        let v: Rational = (1..=n as i64).map(|i| rat(1, i)).product();
        for axis in 0..n {
            let sc = e(best_slice_cylinder(&s, axis), || format!("simplex n={n}"))?;
            check(&sc.value * &lower == v, || {
                format!("simplex n={n} axis={axis}: {}", sc.value)
            })?;
        }
    }
    Ok(format!("{cases} (body, axis) pairs, equality on simplices"))
}

/// Whether `x` lies in `k + l` for some lattice point with small coefficients.
fn covered(k: &Polytope, l: &LatticeBasis, x: &RationalVector, r: i64) -> bool {
    let n = l.dim();
    let mut z = vec![-r; n];
    loop {
        let y = x - &l.point(&z);
        if k.contains(&y).unwrap() {
            return true;
        }
        let mut i = 0;
        while i < n && z[i] == r {
            z[i] = -r;
            i += 1;
        }
        if i == n {
            return false;
        }
        z[i] += 1;
    }
}

fn covering_soundness() -> Outcome {
    let delta = rat(1, 8);
    for n in 2..=3 {
        let cube = Polytope::unit_cube(n);
        let id = LatticeBasis::identity(n);
        let c = e(verify_covering(&cube, &id, &delta), || {
            format!("cube n={n}")
        })?;
        let d = e(density(&cube, &id), || "density".into())?;
        check(
            c.verdict == Verdict::CertifiedCovered && d == int(1),
            || format!("cube n={n}: {} density {d}", c.verdict.as_str()),
        )?;
        let mut diag = vec![int(1); n];
        diag[0] = rat(11, 10);
        let stretched = e(LatticeBasis::diagonal(&diag), || "diag".into())?;
        let c = e(verify_covering(&cube, &stretched, &delta), || {
            format!("stretched n={n}")
        })?;
        check(
            c.verdict == Verdict::Counterexample && !c.witnesses.is_empty(),
            || format!("stretched n={n}: {}", c.verdict.as_str()),
        )?;
        for w in &c.witnesses {
            check(!covered(&cube, &stretched, w, 3), || {
                format!("stretched n={n}: witness {w:?} is covered")
            })?;
        }
    }
    // no lattice of density below 1 is ever certified
    let mut cases = 0;
    for n in 2..=3 {
        for kind in [BodyKind::Ab, BodyKind::Lab, BodyKind::Np2] {
            for seed in 0..6 {
                let k = e(generate(kind, n, seed), || format!("{kind} n={n}"))?;
                let v = e(k.volume(), || "volume".into())?;
                for (num, den) in [(11, 10), (3, 2)] {
                    // det = v · num/den, skewed by a shear
                    let mut cols: Vec<RationalVector> =
                        (0..n).map(|i| RationalVector::unit(n, i)).collect();
                    cols[0] = cols[0].scale(&(&v * rat(num, den)));
                    cols[1][0] = rat(seed as i64, 7);
                    let l = e(LatticeBasis::new(cols), || "basis".into())?;
                    let d = e(density(&k, &l), || "density".into())?;
                    check(d < int(1), || format!("density {d} not below 1"))?;
                    let c = e(verify_covering(&k, &l, &delta), || {
                        format!("{kind} n={n} seed={seed}")
                    })?;
                    check(c.verdict != Verdict::CertifiedCovered, || {
                        format!("{kind} n={n} seed={seed}: certified at density {d}")
                    })?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!(
        "cube tilings certified, stretched lattices refuted, {cases} sub-unit densities rejected"
    ))
}

fn chain_cover() -> Outcome {
    let start = Instant::now();
    let s = e(
        AntiBlockingPolytope::new(Polytope::standard_simplex(3)),
        || "simplex".into(),
    )?;
    let report = e(kfold_chain_ab(&s, 3), || "chain".into())?;
    let cc = e(
        cover_body_via_chain(s.polytope(), &report, &LatticeBasis::identity(0)),
        || "cover".into(),
    )?;
    let elapsed = start.elapsed();
    let d = e(density(s.polytope(), &cc.lattice), || "density".into())?;
    check(cc.certificate.verdict == Verdict::CertifiedCovered, || {
        cc.certificate.verdict.as_str().into()
    })?;
    check(d == report.volume_ratio && cc.density_bound == d, || {
        format!("density {d} ratio {}", report.volume_ratio)
    })?;
    check(d <= rat(9, 2), || format!("ratio {d} above 9/2"))?;
    check(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "density {d} certified in {:.2}s",
        elapsed.as_secs_f64()
    ))
}

/// Bases `[(a, 0), (b, c)]` on a `1/48` grid with density in `[3/2, 8/5)`,
/// most dense first; returns the first one that certifies.
fn coarse_grid_triangle(t: &Polytope) -> Option<(LatticeBasis, Rational)> {
    let q = 48;
    let area = rat(1, 2);
    let mut candidates = Vec::new();
    for a in 1..=q {
        for c in 1..=q {
            let det = rat(a * c, q * q);
            let d = &area / &det;
            if d < rat(3, 2) || d >= rat(8, 5) {
                continue;
            }
            for b in 0..a {
                candidates.push((d.clone(), a, b, c));
            }
        }
    }
    candidates.sort();
    for (d, a, b, c) in candidates {
        let cols = vec![
            RationalVector::new(vec![rat(a, q), int(0)]),
            RationalVector::new(vec![rat(b, q), rat(c, q)]),
        ];
        let l = LatticeBasis::new(cols).ok()?;
        for m in [16, 32] {
            match verify_covering(t, &l, &rat(1, m)).ok()?.verdict {
                Verdict::CertifiedCovered => return Some((l, d)),
                Verdict::Counterexample => break,
                Verdict::Inconclusive => {}
            }
        }
    }
    None
}

fn triangle_search() -> Outcome {
    let t = Polytope::standard_simplex(2);
    let start = Instant::now();
    let r = e(search_covering_lattice(&t, 10_000, 0), || "search".into())?;
    let elapsed = start.elapsed();
    check(r.certificate.verdict == Verdict::CertifiedCovered, || {
        r.certificate.verdict.as_str().into()
    })?;
    check(r.density <= rat(8, 5), || format!("density {}", r.density))?;
    let (_, grid) =
        coarse_grid_triangle(&t).ok_or("coarse grid found no certified basis below 8/5")?;
    Ok(format!(
        "density {} ({:.4}) in {:.1}s; grid oracle certifies {}",
        r.density,
        lattice_cover::rational::to_f64(&r.density),
        elapsed.as_secs_f64(),
        grid
    ))
}

fn bounds_regression() -> Outcome {
    check(matches!(choose_k(1_000_000_000), Ok(9)), || {
        "choose_k(10^9) != 9".into()
    })?;
    check(
        matches!(lemma1_bound(100, 7), Err(Error::NotApplicable { .. })),
        || "lemma1(100, 7) not flagged".into(),
    )?;
    // independent 80-digit evaluation
    let oracle = BigFloat::parse(
        "3.7974044895013202962382313740867371600505948186367e+4",
        astro_float::Radix::Dec,
        256,
        RoundingMode::ToEven,
        &mut astro_float::Consts::new().unwrap(),
    );
    let v = lemma1_bound(1000, 7).map_err(|x| x.to_string())?;
    let diff = v
        .as_big_float()
        .sub(&oracle, 256, RoundingMode::ToEven)
        .div(&oracle, 256, RoundingMode::ToEven)
        .abs();
    check(diff < BigFloat::from_f64(1e-10, 256), || {
        format!("lemma1(1000, 7) = {}", v.to_decimal())
    })?;
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let ab = theorem_bound(n, Variant::Ab).map_err(|x| x.to_string())?;
        let lab = theorem_bound(n, Variant::Lab).map_err(|x| x.to_string())?;
        let k = choose_k(n).map_err(|x| x.to_string())?;
        check(ab.k == k, || format!("n={n}: k {} vs {k}", ab.k))?;
        let ratio =
            lab.value
                .as_big_float()
                .div(ab.value.as_big_float(), 256, RoundingMode::ToEven);
        check(ratio == BigFloat::from_u64(1 << k, 256), || {
            format!("n={n}: lab/ab = {ratio}")
        })?;
    }
    Ok("choose_k, lemma1 applicability and value, lab/ab = 2^k".into())
}

fn remark1_fixture() -> Outcome {
    let q = Fixture::Remark1Q.build(4).map_err(|x| x.to_string())?;
    let degrees = q.vertex_degrees().map_err(|x| x.to_string())?;
    check(
        q.num_vertices() == 6 && q.affine_dim() == 4 && degrees.iter().all(|&d| d == 5),
        || {
            format!(
                "vertices {} rank {} degrees {degrees:?}",
                q.num_vertices(),
                q.affine_dim()
            )
        },
    )?;
    Ok("6 vertices, affine rank 4, all degrees 5".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("n+2 vertex cylinder identity", lemma5_identity),
        ("anti-blocking chain guarantee", ab_chains),
        ("locally anti-blocking chain guarantee", lab_chains),
        ("slice cylinder lower bound", lemma2_realization),
        ("covering soundness and tiling", covering_soundness),
        ("end-to-end chain covering", chain_cover),
        ("triangle covering search", triangle_search),
        ("bounds regression", bounds_regression),
        ("Q fixture skeleton", remark1_fixture),
    ];
    // optional filter: criterion numbers as arguments
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{failed} criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
