//! Closed-form covering density bounds, evaluated in high precision.
//!
//! Every value is computed twice, at [`PRECISION`] and at a wider check
//! precision, and rejected unless the two agree to at least 50 decimal
//! digits. Bounds with an unspecified absolute constant `c` are evaluated
//! with `c = 1` and flagged.

use std::fmt;
use std::str::FromStr;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{Error, Result};

/// Working precision in bits (about 77 decimal digits).
pub const PRECISION: usize = 256;
const CHECK_PRECISION: usize = 320;
/// Required relative agreement between the two evaluations, in bits.
const AGREEMENT_BITS: usize = 180;
const RM: RoundingMode = RoundingMode::ToEven;

/// A high-precision real.
#[derive(Clone, Debug)]
pub struct Real(BigFloat);

impl Real {
    pub fn as_big_float(&self) -> &BigFloat {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_string().parse().unwrap_or(f64::NAN)
    }

    /// Full-precision decimal expansion.
    pub fn to_decimal(&self) -> String {
        let mut cc = Consts::new().expect("constants cache");
        self.0
            .format(Radix::Dec, RM, &mut cc)
            .unwrap_or_else(|_| self.0.to_string())
    }

    /// Relative difference `|self - other| / |other|`.
    pub fn relative_diff(&self, other: &Real) -> f64 {
        let d = self.0.sub(&other.0, PRECISION, RM).abs();
        Real(d.div(&other.0.abs(), PRECISION, RM)).to_f64()
    }
}

/// 12 significant digits.
impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.11e}", self.to_f64())
    }
}

struct Ctx {
    p: usize,
    cc: Consts,
}

impl Ctx {
    fn int(&self, v: u64) -> BigFloat {
        BigFloat::from_u64(v, self.p)
    }

    fn ratio(&self, a: u64, b: u64) -> BigFloat {
        self.int(a).div(&self.int(b), self.p, RM)
    }

    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc)
    }

    fn log2(&mut self, a: &BigFloat) -> BigFloat {
        a.log2(self.p, RM, &mut self.cc)
    }

    fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc)
    }

    fn pow(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.pow(b, self.p, RM, &mut self.cc)
    }

    fn powi(&self, a: &BigFloat, n: u64) -> BigFloat {
        a.powi(n as usize, self.p, RM)
    }

    fn two_pow(&self, k: usize) -> BigFloat {
        self.powi(&self.int(2), k as u64)
    }

    /// `log2 e`.
    fn log2_e(&mut self) -> BigFloat {
        let one = self.int(1);
        let e = self.exp(&one);
        self.log2(&e)
    }
}

/// Evaluates `f` at both precisions and checks agreement.
fn eval(op: &'static str, f: impl Fn(&mut Ctx) -> BigFloat) -> Result<Real> {
    let run = |p| {
        let mut ctx = Ctx {
            p,
            cc: Consts::new().expect("constants cache"),
        };
        f(&mut ctx)
    };
    let (a, b) = (run(PRECISION), run(CHECK_PRECISION));
    if a.is_nan() || a.is_inf() || b.is_nan() || b.is_inf() {
        return Err(Error::NotApplicable {
            op,
            reason: "value is not finite".into(),
        });
    }
    let diff = a.sub(&b, CHECK_PRECISION, RM).abs();
    let scale = BigFloat::from_u64(2, CHECK_PRECISION).powi(AGREEMENT_BITS, CHECK_PRECISION, RM);
    let tol = b.abs().div(&scale, CHECK_PRECISION, RM);
    if diff > tol {
        return Err(Error::NotApplicable {
            op,
            reason: "precision cross-check failed".into(),
        });
    }
    Ok(Real(a))
}

fn log2_ln_plus_4(c: &mut Ctx, n: u64) -> BigFloat {
    let ln = c.ln(&c.int(n));
    let l2 = c.log2(&ln);
    c.add(&l2, &c.int(4))
}

/// `log2 ln n + 4`, the lower end of the admissible window for `k`.
pub fn k_threshold(n: u64) -> Result<Real> {
    if n < 3 {
        return Err(Error::precondition(
            "k_threshold",
            format!("n = {n} must be at least 3"),
        ));
    }
    eval("k_threshold", |c| log2_ln_plus_4(c, n))
}

/// The least integer strictly greater than `log2 ln n + 4`; errors when it
/// is not below `n`.
pub fn choose_k(n: u64) -> Result<usize> {
    let x = k_threshold(n)?;
    let k = x.0.floor().to_string().parse::<f64>().unwrap_or(f64::NAN) as usize + 1;
    if (k as u64) >= n {
        return Err(Error::precondition(
            "choose_k",
            format!("window n > k > log2 ln n + 4 is empty for n = {n} (k = {k})"),
        ));
    }
    Ok(k)
}

/// `k > log2 ln n + 4` exactly (compared in high precision).
fn k_above_threshold(n: u64, k: usize) -> Result<bool> {
    let x = k_threshold(n)?;
    Ok(BigFloat::from_u64(k as u64, PRECISION) > x.0)
}

fn bracket(c: &mut Ctx, n: u64, k: usize) -> BigFloat {
    let m = n - k as u64;
    let ln_ratio = c.ln(&c.ratio(27, 16));
    let quarter = c.div(&c.int(m), &c.int(4));
    let lm = c.ln(&c.int(m));
    c.sub(&c.mul(&quarter, &ln_ratio), &c.mul(&c.int(3), &lm))
}

/// `(1 + 1/i)^i`.
fn euler_factor(c: &mut Ctx, i: u64) -> BigFloat {
    let base = c.add(&c.int(1), &c.ratio(1, i));
    c.powi(&base, i)
}

/// `(n - k)/4 · ln(27/16) - 3 ln(n - k)`.
pub fn lemma1_bracket(n: u64, k: usize) -> Result<Real> {
    if (k as u64) >= n {
        return Err(Error::precondition(
            "lemma1_bracket",
            format!("k = {k} must be below n = {n}"),
        ));
    }
    eval("lemma1_bracket", |c| bracket(c, n, k))
}

/// `2^k [(n - k)/4 · ln(27/16) - 3 ln(n - k)] (1 + 1/n)^n`.
pub fn lemma1_bound(n: u64, k: usize) -> Result<Real> {
    if n < 3 || (k as u64) >= n || !k_above_threshold(n, k)? {
        return Err(Error::precondition(
            "lemma1_bound",
            format!("window n > k > log2 ln n + 4 violated at n = {n}, k = {k}"),
        ));
    }
    let b = lemma1_bracket(n, k)?;
    if b.0.is_negative() || b.0.is_zero() {
        return Err(Error::NotApplicable {
            op: "lemma1_bound",
            reason: format!("bracket is not positive at n = {n}, k = {k}"),
        });
    }
    eval("lemma1_bound", |c| {
        let b = bracket(c, n, k);
        let f = euler_factor(c, n);
        c.mul(&c.mul(&c.two_pow(k), &b), &f)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Ab,
    Lab,
    Np2,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Ab => "ab",
            Variant::Lab => "lab",
            Variant::Np2 => "np2",
        }
    }

    /// Power of two in front: `2^k`, or `2^{2k}` for `lab`.
    fn two_exponent(&self, k: usize) -> usize {
        match self {
            Variant::Lab => 2 * k,
            _ => k,
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ab" => Ok(Variant::Ab),
            "lab" => Ok(Variant::Lab),
            "np2" => Ok(Variant::Np2),
            _ => Err(Error::precondition(
                "variant",
                format!("unknown variant {s:?} (ab, lab, np2)"),
            )),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct TheoremBound {
    pub n: u64,
    pub k: usize,
    pub variant: Variant,
    /// `2^k e^{k+1} n`, or `2^{2k} e^{k+1} n` for `lab`.
    pub value: Real,
    /// `2^k [bracket] Π_{i=n-k}^{n} (1 + 1/i)^i` (`2^{2k}` for `lab`).
    pub presimplified: Real,
}

/// The explicit bound of the chain argument with `k = choose_k(n)`.
pub fn theorem_bound(n: u64, variant: Variant) -> Result<TheoremBound> {
    let k = choose_k(n)?;
    lemma1_bound(n, k)?;
    let t = variant.two_exponent(k);
    let value = eval("theorem_bound", |c| {
        let e = c.exp(&c.int(k as u64 + 1));
        c.mul(&c.mul(&c.two_pow(t), &e), &c.int(n))
    })?;
    let presimplified = eval("theorem_bound", |c| {
        let mut prod = c.int(1);
        for i in n - k as u64..=n {
            let f = euler_factor(c, i);
            prod = c.mul(&prod, &f);
        }
        let b = bracket(c, n, k);
        c.mul(&c.mul(&c.two_pow(t), &b), &prod)
    })?;
    Ok(TheoremBound {
        n,
        k,
        variant,
        value,
        presimplified,
    })
}

/// The formulas tabulated by [`reference_bounds`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Formula {
    Lemma1,
    ThmAb,
    ThmLab,
    /// `n ln n + n ln ln n + 5n`.
    Rogers57,
    /// `n^{log2 ln n + c}`.
    Rogers59,
    /// `c n^2`.
    OrwN2,
    /// `c n (ln n)^{1 + log2 e}`.
    AsymAb,
    /// `c n (ln n)^{2 + log2 e}`.
    AsymLab,
}

impl Formula {
    pub const ALL: [Formula; 8] = [
        Formula::Lemma1,
        Formula::ThmAb,
        Formula::ThmLab,
        Formula::Rogers57,
        Formula::Rogers59,
        Formula::OrwN2,
        Formula::AsymAb,
        Formula::AsymLab,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Formula::Lemma1 => "lemma1",
            Formula::ThmAb => "thm_ab",
            Formula::ThmLab => "thm_lab",
            Formula::Rogers57 => "rogers57",
            Formula::Rogers59 => "rogers59",
            Formula::OrwN2 => "orw_n2",
            Formula::AsymAb => "asym_ab",
            Formula::AsymLab => "asym_lab",
        }
    }

    /// True for formulas carrying an unspecified constant, evaluated at 1.
    pub fn unknown_constant(&self) -> bool {
        matches!(
            self,
            Formula::Rogers59 | Formula::OrwN2 | Formula::AsymAb | Formula::AsymLab
        )
    }
}

/// `n ln n + n ln ln n + 5n`.
pub fn rogers57(n: u64) -> Result<Real> {
    check_n("rogers57", n)?;
    eval("rogers57", |c| {
        let nn = c.int(n);
        let ln = c.ln(&nn);
        let lnln = c.ln(&ln);
        let s = c.add(&c.mul(&nn, &ln), &c.mul(&nn, &lnln));
        c.add(&s, &c.mul(&c.int(5), &nn))
    })
}

/// `n^{log2 ln n + 1}`.
pub fn rogers59(n: u64) -> Result<Real> {
    check_n("rogers59", n)?;
    eval("rogers59", |c| {
        let ln = c.ln(&c.int(n));
        let l2 = c.log2(&ln);
        let e = c.add(&l2, &c.int(1));
        c.pow(&c.int(n), &e)
    })
}

/// `n^2`.
pub fn orw_n2(n: u64) -> Result<Real> {
    check_n("orw_n2", n)?;
    eval("orw_n2", |c| c.powi(&c.int(n), 2))
}

/// `n (ln n)^{extra + log2 e}`.
fn asym(c: &mut Ctx, n: u64, extra: u64) -> BigFloat {
    let ln = c.ln(&c.int(n));
    let l2e = c.log2_e();
    let e = c.add(&c.int(extra), &l2e);
    let p = c.pow(&ln, &e);
    c.mul(&c.int(n), &p)
}

/// `n (ln n)^{1 + log2 e}`.
pub fn asym_ab(n: u64) -> Result<Real> {
    check_n("asym_ab", n)?;
    eval("asym_ab", |c| asym(c, n, 1))
}

/// `n (ln n)^{2 + log2 e}`.
pub fn asym_lab(n: u64) -> Result<Real> {
    check_n("asym_lab", n)?;
    eval("asym_lab", |c| asym(c, n, 2))
}

fn check_n(op: &'static str, n: u64) -> Result<()> {
    if n < 3 {
        return Err(Error::precondition(
            op,
            format!("n = {n} must be at least 3"),
        ));
    }
    Ok(())
}

/// `ln(asym(n) / n^2) = a ln ln n - ln n` with `a = extra + log2 e`.
fn asym_gap(n: u64, extra: u64) -> Result<Real> {
    eval("crossover", |c| {
        let ln = c.ln(&c.int(n));
        let lnln = c.ln(&ln);
        let l2e = c.log2_e();
        let a = c.add(&c.int(extra), &l2e);
        c.sub(&c.mul(&a, &lnln), &ln)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossover {
    /// The polylogarithmic form.
    pub lower: Formula,
    /// The quadratic form.
    pub upper: Formula,
    /// Least `n >= 3` with `lower(m) < upper(m)` for every `m >= n`.
    pub n: u64,
}

/// Crossover of `n^2` with `n (ln n)^a` (`c = 1` on both sides).
///
/// With `t = ln n` the sign of `a ln t - t` is unimodal in `n` with its
/// peak at `t = a`, so it is enough to test the peak and then bisect on the
/// decreasing side.
pub fn crossover(poly: Formula) -> Result<Crossover> {
    let extra = match poly {
        Formula::AsymAb => 1,
        Formula::AsymLab => 2,
        _ => {
            return Err(Error::precondition(
                "crossover",
                format!("{} is not a polylogarithmic form", poly.id()),
            ))
        }
    };
    let below = |n: u64| -> Result<bool> { Ok(asym_gap(n, extra)?.0.is_negative()) };
    let peak = (extra as f64 + std::f64::consts::LOG2_E).exp();
    let (pl, pr) = ((peak.floor() as u64).max(3), (peak.ceil() as u64).max(3));
    let n = if below(3)? && below(pl)? && below(pr)? {
        3
    } else {
        let mut lo = pr;
        let mut hi = pr.max(4) * 2;
        while !below(hi)? {
            lo = hi;
            hi *= 2;
        }
        // invariant: !below(lo) or lo is the peak; below(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if below(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if below(lo)? {
            lo
        } else {
            hi
        }
    };
    Ok(Crossover {
        lower: poly,
        upper: Formula::OrwN2,
        n,
    })
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub n: u64,
    /// `choose_k(n)`, or the requested `k`, when the window is nonempty.
    pub k: Option<usize>,
    /// Applicable formulas with their values, in [`Formula::ALL`] order.
    pub entries: Vec<(Formula, Real)>,
    /// Formulas skipped at this `n`, with the reason.
    pub not_applicable: Vec<(Formula, String)>,
    pub crossovers: Vec<Crossover>,
}

impl BoundReport {
    pub fn get(&self, f: Formula) -> Option<&Real> {
        self.entries.iter().find(|(g, _)| *g == f).map(|(_, v)| v)
    }

    /// `unknown_c` when any entry uses `c = 1`, then `na:<id>` per skipped
    /// formula, joined by `;`.
    pub fn flags(&self) -> String {
        let mut flags = Vec::new();
        if self.entries.iter().any(|(f, _)| f.unknown_constant()) {
            flags.push("unknown_c".to_string());
        }
        flags.extend(
            self.not_applicable
                .iter()
                .map(|(f, _)| format!("na:{}", f.id())),
        );
        flags.join(";")
    }

    pub fn csv_header() -> &'static str {
        "n,k,lemma1,thm_ab,thm_lab,rogers57,orw_n2,asym_ab,asym_lab,flags"
    }

    pub fn csv_row(&self) -> String {
        let cell = |f: Formula| self.get(f).map_or(String::new(), |v| v.to_string());
        let cols = [
            Formula::Lemma1,
            Formula::ThmAb,
            Formula::ThmLab,
            Formula::Rogers57,
            Formula::OrwN2,
            Formula::AsymAb,
            Formula::AsymLab,
        ];
        let mut row = vec![
            self.n.to_string(),
            self.k.map_or(String::new(), |k| k.to_string()),
        ];
        row.extend(cols.iter().map(|&f| cell(f)));
        row.push(self.flags());
        row.join(",")
    }
}

/// All formulas at `n` with `k = choose_k(n)`.
pub fn reference_bounds(n: u64) -> Result<BoundReport> {
    reference_bounds_with_k(n, None)
}

/// As [`reference_bounds`], with [`lemma1_bound`] evaluated at `k` when given.
pub fn reference_bounds_with_k(n: u64, k: Option<usize>) -> Result<BoundReport> {
    check_n("reference_bounds", n)?;
    let mut entries = Vec::new();
    let mut not_applicable = Vec::new();
    let k = match k {
        Some(k) => Some(k),
        None => match choose_k(n) {
            Ok(k) => Some(k),
            Err(e) => {
                not_applicable.push((Formula::Lemma1, e.to_string()));
                None
            }
        },
    };
    if let Some(k) = k {
        match lemma1_bound(n, k) {
            Ok(v) => entries.push((Formula::Lemma1, v)),
            Err(e) => not_applicable.push((Formula::Lemma1, e.to_string())),
        }
    }
    for (f, v) in [
        (Formula::ThmAb, Variant::Ab),
        (Formula::ThmLab, Variant::Lab),
    ] {
        match theorem_bound(n, v) {
            Ok(t) => entries.push((f, t.value)),
            Err(e) => not_applicable.push((f, e.to_string())),
        }
    }
    entries.push((Formula::Rogers57, rogers57(n)?));
    entries.push((Formula::Rogers59, rogers59(n)?));
    entries.push((Formula::OrwN2, orw_n2(n)?));
    entries.push((Formula::AsymAb, asym_ab(n)?));
    entries.push((Formula::AsymLab, asym_lab(n)?));
    let crossovers = vec![crossover(Formula::AsymAb)?, crossover(Formula::AsymLab)?];
    Ok(BoundReport {
        n,
        k,
        entries,
        not_applicable,
        crossovers,
    })
}

/// Up to `steps` distinct integers spaced logarithmically from `nmin` to
/// `nmax` inclusive.
pub fn log_samples(nmin: u64, nmax: u64, steps: usize) -> Result<Vec<u64>> {
    if nmin < 3 || nmax < nmin || steps == 0 {
        return Err(Error::precondition(
            "log_samples",
            format!("need 3 <= nmin <= nmax and steps >= 1 (got {nmin}:{nmax}:{steps})"),
        ));
    }
    if steps == 1 {
        return Ok(vec![nmin]);
    }
    let (a, b) = ((nmin as f64).ln(), (nmax as f64).ln());
    let mut out: Vec<u64> = (0..steps)
        .map(|i| {
            let t = a + (b - a) * i as f64 / (steps - 1) as f64;
            (t.exp().round() as u64).clamp(nmin, nmax)
        })
        .collect();
    out[0] = nmin;
    *out.last_mut().unwrap() = nmax;
    out.dedup();
    Ok(out)
}
