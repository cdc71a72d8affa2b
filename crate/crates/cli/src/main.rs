//! `latcov`: generation, inscription, covering and bound evaluation from the
//! command line.
//!
//! Exit status: 0 on success, 1 on domain or input errors, 2 on I/O errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lattice_cover::bodies::{self, AntiBlockingPolytope, BodyKind, LocallyAntiBlockingPolytope};
use lattice_cover::bounds::{self, BoundReport, Variant};
use lattice_cover::covering::{
    self, cover_body_via_chain, search_covering_lattice, verify_covering, CoveringCertificate,
    LatticeBasis,
};
use lattice_cover::fixtures::Fixture;
use lattice_cover::geom::io::{format_polytope, parse_polytope};
use lattice_cover::inscribe::{self, ChainReport};
use lattice_cover::rational::{fmt_pq, parse_rational, to_f64};
use lattice_cover::{Error, Polytope, Rational, Result};

#[derive(Parser, Debug)]
#[command(
    name = "latcov",
    version,
    about = "Exact polytope cylinders and certified lattice coverings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded random body in the polytope text format.
    Gen {
        /// Body family.
        #[arg(long = "type", value_name = "TYPE")]
        kind: KindArg,
        /// Ambient dimension.
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print dimension, vertex and facet counts and the exact volume.
    Volume {
        /// Polytope file.
        body: PathBuf,
    },
    /// Replace a body by its (local) down-closure.
    Downclose {
        /// Polytope file.
        body: PathBuf,
        /// Close within each orthant instead of towards the origin only.
        #[arg(long)]
        local: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inscribe a k-fold cylinder and report the volume ratio.
    Inscribe {
        #[arg(long)]
        mode: ModeArg,
        /// Number of cylinder axes.
        #[arg(long)]
        k: usize,
        /// Random cylinder points checked for membership on top of the
        /// exact vertex check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Polytope file.
        body: PathBuf,
    },
    /// Lattice coverings.
    Cover {
        #[command(subcommand)]
        command: CoverCommand,
    },
    /// Evaluate the closed-form density bounds.
    Bounds(BoundsArgs),
    /// Emit a built-in body.
    Fixtures {
        /// unit-cube, simplex, cross-polytope, regular-simplex, remark1-Q or triangle.
        #[arg(long)]
        name: String,
        /// Dimension for the sized fixtures.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum CoverCommand {
    /// Certify or refute a covering at cell side delta.
    Verify {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        /// Cell side `1/m` in basis coordinates (dimension default when omitted).
        #[arg(long)]
        delta: Option<String>,
    },
    /// Search for a low-density covering lattice (dimension at most 3).
    Search {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the lattice found here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cover a body through a cylinder chain and a searched base covering.
    Chain {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        mode: ModeArg,
        /// Search budget for the base covering.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Dimension.
    #[arg(long, required_unless_present = "table")]
    n: Option<u64>,
    /// Evaluate the lemma1 column at this k instead of the chosen one.
    #[arg(long)]
    k: Option<usize>,
    /// Chain variant for the detailed theorem bound.
    #[arg(long, default_value = "ab")]
    variant: VariantArg,
    /// Log-spaced range `nmin:nmax:steps`.
    #[arg(long, value_name = "NMIN:NMAX:STEPS")]
    table: Option<String>,
    /// CSV output file (stdout when omitted).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Ab,
    Lab,
    Unc,
    Np2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Ab,
    Lab,
    Np2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Ab,
    Lab,
    Np2,
}

impl From<KindArg> for BodyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ab => BodyKind::Ab,
            KindArg::Lab => BodyKind::Lab,
            KindArg::Unc => BodyKind::Unc,
            KindArg::Np2 => BodyKind::Np2,
        }
    }
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Ab => Variant::Ab,
            VariantArg::Lab => Variant::Lab,
            VariantArg::Np2 => Variant::Np2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

fn real(x: f64) -> String {
    format!("{x:.11e}")
}

fn io_context(op: &str, path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{op} {}: {e}", path.display()),
    ))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_context("read", path, e))
}

fn read_body(path: &Path) -> Result<Polytope> {
    parse_polytope(&read_text(path)?)
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut String) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_context("write", path, e))?,
        None => stdout.push_str(text),
    }
    Ok(())
}

fn run(command: Command) -> Result<String> {
    let mut out = String::new();
    match command {
        Command::Gen {
            kind,
            dim,
            seed,
            out: path,
        } => {
            let p = bodies::generate(kind.into(), dim, seed)?;
            emit(&format_polytope(&p), path.as_deref(), &mut out)?;
        }
        Command::Volume { body } => {
            let p = read_body(&body)?;
            let v = p.content(p.affine_dim())?;
            writeln!(
                out,
                "dim={} affine_dim={} vertices={} facets={} volume={} ({})",
                p.dim_ambient(),
                p.affine_dim(),
                p.num_vertices(),
                p.facets().len(),
                fmt_pq(&v),
                real(to_f64(&v))
            )
            .unwrap();
        }
        Command::Downclose {
            body,
            local,
            out: path,
        } => {
            let p = read_body(&body)?;
            let q = if local {
                bodies::local_down_closure(&p)?.into_polytope()
            } else {
                bodies::down_closure(&p)?.into_polytope()
            };
            emit(&format_polytope(&q), path.as_deref(), &mut out)?;
        }
        Command::Inscribe {
            mode,
            k,
            samples,
            seed,
            body,
        } => {
            let p = read_body(&body)?;
            let report = chain(&p, mode, k)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sampled = inscribe::certify_inclusion(&report, &p, samples, &mut rng)?;
            write_chain_report(&mut out, &report, sampled);
        }
        Command::Cover { command } => cover(command, &mut out)?,
        Command::Bounds(args) => bounds_command(args, &mut out)?,
        Command::Fixtures {
            name,
            dim,
            out: path,
        } => {
            let f: Fixture = name.parse()?;
            let p = f.build_default(dim)?;
            let to_stdout = path.is_none();
            emit(&format_polytope(&p), path.as_deref(), &mut out)?;
            let degrees: Vec<String> = p.vertex_degrees()?.iter().map(|d| d.to_string()).collect();
            writeln!(
                out,
                "{}vertices={} degrees={}",
                if to_stdout { "# " } else { "" },
                p.num_vertices(),
                degrees.join(",")
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn chain(p: &Polytope, mode: ModeArg, k: usize) -> Result<ChainReport> {
    match mode {
        ModeArg::Ab => inscribe::kfold_chain_ab(&AntiBlockingPolytope::new(p.clone())?, k),
        ModeArg::Lab => inscribe::kfold_chain_lab(&LocallyAntiBlockingPolytope::new(p.clone())?, k),
        ModeArg::Np2 => inscribe::kfold_chain_np2(p, k),
    }
}

fn write_chain_report(out: &mut String, r: &ChainReport, sampled: bool) {
    let c = &r.cylinder;
    writeln!(out, "n={} k={}", c.dim(), c.k()).unwrap();
    writeln!(
        out,
        "ratio={} ({})",
        fmt_pq(&r.volume_ratio),
        real(to_f64(&r.volume_ratio))
    )
    .unwrap();
    writeln!(
        out,
        "guarantee={} ({})",
        fmt_pq(&r.guarantee),
        real(to_f64(&r.guarantee))
    )
    .unwrap();
    writeln!(out, "within_guarantee={}", inscribe::within_guarantee(r)).unwrap();
    writeln!(
        out,
        "inclusion_exact={} inclusion_sampled={}",
        r.certified, sampled
    )
    .unwrap();
    for s in &r.steps {
        writeln!(
            out,
            "step axis={} height={} slice={} base_volume={} body_volume={}",
            s.axis,
            fmt_pq(&s.height),
            fmt_pq(&s.slice_height),
            fmt_pq(&s.base_volume),
            fmt_pq(&s.body_volume)
        )
        .unwrap();
    }
    let intervals: Vec<String> = c
        .axes()
        .iter()
        .zip(c.intervals())
        .map(|(a, (lo, hi))| format!("x{a}:[{},{}]", fmt_pq(lo), fmt_pq(hi)))
        .collect();
    writeln!(out, "intervals={}", intervals.join(" ")).unwrap();
    writeln!(out, "transformed={}", r.transform.is_some()).unwrap();
    out.push_str("# cylinder base\n");
    out.push_str(&format_polytope(c.base()));
}

fn parse_delta(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|reason| Error::Parse {
        line: 1,
        reason: format!("--delta: {reason}"),
    })
}

fn certificate_csv(cert: &CoveringCertificate, density: &Rational) -> String {
    let mut fields = vec![
        cert.verdict.as_str().to_string(),
        fmt_pq(density),
        fmt_pq(&cert.resolution),
        cert.cells_checked.to_string(),
    ];
    fields.extend(
        cert.witnesses
            .iter()
            .map(|w| w.iter().map(fmt_pq).collect::<Vec<_>>().join(" ")),
    );
    fields.join(",")
}

fn write_certificate(out: &mut String, cert: &CoveringCertificate, density: &Rational) {
    writeln!(
        out,
        "verdict: {} (delta {}, {} cells, {} uncertified)",
        cert.verdict.as_str(),
        fmt_pq(&cert.resolution),
        cert.cells_checked,
        cert.uncertified_cells
    )
    .unwrap();
    writeln!(
        out,
        "density: {} ({})",
        fmt_pq(density),
        real(to_f64(density))
    )
    .unwrap();
    writeln!(out, "verdict,density,delta,cells_checked,witness").unwrap();
    writeln!(out, "{}", certificate_csv(cert, density)).unwrap();
}

fn cover(command: CoverCommand, out: &mut String) -> Result<()> {
    match command {
        CoverCommand::Verify {
            body,
            lattice,
            delta,
        } => {
            let p = read_body(&body)?;
            let l = LatticeBasis::parse(&read_text(&lattice)?)?;
            let delta = match delta {
                Some(d) => parse_delta(&d)?,
                None => covering::default_delta(p.dim_ambient()),
            };
            let cert = verify_covering(&p, &l, &delta)?;
            write_certificate(out, &cert, &covering::density(&p, &l)?);
        }
        CoverCommand::Search {
            body,
            budget,
            seed,
            out: path,
        } => {
            let p = read_body(&body)?;
            let r = search_covering_lattice(&p, budget, seed)?;
            writeln!(out, "proposals: {} accepted: {}", r.proposals, r.accepted).unwrap();
            write_certificate(out, &r.certificate, &r.density);
            emit(&r.lattice.format(), path.as_deref(), out)?;
        }
        CoverCommand::Chain {
            body,
            k,
            mode,
            budget,
            seed,
            out: path,
        } => {
            let p = read_body(&body)?;
            let report = chain(&p, mode, k)?;
            let base = report.cylinder.base_projected();
            let base_cover = if base.dim_ambient() == 0 {
                LatticeBasis::identity(0)
            } else {
                let found = search_covering_lattice(&base, budget, seed)?;
                writeln!(
                    out,
                    "base density: {} ({})",
                    fmt_pq(&found.density),
                    real(to_f64(&found.density))
                )
                .unwrap();
                found.lattice
            };
            let cc = cover_body_via_chain(&p, &report, &base_cover)?;
            writeln!(out, "ratio: {}", fmt_pq(&report.volume_ratio)).unwrap();
            write_certificate(out, &cc.certificate, &cc.density_bound);
            emit(&cc.lattice.format(), path.as_deref(), out)?;
        }
    }
    Ok(())
}

fn bounds_command(args: BoundsArgs, out: &mut String) -> Result<()> {
    let ns = match (&args.table, args.n) {
        (Some(t), _) => {
            let parts: Vec<&str> = t.split(':').collect();
            let bad = || Error::Parse {
                line: 1,
                reason: format!("--table expects nmin:nmax:steps, found {t:?}"),
            };
            let [a, b, c] = parts[..] else {
                return Err(bad());
            };
            bounds::log_samples(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
                c.parse().map_err(|_| bad())?,
            )?
        }
        (None, Some(n)) => vec![n],
        (None, None) => unreachable!("clap requires --n or --table"),
    };
    let mut csv = format!("{}\n", BoundReport::csv_header());
    let mut last = None;
    for &n in &ns {
        let r = bounds::reference_bounds_with_k(n, args.k)?;
        writeln!(csv, "{}", r.csv_row()).unwrap();
        last = Some(r);
    }
    if let (Some(r), true) = (last, ns.len() == 1) {
        writeln!(
            out,
            "n={} k={}",
            r.n,
            r.k.map_or("-".into(), |k| k.to_string())
        )
        .unwrap();
        for (f, v) in &r.entries {
            let flag = if f.unknown_constant() { " (c=1)" } else { "" };
            writeln!(out, "{}={}{}", f.id(), v, flag).unwrap();
        }
        for (f, why) in &r.not_applicable {
            writeln!(out, "{}: not applicable: {}", f.id(), why).unwrap();
        }
        match bounds::theorem_bound(r.n, args.variant.into()) {
            Ok(t) => writeln!(
                out,
                "theorem[{}]: {} presimplified {}",
                t.variant, t.value, t.presimplified
            )
            .unwrap(),
            Err(e) => writeln!(
                out,
                "theorem[{}]: not applicable: {e}",
                Variant::from(args.variant)
            )
            .unwrap(),
        }
        for c in &r.crossovers {
            writeln!(
                out,
                "crossover {} < {} for all n >= {}",
                c.lower.id(),
                c.upper.id(),
                c.n
            )
            .unwrap();
        }
    }
    emit(&csv, args.csv.as_deref(), out)
}
