use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hgc_verify::arith::{FiniteSpec, FiniteTower, SymbolicTower, Tower};
use hgc_verify::certificate::{run_cross_checked, run_suite, Backend, Certificate, CertificateBundle, Suite, SuiteConfig, Verdict};
use hgc_verify::cycles::pi_z_certificate;
use hgc_verify::divisors::{nontriviality_certificate, parse_divisor, parse_point, witness_search, CuspFamily, LinearSpaceEngine, SearchBox};
use hgc_verify::error::{HgcError, Result};
use hgc_verify::forms::invariants_table;
use hgc_verify::function_field::Curve;
use hgc_verify::local_series::Point;
use hgc_verify::quotients::genus_table;

#[derive(Parser)]
#[command(name = "hgc-verify", version, about = "Exact verification of identities on the curves (1-x^N)(1-y^N) = lambda x^N y^N")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run certificate suites and emit a bundle.
    Verify(VerifyArgs),
    /// Basis of L(d * sum of one cusp family).
    Lspace {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        d: i64,
        #[arg(long, default_value = "c1")]
        family: String,
    },
    /// The pushforward of the modified diagonal cycle based at a cusp.
    PiZ {
        #[command(flatten)]
        curve: CurveArgs,
        /// Base cusp, e.g. c1_0.
        #[arg(long, default_value = "c1_0")]
        e: String,
    },
    /// Nontriviality certificates; all (a, b, l) unless given.
    Nontrivial {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        a: Option<i64>,
        #[arg(long)]
        b: Option<i64>,
        #[arg(long)]
        l: Option<i64>,
    },
    /// Dimensions of the invariant part of the third exterior power of H^1.
    Invariants {
        #[arg(long, default_value_t = 6)]
        n_max: i64,
    },
    /// Genera of the quotient curves C^(a,b).
    GenusTable {
        #[arg(long, visible_alias = "p", default_value_t = 3)]
        n: i64,
    },
    /// Search for a function with a given divisor, e.g. "3*b_0 - 3*c2_0".
    WitnessSearch {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        divisor: String,
        /// Exponent range `lo..hi` for both x and y (default 0..2N).
        #[arg(long = "box")]
        bx: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendKind {
    Symbolic,
    Finite,
}

#[derive(Args, Clone)]
struct CurveArgs {
    /// Degree N (alias --p for the prime case).
    #[arg(long, visible_alias = "p", default_value_t = 3)]
    n: usize,
    #[arg(long, value_enum, default_value = "symbolic")]
    backend: BackendKind,
    /// Field size for the finite backend (prime, 1 mod 2N).
    #[arg(long)]
    q: Option<u64>,
    /// lambda0 for the finite backend.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<i64>,
    /// xi0 for the finite backend.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    precision_ceiling: Option<usize>,
}

impl CurveArgs {
    fn backend(&self) -> Backend {
        match self.backend {
            BackendKind::Symbolic => Backend::Symbolic,
            BackendKind::Finite => Backend::Finite {
                q: self.q.unwrap_or_else(|| FiniteSpec::default_prime(self.n, 1000)),
                lambda: self.lambda,
                xi: self.xi,
                seed: (self.lambda.is_none() && self.xi.is_none()).then_some(self.seed),
            },
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Comma-separated suites, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Largest d for the lemma suite.
    #[arg(long)]
    d: Option<i64>,
    /// Include the torsion-order table in the cusps suite.
    #[arg(long)]
    torsion: bool,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    md: Option<PathBuf>,
    /// Also run a seeded finite specialization and compare verdicts.
    #[arg(long)]
    cross_check: bool,
}

/// Runs `$body` with `$t` bound to the tower selected by `$args`.
macro_rules! with_tower {
    ($args:expr, |$t:ident| $body:expr) => {{
        let args: &CurveArgs = $args;
        match args.backend() {
            Backend::Symbolic => {
                let $t = SymbolicTower::new(args.n);
                $body
            }
            Backend::Finite { q, lambda, xi, seed } => {
                let $t = FiniteTower::new(args.n, &FiniteSpec { q, lambda, xi, seed })?;
                $body
            }
        }
    }};
}

fn make_curve<T: Tower>(t: T, args: &CurveArgs) -> Curve<T> {
    let c = Curve::new(t);
    match args.precision_ceiling {
        Some(p) => c.with_ceiling(p),
        None => c,
    }
}

fn print_cert(c: &Certificate) {
    println!("{:<11} {}  {}", c.verdict.to_string(), c.id, c.statement);
    if let Some(w) = &c.witness {
        println!("            witness: {w}");
    }
}

fn verify(args: &VerifyArgs) -> Result<i32> {
    let mut cfg = SuiteConfig::new(args.curve.n, args.curve.backend(), Suite::parse_list(&args.suite, args.curve.n)?);
    cfg.precision_ceiling = args.curve.precision_ceiling;
    cfg.lemma_d = args.d;
    cfg.torsion = args.torsion;
    let bundle: CertificateBundle = if args.cross_check {
        let other = match cfg.backend {
            Backend::Symbolic => Backend::finite_seeded(cfg.n, args.curve.seed),
            Backend::Finite { .. } => Backend::Symbolic,
        };
        run_cross_checked(&cfg, other)?
    } else {
        run_suite(&cfg)?
    };
    for sec in &bundle.sections {
        println!("== {} ==", sec.suite);
        for c in &sec.certificates {
            print_cert(c);
        }
    }
    for m in &bundle.cross_check_mismatches {
        println!("cross-check mismatch: {m}");
    }
    let s = &bundle.summary;
    println!(
        "summary: {} pass, {} fail, {} unsupported, {} paper-discrepancy ({} ms)",
        s.pass, s.fail, s.unsupported, s.paper_discrepancy, bundle.wall_time_ms
    );
    if let Some(p) = &args.json {
        fs::write(p, bundle.to_json())?;
    }
    if let Some(p) = &args.md {
        fs::write(p, bundle.to_markdown())?;
    }
    Ok(bundle.exit_code())
}

fn parse_box(s: &str) -> Result<SearchBox> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| HgcError::Config(format!("--box expects lo..hi, got {s:?}")))?;
    let p = |v: &str| v.trim().parse::<i64>().map_err(|_| HgcError::Config(format!("bad bound {v:?}")));
    Ok(SearchBox::square(p(lo)?, p(hi)?))
}

fn gate(certs: &[Certificate]) -> i32 {
    if certs.iter().all(|c| c.verdict == Verdict::Pass || c.paper_discrepancy) {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify(args) => verify(&args),
        Command::Lspace { curve, d, family } => {
            let fam: CuspFamily = family.parse().map_err(|_| HgcError::Config(format!("unknown family {family:?}")))?;
            with_tower!(&curve, |t| {
                let c = make_curve(t, &curve);
                let cert = LinearSpaceEngine::new(&c)?.certificate(d, fam)?;
                print_cert(&cert);
                Ok(gate(&[cert]))
            })
        }
        Command::PiZ { curve, e } => with_tower!(&curve, |t| {
            let c = make_curve(t, &curve);
            let p: Point<_> = parse_point(&e).map_err(|err| HgcError::Config(err.to_string()))?;
            let cert = pi_z_certificate(&c, &p)?;
            print_cert(&cert);
            for (k, v) in &cert.details {
                println!("            {k}: {v}");
            }
            Ok(gate(&[cert]))
        }),
        Command::Nontrivial { curve, a, b, l } => with_tower!(&curve, |t| {
            let c = make_curve(t, &curve);
            let p = curve.n as i64;
            let mut certs = Vec::new();
            for a in a.map_or(1..=p - 1, |v| v..=v) {
                for b in b.map_or(1..=p - 1, |v| v..=v) {
                    for l in l.map_or(1..=(p - 1) / 2, |v| v..=v) {
                        let cert = nontriviality_certificate(&c, a, b, l, &Point::C1(0))?;
                        print_cert(&cert);
                        certs.push(cert);
                    }
                }
            }
            Ok(gate(&certs))
        }),
        Command::Invariants { n_max } => {
            println!("{:>3} {:>6} {:>12}", "N", "dim", "by-characters");
            let mut ok = true;
            for (n, (d1, d2)) in invariants_table(n_max) {
                println!("{n:>3} {d1:>6} {d2:>12}");
                ok &= d1 == d2;
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::GenusTable { n } => {
            println!("{:>3} {:>3} {:>6}  hyperelliptic", "a", "b", "genus");
            for r in genus_table(n)? {
                let h = r.hyperelliptic.map_or("-".to_string(), |h| h.to_string());
                println!("{:>3} {:>3} {:>6}  {h}", r.a, r.b, r.genus);
            }
            Ok(0)
        }
        Command::WitnessSearch { curve, divisor, bx } => with_tower!(&curve, |t| {
            let c = make_curve(t, &curve);
            let d = parse_divisor(&divisor).map_err(|e| HgcError::Config(e.to_string()))?;
            let bx = bx.as_deref().map(parse_box).transpose()?;
            match witness_search(&c, &d, bx)? {
                Some(f) => {
                    println!("witness for {d}: {f}");
                    Ok(0)
                }
                None => {
                    println!("no function in the box has divisor {d}");
                    Ok(1)
                }
            }
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                HgcError::Config(_) | HgcError::Parse(_) | HgcError::InvalidSpec(_) => 2,
                HgcError::Io(_) => 1,
                _ => 3,
            };
            ExitCode::from(code)
        }
    }
}
