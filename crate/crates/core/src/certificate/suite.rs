use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Certificate, Verdict};
use crate::arith::{FiniteSpec, FiniteTower, SymbolicTower, Tower};
use crate::cycles::{covering_map_check, pi_z_certificate};
use crate::divisors::{
    canonical_divisor, cusp_identity_suite, default_torsion_pairs, displayed_witness_protocol, nontriviality_certificate,
    torsion_order_table, CuspFamily, LinearSpaceEngine,
};
use crate::error::{HgcError, Result};
use crate::forms::{forms_suite, invariants_certificate};
use crate::function_field::Curve;
use crate::local_series::Point;
use crate::quotients::{
    branch_permutation_certificate, genus_certificate, involution_quotient_genus, verify_hyperelliptic_isomorphism,
    verify_quotient_map, HyperellipticCase, InvolutionCase, LambdaMode,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Cusps,
    Lemma,
    Canonical,
    PiZ,
    Nontrivial,
    Invariants,
    Genus,
    QuotientMaps,
    #[serde(rename = "section-4-3")]
    Section43,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Cusps,
        Suite::Lemma,
        Suite::Canonical,
        Suite::PiZ,
        Suite::Nontrivial,
        Suite::Invariants,
        Suite::Genus,
        Suite::QuotientMaps,
        Suite::Section43,
    ];

    /// Suites whose statements are about `X_{p,lambda}` with `p` an odd prime.
    pub fn needs_odd_prime(self) -> bool {
        matches!(self, Suite::Lemma | Suite::Nontrivial | Suite::Section43)
    }

    pub fn applies_to(self, n: usize) -> bool {
        match self {
            Suite::PiZ => n >= 3,
            s if s.needs_odd_prime() => n > 2 && is_prime(n),
            _ => true,
        }
    }

    /// Parses a comma-separated list; `all` selects every suite that applies to `n`.
    pub fn parse_list(s: &str, n: usize) -> Result<BTreeSet<Suite>> {
        let mut out = BTreeSet::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Suite::ALL.iter().copied().filter(|s| s.applies_to(n)));
            } else {
                let suite: Suite = part.parse()?;
                if !suite.applies_to(n) {
                    let need = if suite.needs_odd_prime() { "an odd prime" } else { "at least 3" };
                    return Err(HgcError::Config(format!("suite {suite} needs N {need}, got {n}")));
                }
                out.insert(suite);
            }
        }
        if out.is_empty() {
            return Err(HgcError::Config("no suites selected".into()));
        }
        Ok(out)
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Cusps => "cusps",
            Suite::Lemma => "lemma",
            Suite::Canonical => "canonical",
            Suite::PiZ => "pi-z",
            Suite::Nontrivial => "nontrivial",
            Suite::Invariants => "invariants",
            Suite::Genus => "genus",
            Suite::QuotientMaps => "quotient-maps",
            Suite::Section43 => "section-4-3",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Suite {
    type Err = HgcError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| HgcError::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Backend {
    Symbolic,
    Finite {
        q: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        xi: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl Backend {
    /// A seeded finite specialization with the smallest admissible prime above 1000.
    pub fn finite_seeded(n: usize, seed: u64) -> Self {
        Backend::Finite { q: FiniteSpec::default_prime(n, 1000), lambda: None, xi: None, seed: Some(seed) }
    }

    fn spec(&self) -> Option<FiniteSpec> {
        match self {
            Backend::Symbolic => None,
            Backend::Finite { q, lambda, xi, seed } => Some(FiniteSpec { q: *q, lambda: *lambda, xi: *xi, seed: *seed }),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Symbolic => write!(f, "symbolic"),
            Backend::Finite { q, lambda, xi, seed } => {
                write!(f, "finite(q={q}")?;
                if let Some(l) = lambda {
                    write!(f, ", lambda={l}")?;
                }
                if let Some(x) = xi {
                    write!(f, ", xi={x}")?;
                }
                if let Some(s) = seed {
                    write!(f, ", seed={s}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n: usize,
    pub backend: Backend,
    pub suites: BTreeSet<Suite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_ceiling: Option<usize>,
    /// Largest `d` for the lemma suite (default `p - 1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma_d: Option<i64>,
    /// Adds the torsion-order table to the cusps suite.
    #[serde(default)]
    pub torsion: bool,
    /// Evaluate the same suites with generator `-xi`.
    #[serde(default)]
    pub negate_xi: bool,
}

impl SuiteConfig {
    pub fn new(n: usize, backend: Backend, suites: impl IntoIterator<Item = Suite>) -> Self {
        SuiteConfig {
            n,
            backend,
            suites: suites.into_iter().collect(),
            precision_ceiling: None,
            lemma_d: None,
            torsion: false,
            negate_xi: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(HgcError::Config(format!("N = {} must be at least 2", self.n)));
        }
        for s in &self.suites {
            if !s.applies_to(self.n) {
                return Err(HgcError::Config(format!("suite {s} does not apply to N = {}", self.n)));
            }
        }
        if let Some(d) = self.lemma_d {
            if d < 0 || d >= self.n as i64 {
                return Err(HgcError::Config(format!("--d {d} must lie in 0..p-1")));
            }
        }
        if let Backend::Finite { q, .. } = &self.backend {
            if (q - 1) % (2 * self.n as u64) != 0 {
                return Err(HgcError::Config(format!("q = {q} is not 1 mod 2N = {}", 2 * self.n)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub suite: Suite,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub unsupported: usize,
    /// Failures of displayed identities, reported but not gated.
    pub paper_discrepancy: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateBundle {
    pub tool_version: String,
    pub config: SuiteConfig,
    pub summary: Summary,
    pub wall_time_ms: u64,
    pub sections: Vec<Section>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cross_check_mismatches: Vec<String>,
}

impl CertificateBundle {
    pub fn certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.sections.iter().flat_map(|s| s.certificates.iter())
    }

    /// `(id, verdict)` in emission order.
    pub fn verdicts(&self) -> Vec<(String, Verdict)> {
        self.certificates().map(|c| (c.id.clone(), c.verdict)).collect()
    }

    /// 0 when every gated record passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail == 0 && self.summary.unsupported == 0 && self.cross_check_mismatches.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| HgcError::Parse(e.to_string()))
    }

    /// The records alone, without the timing header.
    pub fn records_json(&self) -> String {
        serde_json::to_string(&self.sections).expect("records serialize")
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# hgc-verify {}\n\n", self.tool_version));
        s.push_str(&format!("- N: {}\n- backend: {}\n", self.config.n, self.config.backend));
        s.push_str(&format!(
            "- summary: {} pass, {} fail, {} unsupported, {} paper-discrepancy\n- wall time: {} ms\n",
            self.summary.pass, self.summary.fail, self.summary.unsupported, self.summary.paper_discrepancy, self.wall_time_ms
        ));
        for m in &self.cross_check_mismatches {
            s.push_str(&format!("- cross-check mismatch: {m}\n"));
        }
        for sec in &self.sections {
            s.push_str(&format!("\n## {}\n\n| id | verdict | statement |\n|---|---|---|\n", sec.suite));
            for c in &sec.certificates {
                let v = if c.paper_discrepancy { format!("{} (paper-discrepancy)", c.verdict) } else { c.verdict.to_string() };
                s.push_str(&format!("| `{}` | {} | {} |\n", c.id, v, c.statement.replace('|', "\\|")));
            }
        }
        s
    }
}

fn summarize(sections: &[Section]) -> Summary {
    let mut s = Summary::default();
    for c in sections.iter().flat_map(|s| &s.certificates) {
        match (c.verdict, c.paper_discrepancy) {
            (Verdict::Pass, _) => s.pass += 1,
            (Verdict::Fail, true) => s.paper_discrepancy += 1,
            (Verdict::Fail, false) => s.fail += 1,
            (Verdict::Unsupported, _) => s.unsupported += 1,
        }
    }
    s
}

/// Converts an error into an `UNSUPPORTED` record when it reflects a limitation
/// of the engine rather than a bug.
fn or_unsupported(id: String, r: Result<Certificate>) -> Result<Certificate> {
    match r {
        Ok(c) => Ok(c),
        Err(e @ (HgcError::InvariantViolation(_) | HgcError::Config(_) | HgcError::Io(_))) => Err(e),
        Err(e) => Ok(Certificate::new(id, "could not be decided", Verdict::Unsupported).detail("error", e.to_string())),
    }
}

fn lemma_suite<T: Tower>(curve: &Curve<T>, d_max: i64) -> Result<Vec<Certificate>> {
    let p = curve.n() as i64;
    let engine = LinearSpaceEngine::new(curve)?;
    CuspFamily::ALL
        .iter()
        .map(|&family| {
            let mut dims = Vec::new();
            let mut bases = Vec::new();
            let mut ok = true;
            for d in 0..=d_max {
                let c = engine.certificate(d, family)?;
                ok &= c.passed();
                dims.push(c.details["dimension"].clone());
                bases.push(serde_json::json!({ "d": d, "basis": c.witness }));
            }
            Ok(Certificate::new(
                format!("lemma/p{p}/{family}"),
                format!("for 0 <= d <= {d_max}, L(d*sum[{family}_i]) has dimension d+1 with the monomial basis of the lemma"),
                Verdict::from_bool(ok),
            )
            .input("p", p)
            .input("family", family)
            .input("d_max", d_max)
            .detail("dims", dims)
            .detail("bases", bases))
        })
        .collect()
}

fn nontrivial_suite<T: Tower>(curve: &Curve<T>) -> Result<Vec<Certificate>> {
    let p = curve.n() as i64;
    let e = Point::C1(0);
    let jobs: Vec<(i64, i64, i64)> =
        (1..p).flat_map(|a| (1..p).flat_map(move |b| (1..=(p - 1) / 2).map(move |l| (a, b, l)))).collect();
    jobs.par_iter()
        .map(|&(a, b, l)| {
            or_unsupported(format!("nontrivial/p{p}/a{a}b{b}/l{l}"), nontriviality_certificate(curve, a, b, l, &e))
        })
        .collect()
}

fn quotient_suite<T: Tower>(curve: &Curve<T>) -> Result<Vec<Certificate>> {
    let n = curve.n() as i64;
    let mut out: Vec<Certificate> = (1..n)
        .flat_map(|a| (1..n).map(move |b| (a, b)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(a, b)| verify_quotient_map(curve, a, b, None))
        .collect::<Result<_>>()?;
    if n >= 3 {
        for case in [HyperellipticCase::Diagonal, HyperellipticCase::Antidiagonal] {
            out.push(verify_hyperelliptic_isomorphism(curve.tower(), case, false)?);
        }
    }
    for p in (2..=n).filter(|p| n % p == 0 && is_prime(*p as usize)) {
        out.push(covering_map_check(curve, p)?);
    }
    for mode in LambdaMode::ALL {
        out.push(branch_permutation_certificate(mode)?);
    }
    Ok(out)
}

fn genus_suite<T: Tower>(curve: &Curve<T>) -> Result<Vec<Certificate>> {
    let n = curve.n() as i64;
    let mut out = Vec::new();
    out.push(genus_certificate(n)?);
    if n % 2 == 0 {
        for case in [InvolutionCase::I, InvolutionCase::Ii, InvolutionCase::Iii] {
            out.push(involution_quotient_genus(curve, case)?);
        }
    }
    Ok(out)
}

/// The certificates of one suite on one curve.
pub fn run_suite_on<T: Tower>(curve: &Curve<T>, suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Certificate>> {
    let n = curve.n();
    let mut certs = match suite {
        Suite::Cusps => {
            let mut v = cusp_identity_suite(curve)?;
            if cfg.torsion {
                let rows = torsion_order_table(curve, &default_torsion_pairs(), None)?;
                v.extend(rows.iter().map(|r| r.certificate(n as i64)));
            }
            v
        }
        Suite::Lemma => lemma_suite(curve, cfg.lemma_d.unwrap_or(n as i64 - 1))?,
        Suite::Canonical => vec![or_unsupported(format!("canonical/N{n}"), canonical_divisor(curve).map(|(_, c)| c))?],
        Suite::PiZ => curve
            .cusps()
            .par_iter()
            .map(|e| or_unsupported(format!("pi-z/N{n}/{e}"), pi_z_certificate(curve, e)))
            .collect::<Result<_>>()?,
        Suite::Nontrivial => nontrivial_suite(curve)?,
        Suite::Invariants => {
            let mut v = forms_suite(curve)?;
            v.push(invariants_certificate(n as i64));
            v
        }
        Suite::Genus => genus_suite(curve)?,
        Suite::QuotientMaps => quotient_suite(curve)?,
        Suite::Section43 => displayed_witness_protocol(curve, None)?,
    };
    certs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(certs)
}

fn run_sections<T: Tower>(tower: T, cfg: &SuiteConfig) -> Result<Vec<Section>> {
    let tower = if cfg.negate_xi { tower.negate_xi() } else { tower };
    let mut curve = Curve::new(tower);
    if let Some(c) = cfg.precision_ceiling {
        curve = curve.with_ceiling(c);
    }
    let suites: Vec<Suite> = cfg.suites.iter().copied().collect();
    suites
        .par_iter()
        .map(|&s| Ok(Section { suite: s, certificates: run_suite_on(&curve, s, cfg)? }))
        .collect()
}

fn sections_for(cfg: &SuiteConfig) -> Result<Vec<Section>> {
    match cfg.backend.spec() {
        None => run_sections(SymbolicTower::new(cfg.n), cfg),
        Some(spec) => run_sections(FiniteTower::new(cfg.n, &spec)?, cfg),
    }
}

/// Runs the selected suites. Records are ordered by suite, then by id.
pub fn run_suite(cfg: &SuiteConfig) -> Result<CertificateBundle> {
    cfg.validate()?;
    let start = Instant::now();
    let sections = sections_for(cfg)?;
    let summary = summarize(&sections);
    Ok(CertificateBundle {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        summary,
        wall_time_ms: start.elapsed().as_millis() as u64,
        sections,
        cross_check_mismatches: Vec::new(),
    })
}

/// Per-certificate verdict differences between two bundles.
pub fn verdict_mismatches(a: &CertificateBundle, b: &CertificateBundle) -> Vec<String> {
    let va: BTreeMap<String, Verdict> = a.verdicts().into_iter().collect();
    let vb: BTreeMap<String, Verdict> = b.verdicts().into_iter().collect();
    let mut out = Vec::new();
    for id in va.keys().chain(vb.keys()).collect::<BTreeSet<_>>() {
        match (va.get(id), vb.get(id)) {
            (Some(x), Some(y)) if x == y => {}
            (x, y) => out.push(format!("{id}: {} vs {}", fmt_opt(x), fmt_opt(y))),
        }
    }
    out
}

fn fmt_opt(v: Option<&Verdict>) -> String {
    v.map_or("missing".into(), |v| v.to_string())
}

/// Runs `cfg` and the same suites on `other`, recording every verdict difference.
pub fn run_cross_checked(cfg: &SuiteConfig, other: Backend) -> Result<CertificateBundle> {
    let mut main = run_suite(cfg)?;
    let mut alt_cfg = cfg.clone();
    alt_cfg.backend = other;
    let alt = run_suite(&alt_cfg)?;
    main.cross_check_mismatches = verdict_mismatches(&main, &alt);
    main.wall_time_ms += alt.wall_time_ms;
    Ok(main)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{s}\""));
        }
        assert_eq!(Suite::parse_list("all", 4).unwrap().len(), 6);
        assert!(Suite::parse_list("lemma", 4).is_err());
    }

    #[test]
    fn bundle_round_trip_and_determinism() {
        let cfg = SuiteConfig::new(3, Backend::Symbolic, [Suite::Canonical, Suite::Genus, Suite::Invariants]);
        let b = run_suite(&cfg).unwrap();
        assert_eq!(b.exit_code(), 0, "{}", b.to_markdown());
        assert_eq!(CertificateBundle::from_json(&b.to_json()).unwrap(), b);
        let again = run_suite(&cfg).unwrap();
        assert_eq!(again.records_json(), b.records_json());
        let md = b.to_markdown();
        for s in &cfg.suites {
            assert_eq!(md.matches(&format!("\n## {s}\n")).count(), 1);
        }
    }

    #[test]
    fn finite_q_must_match_n() {
        let cfg = SuiteConfig::new(3, Backend::Finite { q: 11, lambda: None, xi: None, seed: Some(1) }, [Suite::Canonical]);
        assert!(matches!(run_suite(&cfg), Err(HgcError::Config(_))));
        let tiny = SuiteConfig::new(3, Backend::Finite { q: 7, lambda: None, xi: None, seed: Some(1) }, [Suite::Canonical]);
        assert!(matches!(run_suite(&tiny), Err(HgcError::InvalidSpec(_))));
    }
}
