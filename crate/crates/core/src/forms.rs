//! Differential forms `f dx`, the eigenforms `omega^{a,b}`, `eta^{a,b}`, and
//! character counting for invariants of `wedge^3 H^1_dR`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::arith::{Scalar, Tower};
use crate::certificate::{Certificate, OrdEntry, Verdict};
use crate::error::{HgcError, Result};
use crate::function_field::{Automorphism, Curve, CurveFunction, FieldHandle};

/// The form `f dx`.
#[derive(Clone, Debug)]
pub struct DifferentialForm<T: Tower> {
    pub f: CurveFunction<T>,
}

impl<T: Tower> PartialEq for DifferentialForm<T> {
    fn eq(&self, o: &Self) -> bool {
        self.f == o.f
    }
}

impl<T: Tower> DifferentialForm<T> {
    pub fn from_dx(f: CurveFunction<T>) -> Self {
        DifferentialForm { f }
    }

    /// `g dy`, rewritten as `g (dy/dx) dx`.
    pub fn from_dy(g: &CurveFunction<T>) -> Self {
        let dydx = g.field().y().derivative();
        DifferentialForm { f: g.mul(&dydx) }
    }

    /// The `g` with `self = g dy`.
    pub fn dy_coefficient(&self) -> Result<CurveFunction<T>> {
        self.f.div(&self.f.field().y().derivative())
    }

    pub fn add(&self, o: &Self) -> Self {
        DifferentialForm { f: self.f.add(&o.f) }
    }

    pub fn scale(&self, c: &T::S) -> Self {
        DifferentialForm { f: self.f.scale(c) }
    }

    pub fn mul_function(&self, g: &CurveFunction<T>) -> Self {
        DifferentialForm { f: self.f.mul(g) }
    }
}

impl<T: Tower> fmt::Display for DifferentialForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) dx", self.f)
    }
}

/// `sigma^* (f dx) = (f o sigma) d(x o sigma)`.
pub fn pullback_form<T: Tower>(curve: &Curve<T>, sigma: &Automorphism, w: &DifferentialForm<T>) -> Result<DifferentialForm<T>> {
    let fx = curve.apply(sigma, &w.f)?;
    let sx = curve.apply(sigma, &curve.x())?;
    Ok(DifferentialForm { f: fx.mul(&sx.derivative()) })
}

/// The character `chi^{a,b}(g^{r,s}) = zeta^{ar + bs}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Character {
    pub a: i64,
    pub b: i64,
}

impl Character {
    pub fn new(a: i64, b: i64, n: i64) -> Self {
        Character { a: a.rem_euclid(n), b: b.rem_euclid(n) }
    }

    pub fn mul(&self, o: &Character, n: i64) -> Character {
        Character::new(self.a + o.a, self.b + o.b, n)
    }

    pub fn is_trivial(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// The exponent `ar + bs mod n`.
    pub fn exponent(&self, r: i64, s: i64, n: i64) -> i64 {
        (self.a * r + self.b * s).rem_euclid(n)
    }

    pub fn trivial_on(&self, subgroup: &[(i64, i64)], n: i64) -> bool {
        subgroup.iter().all(|&(r, s)| self.exponent(r, s, n) == 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Omega,
    Eta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EigenBasisVector {
    pub character: Character,
    pub flavor: Flavor,
}

/// The `2(N-1)^2` labels `omega^{a,b}`, `eta^{a,b}`, `1 <= a, b <= N-1`.
pub fn eigen_basis(n: i64) -> Vec<EigenBasisVector> {
    let mut v = Vec::new();
    for a in 1..n {
        for b in 1..n {
            for flavor in [Flavor::Omega, Flavor::Eta] {
                v.push(EigenBasisVector { character: Character { a, b }, flavor });
            }
        }
    }
    v
}

fn check_range<T: Tower>(curve: &Curve<T>, a: i64, b: i64) -> Result<i64> {
    let n = curve.n() as i64;
    if !curve.is_standard() || !(1..n).contains(&a) || !(1..n).contains(&b) {
        return Err(HgcError::InvalidSpec(format!("(a,b)=({a},{b}) needs 1 <= a,b <= N-1 on the standard model")));
    }
    Ok(n)
}

/// `N x^a y^b / (1 - x^N) dx/x`, checked against `-N x^a y^b / (1 - y^N) dy/y`.
pub fn build_omega<T: Tower>(curve: &Curve<T>, a: i64, b: i64) -> Result<(DifferentialForm<T>, Certificate)> {
    let n = check_range(curve, a, b)?;
    let t = curve.tower();
    let one = curve.one();
    let xn = curve.x().pow(n)?;
    let yn = curve.y().pow(n)?;
    let mono = curve.monomial(a, b)?.scale(&t.int(n));
    let w = DifferentialForm::from_dx(mono.div(&one.sub(&xn))?.div(&curve.x())?);
    let alt = DifferentialForm::from_dy(&mono.neg().div(&one.sub(&yn))?.div(&curve.y())?);
    let ok = w == alt;
    let cert = Certificate::new(
        format!("forms/omega/N{n}/a{a}b{b}"),
        "N x^a y^b/(1-x^N) dx/x = -N x^a y^b/(1-y^N) dy/y",
        Verdict::from_bool(ok),
    )
    .input("N", n)
    .input("a", a)
    .input("b", b)
    .with_witness(&w);
    Ok((w, cert))
}

/// `eta^{a,b}` from its three displayed expressions, which must agree.
pub fn build_eta<T: Tower>(curve: &Curve<T>, a: i64, b: i64) -> Result<(DifferentialForm<T>, Certificate)> {
    let n = check_range(curve, a, b)?;
    let t = curve.tower();
    let lam = t.lambda();
    let one = curve.one();
    let xn = curve.x().pow(n)?;
    let yn = curve.y().pow(n)?;
    let (omega, _) = build_omega(curve, a, b)?;
    let c1 = t.int(-b).div(&t.int(n).mul(&lam))?;
    let e1 = omega.mul_function(&one.sub(&yn)).scale(&c1);
    let mono = curve.monomial(a, b)?;
    let c2 = t.int(-b).div(&lam)?;
    let e2 = DifferentialForm::from_dx(mono.mul(&one.sub(&yn)).div(&one.sub(&xn))?.div(&curve.x())?.scale(&c2));
    let c3 = t.int(b).div(&lam)?;
    let e3 = DifferentialForm::from_dy(&mono.div(&curve.y())?.scale(&c3));
    let ok = e1 == e2 && e2 == e3;
    let cert = Certificate::new(
        format!("forms/eta/N{n}/a{a}b{b}"),
        "-(b/(N lambda))(1-y^N) omega = -(b/lambda) x^a y^b (1-y^N)/(1-x^N) dx/x = (b/lambda) x^a y^b dy/y",
        Verdict::from_bool(ok),
    )
    .input("N", n)
    .input("a", a)
    .input("b", b)
    .detail("first_eq_second", e1 == e2)
    .detail("second_eq_third", e2 == e3)
    .with_witness(&e1);
    Ok((e1, cert))
}

/// `g^{r,s *} w = zeta^{ar+bs} w` for all `(r, s)`.
pub fn eigen_check<T: Tower>(curve: &Curve<T>, w: &DifferentialForm<T>, ch: Character, id: &str) -> Result<Certificate> {
    let n = curve.n() as i64;
    let t = curve.tower();
    let mut bad = Vec::new();
    for (r, s) in curve.full_group() {
        let lhs = pullback_form(curve, &Automorphism::Group(r, s), w)?;
        if lhs != w.scale(&t.zeta_pow(ch.exponent(r, s, n))) {
            bad.push(format!("g^({r},{s})"));
        }
    }
    let mut c = Certificate::new(
        format!("forms/eigen/{id}"),
        format!("G_N acts on {id} by the character ({},{})", ch.a, ch.b),
        Verdict::from_bool(bad.is_empty()),
    )
    .input("N", n);
    if !bad.is_empty() {
        c = c.detail("failing", bad);
    }
    Ok(c)
}

/// For `omega`: `ord >= 0` at every cusp. For `eta`: every cusp residue vanishes,
/// pole orders recorded. Both coefficients are regular at affine points
/// (denominators vanish only at cusps), so the cusps decide.
pub fn holomorphy_check<T: Tower>(curve: &Curve<T>, w: &DifferentialForm<T>, flavor: Flavor, id: &str) -> Result<Certificate> {
    let mut table = Vec::new();
    let mut min_ord = i64::MAX;
    let mut residues_zero = true;
    for p in curve.cusps() {
        let o = curve.form_ord_at(&w.f, &p)?;
        min_ord = min_ord.min(o);
        table.push(OrdEntry { point: p.to_string(), ord: o });
        if o < 0 && !curve.residue_at(&w.f, &p)?.is_zero() {
            residues_zero = false;
        }
    }
    let (ok, stmt) = match flavor {
        Flavor::Omega => (min_ord >= 0, format!("{id} is holomorphic")),
        Flavor::Eta => (residues_zero, format!("{id} is of the second kind")),
    };
    let mut c = Certificate::new(format!("forms/holomorphy/{id}"), stmt, Verdict::from_bool(ok))
        .input("N", curve.n())
        .detail("min_cusp_ord", min_ord)
        .detail("residues_zero", residues_zero);
    c.ord_table = table;
    Ok(c)
}

/// Identity, eigen and holomorphy checks for every `omega^{a,b}` and `eta^{a,b}`,
/// plus the count of holomorphic `omega` against the genus.
pub fn forms_suite<T: Tower>(curve: &Curve<T>) -> Result<Vec<Certificate>> {
    let n = curve.n() as i64;
    let mut out = Vec::new();
    let mut holo = 0;
    for a in 1..n {
        for b in 1..n {
            let ch = Character { a, b };
            let (w, c) = build_omega(curve, a, b)?;
            out.push(c);
            let id = format!("omega^({a},{b})");
            out.push(eigen_check(curve, &w, ch, &id)?);
            let h = holomorphy_check(curve, &w, Flavor::Omega, &id)?;
            if h.passed() {
                holo += 1;
            }
            out.push(h);
            let (e, c) = build_eta(curve, a, b)?;
            out.push(c);
            let id = format!("eta^({a},{b})");
            out.push(eigen_check(curve, &e, ch, &id)?);
            out.push(holomorphy_check(curve, &e, Flavor::Eta, &id)?);
        }
    }
    let (_, canon) = crate::divisors::canonical_divisor(curve)?;
    let genus = canon.details["genus"].as_i64().unwrap_or(-1);
    out.push(
        Certificate::new(
            format!("forms/holomorphic-count/N{n}"),
            "the holomorphic omega^{a,b} (distinct characters) number (N-1)^2 = genus",
            Verdict::from_bool(holo == (n - 1) * (n - 1) && genus == holo),
        )
        .input("N", n)
        .detail("holomorphic", holo)
        .detail("genus", genus),
    );
    Ok(out)
}

/// The dimension of `(wedge^3 H^1_dR)^H` with its basis as label triples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WedgeInvariants {
    pub n: i64,
    pub dim: u64,
    pub basis: Vec<[EigenBasisVector; 3]>,
}

/// Counts 3-subsets of eigen-basis labels whose character product is trivial on `subgroup`.
pub fn wedge_invariant_dim(n: i64, subgroup: &[(i64, i64)]) -> WedgeInvariants {
    let v = eigen_basis(n);
    let mut basis = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            for k in j + 1..v.len() {
                let ch = v[i].character.mul(&v[j].character, n).mul(&v[k].character, n);
                if ch.trivial_on(subgroup, n) {
                    basis.push([v[i], v[j], v[k]]);
                }
            }
        }
    }
    WedgeInvariants { n, dim: basis.len() as u64, basis }
}

/// The same dimension from ordered character triples: a triple of distinct
/// characters admits `2^3` label choices, one repeated character `1 * 2`, and a
/// thrice repeated character none (each eigenspace is 2-dimensional).
pub fn wedge_invariant_dim_by_characters(n: i64, subgroup: &[(i64, i64)]) -> u64 {
    let chars: Vec<Character> = (1..n).flat_map(|a| (1..n).map(move |b| Character { a, b })).collect();
    let (mut distinct, mut pair) = (0u64, 0u64);
    for x in &chars {
        for y in &chars {
            for z in &chars {
                if !x.mul(y, n).mul(z, n).trivial_on(subgroup, n) {
                    continue;
                }
                match (x == y, y == z, x == z) {
                    (false, false, false) => distinct += 1,
                    (true, true, true) => {}
                    _ => pair += 1,
                }
            }
        }
    }
    // distinct: 6 orderings per set, 8 label choices; pair: 3 orderings, 2 choices
    (distinct * 8 / 6) + (pair * 2 / 3)
}

pub fn full_group(n: i64) -> Vec<(i64, i64)> {
    (0..n).flat_map(|r| (0..n).map(move |s| (r, s))).collect()
}

/// `N -> dim (wedge^3 H^1_dR)^{G_N}` with both counting routes.
pub fn invariants_table(n_max: i64) -> BTreeMap<i64, (u64, u64)> {
    (2..=n_max)
        .map(|n| {
            let g = full_group(n);
            (n, (wedge_invariant_dim(n, &g).dim, wedge_invariant_dim_by_characters(n, &g)))
        })
        .collect()
}

pub fn invariants_certificate(n: i64) -> Certificate {
    let g = full_group(n);
    let w = wedge_invariant_dim(n, &g);
    let alt = wedge_invariant_dim_by_characters(n, &g);
    let mut c = Certificate::new(
        format!("invariants/N{n}"),
        format!("dim (wedge^3 H^1_dR)^(G_{n}) computed by two counting routes"),
        Verdict::from_bool(w.dim == alt && (n != 3 || w.dim == 0)),
    )
    .input("N", n)
    .detail("dim", w.dim)
    .detail("dim_by_characters", alt);
    if n == 3 {
        c.statement = "(wedge^3 H^1_dR)^(G_3) = 0".into();
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SymbolicTower;

    #[test]
    fn omega_eta_identities_n3() {
        let c = Curve::new(SymbolicTower::new(3));
        let (w, cert) = build_omega(&c, 1, 1).unwrap();
        assert!(cert.passed());
        let (_, cert) = build_eta(&c, 1, 2).unwrap();
        assert!(cert.passed(), "{:?}", cert.details);
        assert!(holomorphy_check(&c, &w, Flavor::Omega, "w").unwrap().passed());
        let (e, _) = build_eta(&c, 1, 1).unwrap();
        let h = holomorphy_check(&c, &e, Flavor::Eta, "e").unwrap();
        assert!(h.passed());
        assert!(h.details["min_cusp_ord"].as_i64().unwrap() < 0);
        let dy = DifferentialForm::from_dy(&c.x());
        assert_eq!(dy.dy_coefficient().unwrap(), c.x());
    }

    #[test]
    fn wedge_counts() {
        assert_eq!(wedge_invariant_dim(3, &full_group(3)).dim, 0);
        assert_eq!(wedge_invariant_dim(2, &full_group(2)).dim, 0);
        for (n, (a, b)) in invariants_table(6) {
            assert_eq!(a, b, "N={n}");
        }
    }
}
