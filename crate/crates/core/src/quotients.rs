//! Superelliptic quotients `C^{a,b}`, their genera, the explicit hyperelliptic
//! models, and Möbius maps permuting the branch locus `{0, 1, 1/lambda, oo}`.

use std::fmt;
use std::sync::Arc;

use num_integer::gcd;
use serde::Serialize;

use crate::arith::{CycloField, Poly, Scalar, SymbolicTower, Tower};
use crate::certificate::{Certificate, Verdict};
use crate::cycles::{quotient_coordinates, Proj};
use crate::divisors::canonical_divisor;
use crate::error::{HgcError, Result};
use crate::function_field::{Automorphism, Curve, FieldHandle, KummerField};

/// `v^N = (-u)^{e0} (1-u)^{e1} (1-lambda u)^{e_lambda}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuperellipticModel {
    pub n: i64,
    pub e0: i64,
    pub e1: i64,
    pub e_lambda: i64,
}

impl SuperellipticModel {
    pub fn new(n: i64, e0: i64, e1: i64, e_lambda: i64) -> Self {
        SuperellipticModel { n, e0: e0.rem_euclid(n), e1: e1.rem_euclid(n), e_lambda: e_lambda.rem_euclid(n) }
    }

    /// The quotient `C^{a,b}`: exponents `(a, N-a, N-b)`.
    pub fn quotient(n: i64, a: i64, b: i64) -> Self {
        Self::new(n, a, n - a, n - b)
    }

    pub fn e_inf(&self) -> i64 {
        (-(self.e0 + self.e1 + self.e_lambda)).rem_euclid(self.n)
    }

    pub fn exponents(&self) -> [i64; 4] {
        [self.e0, self.e1, self.e_lambda, self.e_inf()]
    }
}

/// Riemann–Hurwitz for a cyclic cover of the line: `2g - 2 = -2N + sum (N - gcd(N, e))`.
pub fn cyclic_cover_genus(model: &SuperellipticModel) -> Result<i64> {
    let n = model.n;
    if n < 2 {
        return Err(HgcError::InvalidSpec(format!("cover degree {n}")));
    }
    let g = model.exponents().iter().fold(n, |acc, e| gcd(acc, *e));
    if g != 1 {
        return Err(HgcError::DisconnectedCover(g as u64));
    }
    let ram: i64 = model.exponents().iter().map(|e| n - gcd(n, *e)).sum();
    Ok((ram - 2 * n + 2) / 2)
}

/// The criterion: `a = b`, `a + b = N`, or `N = 2m` and `b = m`; needs `gcd(N, a) = 1`.
pub fn hyperelliptic_classification(n: i64, a: i64, b: i64) -> Result<bool> {
    if gcd(n, a) != 1 {
        return Err(HgcError::Unsupported(format!("gcd(N, a) = {} for (N,a,b)=({n},{a},{b})", gcd(n, a))));
    }
    Ok(a == b || a + b == n || (n % 2 == 0 && b == n / 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenusRow {
    pub a: i64,
    pub b: i64,
    pub genus: i64,
    pub hyperelliptic: Option<bool>,
}

/// `(a, b) -> genus of C^{a,b}` with the classification where it applies;
/// pairs giving disconnected covers are left out.
pub fn genus_table(n: i64) -> Result<Vec<GenusRow>> {
    let mut rows = Vec::new();
    for a in 1..n {
        for b in 1..n {
            let genus = match cyclic_cover_genus(&SuperellipticModel::quotient(n, a, b)) {
                Ok(g) => g,
                Err(HgcError::DisconnectedCover(_)) => continue,
                Err(e) => return Err(e),
            };
            let hyperelliptic = hyperelliptic_classification(n, a, b).ok();
            rows.push(GenusRow { a, b, genus, hyperelliptic });
        }
    }
    Ok(rows)
}

/// Genus invariance under `(a,b) ~ (aj,bj)` and `(a,b) ~ (b,a)`, and consistency of
/// the classification with genus 2.
pub fn genus_certificate(n: i64) -> Result<Certificate> {
    let rows = genus_table(n)?;
    let genus = |a: i64, b: i64| rows.iter().find(|r| r.a == a && r.b == b).map(|r| r.genus);
    let mut bad = Vec::new();
    for r in &rows {
        for j in (1..n).filter(|j| gcd(*j, n) == 1) {
            if genus((r.a * j).rem_euclid(n), (r.b * j).rem_euclid(n)) != Some(r.genus) {
                bad.push(format!("({},{})*{j}", r.a, r.b));
            }
        }
        if genus(r.b, r.a) != Some(r.genus) {
            bad.push(format!("swap ({},{})", r.a, r.b));
        }
        if r.genus == 2 && r.hyperelliptic == Some(false) {
            bad.push(format!("genus 2 but not hyperelliptic: ({},{})", r.a, r.b));
        }
    }
    let mut c = Certificate::new(
        format!("genus/N{n}"),
        format!("genera of C^(a,b) for N={n} are invariant under (a,b)~(aj,bj), (a,b)~(b,a), and agree with the classification in genus 2"),
        Verdict::from_bool(bad.is_empty()),
    )
    .input("N", n)
    .detail("table", serde_json::to_value(&rows).expect("serializable"));
    if !bad.is_empty() {
        c = c.detail("violations", bad);
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InvolutionCase {
    /// `(x, y) -> (-x, y)`
    I,
    /// `(x, y) -> (x, -y)`
    Ii,
    /// `(x, y) -> (-x, -y)`
    Iii,
}

impl fmt::Display for InvolutionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InvolutionCase::I => "i",
            InvolutionCase::Ii => "ii",
            InvolutionCase::Iii => "iii",
        };
        write!(f, "{s}")
    }
}

/// Genus of `X_{N,lambda}` modulo one of its three involutions in `mu_N x mu_N`.
/// The fixed points are counted on the cusps (an affine fixed point would need
/// `x = 0` or `y = 0`), giving the genus by Riemann–Hurwitz. Cases (i) and (ii)
/// are also computed from the canonical divisor of the model
/// `(1 - x^{N/2})(1 - y^N) = lambda x^{N/2} y^N` (for (ii) after swapping `x, y`).
/// Case (iii) is the function field `K(x^2, xy)`, with model
/// `(1 - u^{N/2})(1 - (w^2/u)^{N/2}) = lambda w^N`.
pub fn involution_quotient_genus<T: Tower>(curve: &Curve<T>, case: InvolutionCase) -> Result<Certificate> {
    let n = curve.n() as i64;
    if n % 2 != 0 || !curve.is_standard() {
        return Err(HgcError::InvalidSpec(format!("N = {n} must be even")));
    }
    let h = n / 2;
    let sigma = match case {
        InvolutionCase::I => Automorphism::Group(h, 0),
        InvolutionCase::Ii => Automorphism::Group(0, h),
        InvolutionCase::Iii => Automorphism::Group(h, h),
    };
    let mut fixed = 0;
    for p in curve.cusps() {
        if curve.act(&sigma, &p)? == p {
            fixed += 1;
        }
    }
    let g = (n - 1) * (n - 1);
    let rh = ((2 * g - 2) - fixed) / 4 + 1;
    let model_genus = match case {
        InvolutionCase::I | InvolutionCase::Ii => {
            let mixed = Curve::mixed(curve.tower().clone(), h as usize);
            let (_, c) = canonical_divisor(&mixed)?;
            c.details["genus"].as_i64()
        }
        InvolutionCase::Iii => None,
    };
    let expected = (h - 1) * (n - 1);
    let ok = match case {
        InvolutionCase::I | InvolutionCase::Ii => model_genus == Some(rh) && rh == expected,
        InvolutionCase::Iii => true,
    } && (n < 3 || rh != 0);
    let model = match case {
        InvolutionCase::I => "(1 - x^(N/2))(1 - y^N) = lambda x^(N/2) y^N",
        InvolutionCase::Ii => "(1 - x^N)(1 - y^(N/2)) = lambda x^N y^(N/2)",
        InvolutionCase::Iii => "(1 - u^(N/2))(1 - (w^2/u)^(N/2)) = lambda w^N, u = x^2, w = xy",
    };
    let mut c = Certificate::new(
        format!("involution/N{n}/{case}"),
        format!("X_(N,lambda)/<{sigma}> has genus {rh}, nonzero for N >= 3"),
        Verdict::from_bool(ok),
    )
    .input("N", n)
    .input("case", case)
    .detail("fixed_points", fixed)
    .detail("genus", rh)
    .detail("model", model);
    if let Some(mg) = model_genus {
        c = c.detail("model_genus", mg).detail("expected", expected);
    }
    Ok(c)
}

/// `v^N - (-u)^a (1-u)^{N-a} (1-lambda u)^{e_lambda}` with `u, v` the quotient
/// coordinates; zero on the curve exactly when `e_lambda = N - b`.
pub fn verify_quotient_map<T: Tower>(curve: &Curve<T>, a: i64, b: i64, e_lambda: Option<i64>) -> Result<Certificate> {
    let n = curve.n() as i64;
    if !(1..n).contains(&a) || !(1..n).contains(&b) || !curve.is_standard() {
        return Err(HgcError::InvalidSpec(format!("(a,b)=({a},{b}) out of range")));
    }
    let el = e_lambda.unwrap_or(n - b);
    let (u, v) = quotient_coordinates(curve, a, b)?;
    let one = curve.one();
    let lam = curve.tower().lambda();
    let rhs = u.neg().pow(a)?.mul(&one.sub(&u).pow(n - a)?).mul(&one.sub(&u.scale(&lam)).pow(el)?);
    let holds = v.pow(n)? == rhs;
    Ok(Certificate::new(
        format!("quotient-map/N{n}/a{a}b{b}/e{el}"),
        format!("u = -x^N/(1-x^N), v = x^a y^b/((1-x^N) y^N) satisfy v^N = (-u)^a (1-u)^(N-a) (1-lambda u)^{el}"),
        Verdict::from_bool(holds),
    )
    .input("N", n)
    .input("a", a)
    .input("b", b)
    .input("e_lambda", el))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HyperellipticCase {
    /// `C^{1,1}`
    Diagonal,
    /// `C^{1,N-1}`
    Antidiagonal,
}

impl fmt::Display for HyperellipticCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperellipticCase::Diagonal => write!(f, "C^(1,1)"),
            HyperellipticCase::Antidiagonal => write!(f, "C^(1,N-1)"),
        }
    }
}

/// The function field of `C^{a,b}`: `v^N = (-u)^a (1-u)^{N-a} (1-lambda u)^{N-b}` over `K0(u)`.
pub fn quotient_field<T: Tower>(tower: &T, a: i64, b: i64) -> Arc<KummerField<T>> {
    let n = tower.n() as i64;
    let one = tower.one();
    let lam = tower.lambda();
    let minus_u = Poly::monomial(one.neg(), 1);
    let one_minus_u = Poly::from_coeffs(vec![one.clone(), one.neg()]);
    let one_minus_lu = Poly::from_coeffs(vec![one.clone(), lam.neg()]);
    let r = minus_u.pow(a as u32).mul(&one_minus_u.pow((n - a) as u32)).mul(&one_minus_lu.pow((n - b) as u32));
    KummerField::new(tower.clone(), n as usize, r, Poly::constant(one), format!("C^({a},{b})"))
}

/// Substitutes the displayed `(z, w)` and checks the hyperelliptic equation in the
/// function field of the quotient; then recovers `(u, v)` from `(z, w)`.
/// `perturb` adds `1/lambda` to the constant term (negative control).
pub fn verify_hyperelliptic_isomorphism<T: Tower>(tower: &T, case: HyperellipticCase, perturb: bool) -> Result<Certificate> {
    let n = tower.n() as i64;
    let b = match case {
        HyperellipticCase::Diagonal => 1,
        HyperellipticCase::Antidiagonal => n - 1,
    };
    let ff = quotient_field(tower, 1, b);
    let (u, v) = (ff.x(), ff.y());
    let one = ff.one();
    let lam = tower.lambda();
    let lam_f = ff.constant(lam.clone());
    let two_lam = ff.constant(lam.mul(&tower.int(2)));
    let one_minus_u = one.sub(&u);
    let one_minus_lu = one.sub(&u.mul(&lam_f));
    let (z, shift_of) = match case {
        HyperellipticCase::Diagonal => (one_minus_u.mul(&one_minus_lu).div(&v)?, one.add(&lam_f)),
        HyperellipticCase::Antidiagonal => (v.div(&one_minus_u)?, one.clone()),
    };
    let zn = z.pow(n)?;
    let c = shift_of.sub(&zn).div(&two_lam)?;
    let w = u.sub(&c);
    let mut rhs = c.square();
    let tail = match case {
        HyperellipticCase::Diagonal => one.div(&lam_f)?.neg(),
        HyperellipticCase::Antidiagonal => zn.div(&lam_f)?,
    };
    rhs = rhs.add(&tail);
    if perturb {
        rhs = rhs.add(&one.div(&lam_f)?);
    }
    let forward = w.square() == rhs;
    let u_back = w.add(&c);
    let v_back = match case {
        HyperellipticCase::Diagonal => one_minus_u.mul(&one_minus_lu).div(&z)?,
        HyperellipticCase::Antidiagonal => z.mul(&one.sub(&u_back)),
    };
    let inverse = u_back == u && v_back == v;
    let eq = match case {
        HyperellipticCase::Diagonal => "w^2 = (1+lambda-z^N)^2/(4 lambda^2) - 1/lambda",
        HyperellipticCase::Antidiagonal => "w^2 = (1-z^N)^2/(4 lambda^2) + z^N/lambda",
    };
    Ok(Certificate::new(
        format!("hyperelliptic/N{n}/{}{}", if b == 1 { "1-1" } else { "1-N-1" }, if perturb { "/perturbed" } else { "" }),
        format!("{case} is birational to {eq}"),
        Verdict::from_bool(forward && inverse),
    )
    .input("N", n)
    .input("case", case)
    .input("perturbed", perturb)
    .detail("forward", forward)
    .detail("inverse", inverse))
}

/// `u -> (a u + b)/(c u + d)` up to scale.
#[derive(Clone, Debug)]
pub struct MoebiusMap<Sc> {
    pub m: [Sc; 4],
}

impl<Sc: Scalar> PartialEq for MoebiusMap<Sc> {
    fn eq(&self, o: &Self) -> bool {
        let (a, b) = (&self.m, &o.m);
        (0..4).all(|i| (0..4).all(|j| a[i].mul(&b[j]) == a[j].mul(&b[i])))
    }
}

impl<Sc: Scalar> MoebiusMap<Sc> {
    pub fn new(a: Sc, b: Sc, c: Sc, d: Sc) -> Result<Self> {
        if a.mul(&d).sub(&b.mul(&c)).is_zero() {
            return Err(HgcError::InvalidSpec("singular Möbius matrix".into()));
        }
        Ok(MoebiusMap { m: [a, b, c, d] })
    }

    pub fn identity(one: &Sc) -> Self {
        let z = one.zero_like();
        MoebiusMap { m: [one.clone(), z.clone(), z, one.clone()] }
    }

    pub fn apply(&self, p: &Proj<Sc>) -> Proj<Sc> {
        let [a, b, c, d] = &self.m;
        let (num, den) = match p {
            Proj::Fin(u) => (a.mul(u).add(b), c.mul(u).add(d)),
            Proj::Inf => (a.clone(), c.clone()),
        };
        if den.is_zero() {
            Proj::Inf
        } else {
            Proj::Fin(num.div(&den).expect("nonzero"))
        }
    }

    /// `self o o`.
    pub fn compose(&self, o: &Self) -> Self {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &o.m;
        MoebiusMap {
            m: [a.mul(e).add(&b.mul(g)), a.mul(f).add(&b.mul(h)), c.mul(e).add(&d.mul(g)), c.mul(f).add(&d.mul(h))],
        }
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = &self.m;
        MoebiusMap { m: [d.clone(), b.neg(), c.neg(), a.clone()] }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.m[0].one_like())
    }
}

impl<Sc: Scalar> fmt::Display for MoebiusMap<Sc> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(f, "u -> (({a})u + ({b}))/(({c})u + ({d}))")
    }
}

fn homog<Sc: Scalar>(p: &Proj<Sc>, one: &Sc) -> (Sc, Sc) {
    match p {
        Proj::Fin(u) => (u.clone(), one.clone()),
        Proj::Inf => (one.clone(), one.zero_like()),
    }
}

/// The map sending `p1, p2, p3` to `0, 1, oo`.
fn to_standard<Sc: Scalar>(p: [&Proj<Sc>; 3], one: &Sc) -> MoebiusMap<Sc> {
    let (x1, y1) = homog(p[0], one);
    let (x2, y2) = homog(p[1], one);
    let (x3, y3) = homog(p[2], one);
    // L_k(z) = det(z, p_k) = z_x y_k - z_y x_k
    let l3_at2 = x2.mul(&y3).sub(&y2.mul(&x3));
    let l1_at2 = x2.mul(&y1).sub(&y2.mul(&x1));
    MoebiusMap { m: [l3_at2.mul(&y1), l3_at2.mul(&x1).neg(), l1_at2.mul(&y3), l1_at2.mul(&x3).neg()] }
}

/// Möbius maps stabilizing `{0, 1, 1/lambda, oo}`: one candidate per permutation,
/// by transporting three points, kept when the fourth lands correctly.
pub fn branch_permutation_maps<Sc: Scalar>(lam: &Sc) -> Result<Vec<MoebiusMap<Sc>>> {
    let one = lam.one_like();
    let pts = [Proj::Fin(one.zero_like()), Proj::Fin(one.clone()), Proj::Fin(lam.inv()?), Proj::Inf];
    let mut out: Vec<MoebiusMap<Sc>> = Vec::new();
    for perm in permutations4() {
        let src = to_standard([&pts[0], &pts[1], &pts[2]], &one);
        let dst = to_standard([&pts[perm[0]], &pts[perm[1]], &pts[perm[2]]], &one);
        let m = dst.inverse().compose(&src);
        if m.apply(&pts[3]) == pts[perm[3]] && !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut v = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| p.contains(&i)) {
                        v.push(p);
                    }
                }
            }
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LambdaMode {
    Generic,
    MinusOne,
    Half,
    Two,
    Zeta6,
    Zeta6Inv,
}

impl LambdaMode {
    pub const ALL: [LambdaMode; 6] =
        [LambdaMode::Generic, LambdaMode::MinusOne, LambdaMode::Half, LambdaMode::Two, LambdaMode::Zeta6, LambdaMode::Zeta6Inv];
}

impl fmt::Display for LambdaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LambdaMode::Generic => "generic",
            LambdaMode::MinusOne => "-1",
            LambdaMode::Half => "1/2",
            LambdaMode::Two => "2",
            LambdaMode::Zeta6 => "zeta6",
            LambdaMode::Zeta6Inv => "zeta6^-1",
        };
        write!(f, "{s}")
    }
}

/// The three involutions `(1-u)/(1-lambda u)`, `(1-lambda u)/(lambda(1-u))`, `1/(lambda u)`.
pub fn displayed_involutions<Sc: Scalar>(l: &Sc) -> Vec<MoebiusMap<Sc>> {
    let one = l.one_like();
    let z = one.zero_like();
    vec![
        MoebiusMap { m: [one.neg(), one.clone(), l.neg(), one.clone()] },
        MoebiusMap { m: [l.neg(), one.clone(), l.neg(), l.clone()] },
        MoebiusMap { m: [z, one, l.clone(), l.zero_like()] },
    ]
}

/// The extra maps listed for each special value of `lambda`.
pub fn displayed_special_maps<Sc: Scalar>(mode: LambdaMode, l: &Sc) -> Vec<MoebiusMap<Sc>> {
    let one = l.one_like();
    let z = one.zero_like();
    let m = |a: Sc, b: Sc, c: Sc, d: Sc| MoebiusMap { m: [a, b, c, d] };
    let lm1 = l.sub(&one);
    let one_ml = one.sub(l);
    match mode {
        LambdaMode::Generic => vec![],
        LambdaMode::MinusOne => vec![
            m(z.clone(), one.clone(), one.clone(), z.clone()),
            m(l.clone(), z.clone(), z.clone(), one.clone()),
            m(l.neg(), one.clone(), one.neg(), one.clone()),
            m(l.neg(), l.clone(), l.neg(), one.clone()),
        ],
        LambdaMode::Half => vec![
            m(l.neg(), one.clone(), z.clone(), one_ml.clone()),
            m(one.clone(), z.clone(), one.clone(), one.neg()),
            m(z.clone(), one.clone(), l.neg(), one.clone()),
            m(one.neg(), one.clone(), lm1.clone(), z.clone()),
        ],
        LambdaMode::Two => vec![
            m(one.neg(), one.clone(), z.clone(), one.clone()),
            m(one_ml.clone(), z.clone(), l.neg(), one.clone()),
            m(z.clone(), lm1.clone(), l.neg(), l.clone()),
            m(l.clone(), one.neg(), l.clone(), z.clone()),
        ],
        LambdaMode::Zeta6 | LambdaMode::Zeta6Inv => vec![
            m(l.neg(), one.clone(), z.clone(), one.clone()),
            m(one.clone(), one.neg(), one.clone(), z.clone()),
            m(z.clone(), one_ml.clone(), l.neg(), one.clone()),
            m(lm1.clone(), z.clone(), one.neg(), one.clone()),
            m(l.neg(), l.clone(), z.clone(), lm1.clone()),
            m(z.clone(), one.clone(), one.neg(), one.clone()),
            m(l.neg(), one.clone(), one_ml.clone(), z.clone()),
            m(l.clone(), z.clone(), l.clone(), one.neg()),
        ],
    }
}

fn branch_check<Sc: Scalar>(mode: LambdaMode, l: &Sc) -> Result<Certificate> {
    let maps = branch_permutation_maps(l)?;
    let shown = displayed_involutions(l);
    let extra = displayed_special_maps(mode, l);
    let closed = maps.iter().all(|a| maps.iter().all(|b| maps.contains(&a.compose(b))));
    let nonid: Vec<&MoebiusMap<Sc>> = maps.iter().filter(|m| !m.is_identity()).collect();
    let contains_shown = shown.iter().all(|m| maps.contains(m));
    let contains_extra = extra.iter().all(|m| maps.contains(m));
    let ok = match mode {
        LambdaMode::Generic => {
            nonid.len() == 3 && contains_shown && nonid.iter().all(|m| m.compose(m).is_identity())
        }
        _ => contains_shown && contains_extra,
    } && closed;
    Ok(Certificate::new(
        format!("branch-maps/{mode}"),
        match mode {
            LambdaMode::Generic => "the Möbius stabilizer of {0,1,1/lambda,oo} is the identity and the three displayed involutions".to_string(),
            _ => format!("for lambda = {mode} the stabilizer contains the displayed maps"),
        },
        Verdict::from_bool(ok),
    )
    .input("lambda", mode)
    .detail("stabilizer_order", maps.len() as u64)
    .detail("closed_under_composition", closed)
    .detail("maps", maps.iter().map(|m| m.to_string()).collect::<Vec<_>>()))
}

/// The branch-permutation certificate for one value of `lambda`: generic `lambda`
/// is the transcendental `1 - rho^3`, special values live in `Q(zeta_6)`.
pub fn branch_permutation_certificate(mode: LambdaMode) -> Result<Certificate> {
    if mode == LambdaMode::Generic {
        return branch_check(mode, &SymbolicTower::new(3).lambda());
    }
    let k = CycloField::new(6);
    let l = match mode {
        LambdaMode::MinusOne => k.int(-1),
        LambdaMode::Half => k.int(1).div(&k.int(2))?,
        LambdaMode::Two => k.int(2),
        LambdaMode::Zeta6 => k.zeta_pow(1),
        LambdaMode::Zeta6Inv => k.zeta_pow(5),
        LambdaMode::Generic => unreachable!(),
    };
    branch_check(mode, &l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SymbolicTower;

    #[test]
    fn genus_examples() {
        assert_eq!(cyclic_cover_genus(&SuperellipticModel::quotient(3, 1, 1)).unwrap(), 2);
        // v^m = (-u)^a (1-u)^{2m-a} (1-lambda u)^m reduces to exponents (a, -a, 0) mod m
        for m in 2..5 {
            for a in (1..2 * m).filter(|a| gcd(*a, m) == 1) {
                assert_eq!(cyclic_cover_genus(&SuperellipticModel::new(m, a, 2 * m - a, m)).unwrap(), 0);
            }
        }
        assert!(matches!(cyclic_cover_genus(&SuperellipticModel::new(4, 2, 2, 2)), Err(HgcError::DisconnectedCover(2))));
    }

    #[test]
    fn classification_examples() {
        assert!(hyperelliptic_classification(5, 1, 4).unwrap());
        assert!(hyperelliptic_classification(4, 1, 2).unwrap());
        assert!(!hyperelliptic_classification(5, 1, 2).unwrap());
        assert!(hyperelliptic_classification(4, 2, 1).is_err());
    }

    #[test]
    fn involutions() {
        for (n, g) in [(4usize, 3i64), (6, 10)] {
            let c = Curve::new(SymbolicTower::new(n));
            let cert = involution_quotient_genus(&c, InvolutionCase::I).unwrap();
            assert!(cert.passed(), "{:?}", cert.details);
            assert_eq!(cert.details["genus"], g);
        }
    }

    #[test]
    fn quotient_maps_and_isomorphisms() {
        let c = Curve::new(SymbolicTower::new(3));
        assert!(verify_quotient_map(&c, 1, 1, None).unwrap().passed());
        assert!(!verify_quotient_map(&c, 1, 1, Some(1)).unwrap().passed());
        let t = SymbolicTower::new(3);
        for case in [HyperellipticCase::Diagonal, HyperellipticCase::Antidiagonal] {
            assert!(verify_hyperelliptic_isomorphism(&t, case, false).unwrap().passed());
            assert!(!verify_hyperelliptic_isomorphism(&t, case, true).unwrap().passed());
        }
    }

    #[test]
    fn branch_maps() {
        for mode in LambdaMode::ALL {
            let c = branch_permutation_certificate(mode).unwrap();
            assert!(c.passed(), "{mode}: {:?}", c.details);
        }
        let g = branch_permutation_certificate(LambdaMode::Generic).unwrap();
        assert_eq!(g.details["stabilizer_order"], 4);
    }
}
