//! Linear algebra on spans of monomials: witness search, Riemann–Roch spaces
//! and the nontriviality systems.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Divisor, S};
use crate::arith::linalg::{kernel, rank};
use crate::arith::{Poly, Scalar, Tower};
use crate::certificate::{Certificate, Verdict};
use crate::error::{HgcError, Result};
use crate::function_field::{Automorphism, Curve, CurveFunction, FieldHandle, KummerField};
use crate::local_series::{LaurentSeries, Point, EXACT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CuspFamily {
    A,
    B,
    C1,
    C2,
}

impl CuspFamily {
    pub const ALL: [CuspFamily; 4] = [CuspFamily::A, CuspFamily::B, CuspFamily::C1, CuspFamily::C2];

    pub fn point<Sc>(self, i: i64) -> Point<Sc> {
        match self {
            CuspFamily::A => Point::A(i),
            CuspFamily::B => Point::B(i),
            CuspFamily::C1 => Point::C1(i),
            CuspFamily::C2 => Point::C2(i),
        }
    }

    pub fn of<Sc>(p: &Point<Sc>) -> Option<(CuspFamily, i64)> {
        match p {
            Point::A(i) => Some((CuspFamily::A, *i)),
            Point::B(i) => Some((CuspFamily::B, *i)),
            Point::C1(i) => Some((CuspFamily::C1, *i)),
            Point::C2(i) => Some((CuspFamily::C2, *i)),
            _ => None,
        }
    }

    /// The exponent pair of the monomial `u^m` spanning the bounded-pole spaces:
    /// `x^m` (c1), `y^m` (c2), `x^-m` (a), `y^-m` (b).
    pub fn lemma_monomial(self, m: i64) -> (i64, i64) {
        match self {
            CuspFamily::C1 => (m, 0),
            CuspFamily::C2 => (0, m),
            CuspFamily::A => (-m, 0),
            CuspFamily::B => (0, -m),
        }
    }
}

impl fmt::Display for CuspFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CuspFamily::A => "a",
            CuspFamily::B => "b",
            CuspFamily::C1 => "c1",
            CuspFamily::C2 => "c2",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for CuspFamily {
    type Err = HgcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(CuspFamily::A),
            "b" => Ok(CuspFamily::B),
            "c1" => Ok(CuspFamily::C1),
            "c2" => Ok(CuspFamily::C2),
            _ => Err(HgcError::Parse(format!("unknown cusp family {s:?}"))),
        }
    }
}

/// Exponent ranges of the candidate monomials `x^m y^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBox {
    pub m: (i64, i64),
    pub n: (i64, i64),
}

impl SearchBox {
    pub fn square(lo: i64, hi: i64) -> Self {
        SearchBox { m: (lo, hi), n: (lo, hi) }
    }

    /// `0 <= m, n <= 2N`.
    pub fn default_for(n: usize) -> Self {
        Self::square(0, 2 * n as i64)
    }

    fn monomials(&self) -> Vec<(i64, i64)> {
        let mut v = Vec::new();
        for m in self.m.0..=self.m.1 {
            for n in self.n.0..=self.n.1 {
                v.push((m, n));
            }
        }
        v
    }
}

impl fmt::Display for SearchBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<=m<={}, {}<=n<={}", self.m.0, self.m.1, self.n.0, self.n.1)
    }
}

/// Laurent expansions at `p` of the monomials `x^m y^n`, each known modulo `t^target`,
/// built from cached powers of the chart series.
fn monomial_series<T: Tower>(curve: &Curve<T>, p: &Point<S<T>>, monos: &[(i64, i64)], target: i64) -> Result<Vec<LaurentSeries<S<T>>>> {
    let one = curve.tower().one();
    let mut work = 2 * curve.n();
    loop {
        let ch = curve.chart(p, work)?;
        let finite = |s: &LaurentSeries<S<T>>| match s.valuation() {
            Some(v) if s.prec() > v + 2 * work as i64 => s.truncate(v + 2 * work as i64),
            _ => s.clone(),
        };
        let powers = |s: &LaurentSeries<S<T>>, ks: &mut dyn Iterator<Item = i64>| -> Result<HashMap<i64, LaurentSeries<S<T>>>> {
            let (lo, hi) = ks.fold((0, 0), |(lo, hi), k| (lo.min(k), hi.max(k)));
            let unit = LaurentSeries::new(0, vec![one.clone()], EXACT, &one);
            let mut out = HashMap::from([(0, unit.clone())]);
            let mut acc = unit.clone();
            for k in 1..=hi {
                acc = acc.mul(s);
                out.insert(k, acc.clone());
            }
            if lo < 0 {
                let inv = finite(s).inv()?;
                let mut acc = unit;
                for k in 1..=-lo {
                    acc = acc.mul(&inv);
                    out.insert(-k, acc.clone());
                }
            }
            Ok(out)
        };
        let xp = powers(&ch.xs, &mut monos.iter().map(|m| m.0))?;
        let yp = powers(&ch.ys, &mut monos.iter().map(|m| m.1))?;
        let series: Vec<_> = monos.iter().map(|(a, b)| xp[a].mul(&yp[b])).collect();
        if series.iter().all(|s| s.prec() >= target) {
            return Ok(series.into_iter().map(|s| s.truncate(target)).collect());
        }
        if work > 4 * (curve.ceiling() + target.unsigned_abs() as usize) {
            return Err(HgcError::PrecisionExhausted { point: p.to_string(), ceiling: curve.ceiling() });
        }
        work *= 2;
    }
}

/// Rows `coeff_{t^k}` for `k < bound` of the given expansions.
fn rows_below<Sc: Scalar>(series: &[LaurentSeries<Sc>], bound: i64, out: &mut Vec<Vec<Sc>>) {
    let lo = series.iter().filter_map(|s| s.valuation()).min().unwrap_or(bound);
    for k in lo..bound {
        out.push(series.iter().map(|s| s.coeff(k).expect("known below the bound")).collect());
    }
}

fn condition_rows<T: Tower>(curve: &Curve<T>, monos: &[(i64, i64)], conds: &[(Point<S<T>>, i64)]) -> Result<Vec<Vec<S<T>>>> {
    let mut rows = Vec::new();
    for (p, bound) in conds {
        rows_below(&monomial_series(curve, p, monos, *bound)?, *bound, &mut rows);
    }
    Ok(rows)
}

/// Monomials as `(sum_j c_j(x) y^j) / den` over one shared denominator:
/// `x^m y^n = x^m R^q y^j` with `n = qN + j` and `R = r_num / r_den`.
struct MonomialCoords<T: Tower> {
    field: Arc<KummerField<T>>,
    parts: Vec<(usize, Poly<S<T>>)>,
    den: Poly<S<T>>,
}

impl<T: Tower> MonomialCoords<T> {
    fn new(curve: &Curve<T>, monos: &[(i64, i64)]) -> Self {
        let n = curve.n() as i64;
        let one = curve.tower().one();
        let shift = monos.iter().map(|m| m.0).min().unwrap_or(0).min(0);
        let qs: Vec<i64> = monos.iter().map(|m| m.1.div_euclid(n)).collect();
        let qmin = qs.iter().copied().min().unwrap_or(0).min(0);
        let qmax = qs.iter().copied().max().unwrap_or(0).max(0);
        let (r_num, r_den) = curve.field().radicand();
        let span = (qmax - qmin) as usize;
        let mut num_pow = vec![Poly::constant(one.clone())];
        let mut den_pow = vec![Poly::constant(one.clone())];
        for k in 0..span {
            num_pow.push(num_pow[k].mul(r_num));
            den_pow.push(den_pow[k].mul(r_den));
        }
        let parts = monos
            .iter()
            .zip(&qs)
            .map(|((m, k), q)| {
                let p = num_pow[(q - qmin) as usize].mul(&den_pow[(qmax - q) as usize]).shift((m - shift) as usize);
                (k.rem_euclid(n) as usize, p)
            })
            .collect();
        let den = num_pow[(-qmin) as usize].mul(&den_pow[qmax as usize]).shift((-shift) as usize);
        MonomialCoords { field: curve.field().clone(), parts, den }
    }

    /// Coordinate vectors of `sum_i v_i mono_i` for each `v`, on a shared column set.
    fn images(&self, vs: &[Vec<S<T>>]) -> Vec<Vec<S<T>>> {
        let keys: BTreeSet<(usize, usize)> =
            self.parts.iter().flat_map(|(j, p)| (0..p.coeffs().len()).map(move |i| (*j, i))).collect();
        let idx: BTreeMap<(usize, usize), usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let zero = self.field.tower().zero();
        vs.iter()
            .map(|v| {
                let mut row = vec![zero.clone(); keys.len()];
                for (vi, (j, p)) in v.iter().zip(&self.parts) {
                    if vi.is_zero() {
                        continue;
                    }
                    for (i, a) in p.coeffs().iter().enumerate() {
                        if !a.is_zero() {
                            let c = idx[&(*j, i)];
                            row[c] = row[c].add(&vi.mul(a));
                        }
                    }
                }
                row
            })
            .collect()
    }

    fn width(&self) -> usize {
        self.parts.iter().flat_map(|(j, p)| (0..p.coeffs().len()).map(move |i| (*j, i))).collect::<BTreeSet<_>>().len()
    }

    fn function(&self, v: &[S<T>]) -> CurveFunction<T> {
        let mut comps = vec![Poly::zero(); self.field.degree()];
        for (vi, (j, p)) in v.iter().zip(&self.parts) {
            if !vi.is_zero() {
                comps[*j] = comps[*j].add(&p.scale(vi));
            }
        }
        CurveFunction::from_raw(&self.field, comps, self.den.clone())
    }
}

/// Solves the conditions on one class of monomials and returns the kernel with
/// its images; kernel vectors with zero image are relations such as `y^N = R`.
fn class_kernel<T: Tower>(
    curve: &Curve<T>,
    class: &[(i64, i64)],
    rows: &[Vec<S<T>>],
) -> (MonomialCoords<T>, Vec<Vec<S<T>>>, Vec<Vec<S<T>>>) {
    let coords = MonomialCoords::new(curve, class);
    let ker = kernel(rows, class.len(), &curve.tower().one());
    let images = coords.images(&ker);
    (coords, ker, images)
}

/// `g^{r,s}` for all `(r, s)` fixing `d` pointwise as a divisor.
fn stabilizer<T: Tower>(curve: &Curve<T>, d: &Divisor<S<T>>) -> Result<Vec<(i64, i64)>> {
    let n = curve.n() as i64;
    let m = curve.m() as i64;
    let mut h = Vec::new();
    for r in 0..m {
        for s in 0..n {
            if d.push(curve, &Automorphism::Group(r, s))? == *d {
                h.push((r, s));
            }
        }
    }
    Ok(h)
}

/// One representative per orbit of `h` on `pts`.
fn orbit_representatives<T: Tower>(curve: &Curve<T>, h: &[(i64, i64)], pts: &[Point<S<T>>]) -> Result<Vec<Point<S<T>>>> {
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for p in pts {
        if seen.contains(p) {
            continue;
        }
        reps.push(p.clone());
        for &(r, s) in h {
            seen.insert(curve.act(&Automorphism::Group(r, s), p)?);
        }
    }
    Ok(reps)
}

/// Groups monomials by their character on `h`.
fn character_classes(curve: &Curve<impl Tower>, h: &[(i64, i64)], monos: &[(i64, i64)]) -> Vec<Vec<(i64, i64)>> {
    let n = curve.n() as i64;
    let m_deg = curve.m() as i64;
    let mut classes: BTreeMap<Vec<i64>, Vec<(i64, i64)>> = BTreeMap::new();
    for &(m, k) in monos {
        // g^{r,s} x^m y^k = zeta_M^{rm} zeta_N^{sk} x^m y^k, exponents taken mod N
        let sig = h.iter().map(|&(r, s)| (r * m * (n / m_deg) + s * k).rem_euclid(n)).collect();
        classes.entry(sig).or_default().push((m, k));
    }
    classes.into_values().collect()
}

/// Searches the box for `f` with `div f = d`. Monomials have poles only at cusps,
/// so `ord >= d` at every cusp and every point of `supp d` forces `div f = d` by
/// degree; the returned function is re-verified from its own expansions.
pub fn witness_search<T: Tower>(curve: &Curve<T>, d: &Divisor<S<T>>, bx: Option<SearchBox>) -> Result<Option<CurveFunction<T>>> {
    if d.has_fibers() {
        return Err(HgcError::UnsupportedFiber(format!("support of {d} contains an unresolved fiber")));
    }
    if curve.degree(d) != 0 {
        return Ok(None);
    }
    if d.terms().any(|(p, k)| !p.is_cusp() && k < 0) {
        return Err(HgcError::Unsupported("poles at affine points".into()));
    }
    let bx = bx.unwrap_or_else(|| SearchBox::default_for(curve.n()));
    let (n, m) = (curve.n() as i64, curve.m() as i64);
    let m0 = (0..n).map(|i| -d.coeff(&Point::A(i))).max().unwrap_or(0).max(0);
    let n0 = (0..m).map(|i| -d.coeff(&Point::B(i))).max().unwrap_or(0).max(0);
    let monos: Vec<(i64, i64)> = bx.monomials().into_iter().map(|(a, b)| (a - m0, b - n0)).collect();
    let mut pts: Vec<Point<S<T>>> = curve.cusps();
    pts.extend(d.support().filter(|p| !p.is_cusp()).cloned());
    let h = stabilizer(curve, d)?;
    let reps = orbit_representatives(curve, &h, &pts)?;
    let conds: Vec<_> = reps.iter().map(|p| (p.clone(), d.coeff(p))).collect();
    for class in character_classes(curve, &h, &monos) {
        let rows = condition_rows(curve, &class, &conds)?;
        let (coords, ker, images) = class_kernel(curve, &class, &rows);
        let Some(pos) = images.iter().position(|r| r.iter().any(|a| !a.is_zero())) else {
            continue;
        };
        let f = coords.function(&ker[pos]);
        for p in &pts {
            let o = curve.ord_at(&f, p)?;
            if o != d.coeff(p) {
                return Err(HgcError::InvariantViolation(format!("search result has ord {o} at {p}, expected {}", d.coeff(p))));
            }
        }
        return Ok(Some(f));
    }
    Ok(None)
}

/// A basis of `L(D)` with the bounding divisor.
#[derive(Clone, Debug)]
pub struct LinearSpaceBasis<T: Tower> {
    pub bound: Divisor<S<T>>,
    pub basis: Vec<CurveFunction<T>>,
    pub dimension: usize,
    /// Exponents of the monomial basis when every eigenclass is spanned by one monomial.
    pub monomial_basis: Option<Vec<(i64, i64)>>,
}

impl<T: Tower> LinearSpaceBasis<T> {
    /// Whether the computed space is spanned exactly by `u^0, ..., u^d`.
    pub fn matches_lemma(&self, d: i64, family: CuspFamily) -> bool {
        let mut expected: Vec<(i64, i64)> = (0..=d).map(|m| family.lemma_monomial(m)).collect();
        expected.sort_by_key(|(a, b)| (a.abs() + b.abs(), *a, *b));
        self.monomial_basis.as_ref() == Some(&expected)
    }
}

struct ClassData<T: Tower> {
    monos: Vec<(i64, i64)>,
    /// Expansions at `a_0, b_0, c1_0, c2_0`, known below `t^0`.
    series: Vec<Vec<LaurentSeries<S<T>>>>,
    coords: MonomialCoords<T>,
}

/// Bounded-pole spaces `L(d sum_i [family_i])`, `0 <= d < N`, over the span of
/// `x^m y^n` with `|m|, |n| <= 2N`. The span splits into `G_N`-eigenclasses and,
/// the bounding divisors being `G_N`-invariant, conditions at one cusp per family suffice.
pub struct LinearSpaceEngine<'c, T: Tower> {
    curve: &'c Curve<T>,
    classes: Vec<ClassData<T>>,
}

impl<'c, T: Tower> LinearSpaceEngine<'c, T> {
    pub fn new(curve: &'c Curve<T>) -> Result<Self> {
        if !curve.is_standard() {
            return Err(HgcError::Unsupported("bounded-pole spaces on the mixed-degree model".into()));
        }
        let n = curve.n() as i64;
        let monos = SearchBox::square(-2 * n, 2 * n).monomials();
        let all = curve.full_group();
        let classes = character_classes(curve, &all, &monos)
            .into_iter()
            .map(|class| {
                let series = CuspFamily::ALL
                    .iter()
                    .map(|f| monomial_series(curve, &f.point(0), &class, 0))
                    .collect::<Result<Vec<_>>>()?;
                let coords = MonomialCoords::new(curve, &class);
                Ok(ClassData { monos: class, series, coords })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearSpaceEngine { curve, classes })
    }

    pub fn basis(&self, d: i64, family: CuspFamily) -> Result<LinearSpaceBasis<T>> {
        let n = self.curve.n() as i64;
        if !(0..n).contains(&d) {
            return Err(HgcError::InvalidSpec(format!("d = {d} outside 0..N-1")));
        }
        let bound = Divisor::from_terms((0..n).map(|i| (family.point(i), d)));
        let one = self.curve.tower().one();
        let zero = self.curve.tower().zero();
        let mut basis = Vec::new();
        let mut monomial_basis = Some(Vec::new());
        for cls in &self.classes {
            let mut rows = Vec::new();
            for (f, series) in CuspFamily::ALL.iter().zip(&cls.series) {
                rows_below(series, if *f == family { -d } else { 0 }, &mut rows);
            }
            let ker = kernel(&rows, cls.monos.len(), &one);
            if ker.is_empty() {
                continue;
            }
            let images = cls.coords.images(&ker);
            let width = cls.coords.width();
            let mut chosen: Vec<usize> = Vec::new();
            let mut acc: Vec<Vec<S<T>>> = Vec::new();
            for (i, img) in images.iter().enumerate() {
                acc.push(img.clone());
                if rank(&acc, width) > chosen.len() {
                    chosen.push(i);
                } else {
                    acc.pop();
                }
            }
            if chosen.is_empty() {
                continue;
            }
            // a one-dimensional class proportional to one of its monomials is reported as that monomial
            let single = if chosen.len() == 1 {
                let img = &images[chosen[0]];
                (0..cls.monos.len()).find(|&i| {
                    let e: Vec<S<T>> = (0..cls.monos.len()).map(|j| if j == i { one.clone() } else { zero.clone() }).collect();
                    let unit = cls.coords.images(&[e]).pop().unwrap();
                    unit.iter().any(|a| !a.is_zero()) && rank(&[img.clone(), unit], width) == 1
                })
            } else {
                None
            };
            match single {
                Some(i) => {
                    let (a, b) = cls.monos[i];
                    basis.push(self.curve.monomial(a, b)?);
                    if let Some(mb) = monomial_basis.as_mut() {
                        mb.push((a, b));
                    }
                }
                None => {
                    monomial_basis = None;
                    basis.extend(chosen.iter().map(|&i| cls.coords.function(&ker[i])));
                }
            }
        }
        if let Some(mb) = monomial_basis.as_mut() {
            mb.sort_by_key(|(a, b)| (a.abs() + b.abs(), *a, *b));
        }
        let dimension = basis.len();
        Ok(LinearSpaceBasis { bound, basis, dimension, monomial_basis })
    }

    pub fn certificate(&self, d: i64, family: CuspFamily) -> Result<Certificate> {
        let n = self.curve.n() as i64;
        let b = self.basis(d, family)?;
        let ok = b.matches_lemma(d, family) && b.dimension as i64 == d + 1;
        let fmt = |(m, k): &(i64, i64)| match (m, k) {
            (0, 0) => "1".to_string(),
            (m, 0) => format!("x^{m}"),
            (0, k) => format!("y^{k}"),
            (m, k) => format!("x^{m}*y^{k}"),
        };
        let mut c = Certificate::new(
            format!("lemma/p{n}/{family}/d{d}"),
            format!("L({d}*sum[{family}_i]) is spanned by the first {} powers of the family's coordinate", d + 1),
            Verdict::from_bool(ok),
        )
        .input("p", n)
        .input("d", d)
        .input("family", family)
        .detail("dimension", b.dimension as u64);
        c = match &b.monomial_basis {
            Some(mb) => c.with_witness(mb.iter().map(fmt).collect::<Vec<_>>().join(", ")),
            None => c.with_witness(b.basis.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")),
        };
        Ok(c)
    }
}

/// `L(d * sum_i [family_i])` over the span of `x^m y^n`, `|m|, |n| <= 2N`.
pub fn lspace_basis<T: Tower>(curve: &Curve<T>, d: i64, family: CuspFamily) -> Result<LinearSpaceBasis<T>> {
    LinearSpaceEngine::new(curve)?.basis(d, family)
}

/// No function has divisor `l * sum_j (g^{bj,-aj}([P] + [Q]) - 2 g^{bj,-aj} e)`:
/// such a function lies in the span of `u^0..u^{2l}` (bounded poles on the
/// family of `e`), and vanishing to order `l` at the `2p` orbit points of `P, Q`
/// is a linear system of full column rank.
pub fn nontriviality_certificate<T: Tower>(curve: &Curve<T>, a: i64, b: i64, l: i64, e: &Point<S<T>>) -> Result<Certificate> {
    let p = curve.n() as i64;
    if p % 2 == 0 || !curve.is_standard() {
        return Err(HgcError::InvalidSpec("needs the standard model with odd N".into()));
    }
    if !(1..p).contains(&a) || !(1..p).contains(&b) || l < 1 || 2 * l > p - 1 {
        return Err(HgcError::InvalidSpec(format!("a={a}, b={b}, l={l} out of range for p={p}")));
    }
    let (family, _) = CuspFamily::of(e).ok_or_else(|| HgcError::InvalidSpec("base point must be a cusp".into()))?;
    let mut pts = Vec::new();
    for j in 0..p {
        for q in [false, true] {
            pts.push(curve.act(&Automorphism::Group(b * j, -a * j), &Point::Fixed { q, r: 0, s: 0 })?);
        }
    }
    let mut xs: Vec<S<T>> = pts.iter().filter_map(|pt| curve.affine_coords(pt)).map(|c| c.0).collect();
    xs.sort();
    xs.dedup();
    let distinct = xs.len() == 2 * p as usize;
    let monos: Vec<(i64, i64)> = (0..=2 * l).map(|m| family.lemma_monomial(m)).collect();
    let conds: Vec<_> = pts.iter().map(|pt| (pt.clone(), l)).collect();
    let rows = condition_rows(curve, &monos, &conds)?;
    let rk = rank(&rows, monos.len());
    let full = rk == monos.len();
    let stmt = format!("{l}*sum_j(g^(bj,-aj)([P]+[Q]) - 2 g^(bj,-aj)[{e}]) is not principal for (a,b)=({a},{b})");
    Ok(Certificate::new(format!("nontrivial/p{p}/a{a}b{b}/l{l}/{e}"), stmt, Verdict::from_bool(full && distinct))
        .input("p", p)
        .input("a", a)
        .input("b", b)
        .input("l", l)
        .input("e", e)
        .detail("system", format!("{}x{}", monos.len(), rows.len()))
        .detail("rank", rk as u64)
        .detail("span", monos.iter().map(|(u, v)| format!("x^{u}*y^{v}")).collect::<Vec<_>>().join(", "))
        .detail("distinct_x_coordinates", distinct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{FiniteSpec, FiniteTower, SymbolicTower};

    #[test]
    fn lemma_small_cases() {
        let c = Curve::new(SymbolicTower::new(3));
        for fam in CuspFamily::ALL {
            let b = lspace_basis(&c, 0, fam).unwrap();
            assert_eq!(b.dimension, 1);
            assert!(b.matches_lemma(0, fam));
        }
        let b = lspace_basis(&c, 2, CuspFamily::C1).unwrap();
        assert!(b.matches_lemma(2, CuspFamily::C1), "{:?}", b.monomial_basis);
    }

    #[test]
    fn witness_for_tor1_divisor() {
        let t = FiniteTower::new(3, &FiniteSpec::from_seed(FiniteSpec::default_prime(3, 5000), 4)).unwrap();
        let c = Curve::new(t);
        let d = Divisor::from_terms([(Point::B(0), 3), (Point::C2(0), -3)]);
        let f = witness_search(&c, &d, None).unwrap().expect("witness exists");
        assert_eq!(c.ord_at(&f, &Point::B(0)).unwrap(), 3);
        let d1 = Divisor::from_terms([(Point::B(0), 1), (Point::C2(0), -1)]);
        assert!(witness_search(&c, &d1, None).unwrap().is_none());
        let f0 = witness_search(&c, &Divisor::zero(), None).unwrap().unwrap();
        assert!(f0.as_constant().is_some());
    }

    #[test]
    fn nontrivial_p3() {
        let c = Curve::new(SymbolicTower::new(3));
        let cert = nontriviality_certificate(&c, 1, 1, 1, &Point::C1(0)).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.details["system"], "3x6");
        assert_eq!(cert.details["rank"], 3);
    }
}
