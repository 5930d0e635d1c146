//! Function fields of Kummer type `K0(x)[y] / (y^n - R(x))`.
//!
//! The hypergeometric curve `(1 - x^M)(1 - y^N) = lambda x^M y^N` is the case
//! `R = (1 - x^M) / (1 - rho^N x^M)`; the superelliptic quotients `C^{a,b}` use a
//! polynomial `R`.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use crate::arith::{Poly, Scalar, Tower};
use crate::error::{HgcError, Result};
use crate::divisors::{BasicFactor, Divisor};
use crate::local_series::{Chart, Point};

type S<T> = <T as Tower>::S;

/// The field `K0(x)[y]/(y^n - r_num/r_den)`.
pub struct KummerField<T: Tower> {
    tower: T,
    n: usize,
    r_num: Poly<S<T>>,
    r_den: Poly<S<T>>,
    label: String,
}

impl<T: Tower> fmt::Debug for KummerField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KummerField({})", self.label)
    }
}

impl<T: Tower> KummerField<T> {
    pub fn new(tower: T, n: usize, r_num: Poly<S<T>>, r_den: Poly<S<T>>, label: impl Into<String>) -> Arc<Self> {
        assert!(n >= 2 && tower.n() % n == 0, "y-degree must divide N");
        assert!(!r_num.is_zero() && !r_den.is_zero());
        Arc::new(KummerField { tower, n, r_num, r_den, label: label.into() })
    }

    pub fn tower(&self) -> &T {
        &self.tower
    }
    pub fn degree(&self) -> usize {
        self.n
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn radicand(&self) -> (&Poly<S<T>>, &Poly<S<T>>) {
        (&self.r_num, &self.r_den)
    }
}

/// `(sum_j p_j(x) y^j) / d(x)` with `d` monic and `gcd(d, p_0, ..., p_{n-1}) = 1`.
#[derive(Clone)]
pub struct CurveFunction<T: Tower> {
    field: Arc<KummerField<T>>,
    comps: Vec<Poly<S<T>>>,
    den: Poly<S<T>>,
}

pub trait FieldHandle<T: Tower> {
    fn handle(&self) -> &Arc<KummerField<T>>;

    fn zero(&self) -> CurveFunction<T> {
        self.constant(self.handle().tower.zero())
    }
    fn one(&self) -> CurveFunction<T> {
        self.constant(self.handle().tower.one())
    }
    fn int(&self, v: i64) -> CurveFunction<T> {
        self.constant(self.handle().tower.int(v))
    }
    fn constant(&self, c: S<T>) -> CurveFunction<T> {
        self.x_poly(Poly::constant(c))
    }
    fn x_poly(&self, p: Poly<S<T>>) -> CurveFunction<T> {
        CurveFunction::from_parts(self.handle(), vec![p], self.handle().tower.one())
    }
    fn x(&self) -> CurveFunction<T> {
        self.x_poly(Poly::monomial(self.handle().tower.one(), 1))
    }
    fn y(&self) -> CurveFunction<T> {
        let f = self.handle();
        let mut comps = vec![Poly::zero(); 2];
        comps[1] = Poly::constant(f.tower.one());
        CurveFunction::from_parts(f, comps, f.tower.one())
    }
    /// `x^m y^k`, negative exponents allowed.
    fn monomial(&self, m: i64, k: i64) -> Result<CurveFunction<T>> {
        Ok(self.x().pow(m)?.mul(&self.y().pow(k)?))
    }
}

impl<T: Tower> FieldHandle<T> for Arc<KummerField<T>> {
    fn handle(&self) -> &Arc<KummerField<T>> {
        self
    }
}

impl<T: Tower> CurveFunction<T> {
    fn from_parts(field: &Arc<KummerField<T>>, mut comps: Vec<Poly<S<T>>>, den_const: S<T>) -> Self {
        comps.resize(field.n, Poly::zero());
        let den = Poly::constant(den_const);
        Self::from_raw(field, comps, den)
    }

    /// Builds `(sum comps[j] y^j) / den`; `comps` may have length up to `n`.
    pub fn from_raw(field: &Arc<KummerField<T>>, mut comps: Vec<Poly<S<T>>>, den: Poly<S<T>>) -> Self {
        assert!(comps.len() <= field.n);
        comps.resize(field.n, Poly::zero());
        let mut f = CurveFunction { field: field.clone(), comps, den };
        f.normalize();
        f
    }

    fn normalize(&mut self) {
        assert!(!self.den.is_zero(), "zero denominator");
        if self.comps.iter().all(|c| c.is_zero()) {
            self.den = Poly::constant(self.field.tower.one());
            return;
        }
        let field = self.field.clone();
        let tower = &field.tower;
        let certified = |f: &Self| f.comps.iter().any(|c| !c.is_zero() && tower.certify_coprime(&f.den, c));
        if !self.den.is_constant() && !certified(self) {
            self.strip_known_factors();
        }
        if !self.den.is_constant() && !certified(self) {
            let mut g = self.den.clone();
            for c in &self.comps {
                if g.is_constant() {
                    break;
                }
                if !c.is_zero() {
                    g = g.gcd(c).expect("field gcd");
                }
            }
            if !g.is_constant() {
                self.den = self.den.div_exact(&g).expect("gcd divides");
                for c in self.comps.iter_mut() {
                    *c = c.div_exact(&g).expect("gcd divides");
                }
            }
        }
        let l = self.den.lead().unwrap().clone();
        if !l.is_one() {
            let li = l.inv().expect("nonzero");
            self.den = self.den.scale(&li);
            for c in self.comps.iter_mut() {
                *c = c.scale(&li);
            }
        }
    }

    /// Cancels powers of `x`, `r_num` and `r_den` shared by numerator and denominator,
    /// the factors that reductions and inversions introduce. Cheaper than a gcd over
    /// the coefficient field, where Euclid's algorithm swells.
    fn strip_known_factors(&mut self) {
        let low = |p: &Poly<S<T>>| p.low_degree().unwrap_or(usize::MAX);
        let k = self.comps.iter().map(low).min().unwrap_or(0).min(low(&self.den));
        if k > 0 {
            self.den = self.den.unshift(k);
            for c in self.comps.iter_mut() {
                *c = c.unshift(k);
            }
        }
        let factors = [self.field.r_num.clone(), self.field.r_den.clone()];
        for h in factors.iter().filter(|h| !h.is_constant()) {
            while !self.den.is_constant() {
                let Ok((qd, rd)) = self.den.divrem(h) else { break };
                if !rd.is_zero() {
                    break;
                }
                let mut qs = Vec::with_capacity(self.comps.len());
                for c in &self.comps {
                    match c.divrem(h) {
                        Ok((q, r)) if r.is_zero() => qs.push(q),
                        _ => break,
                    }
                }
                if qs.len() < self.comps.len() {
                    break;
                }
                self.den = qd;
                self.comps = qs;
            }
        }
    }

    pub fn field(&self) -> &Arc<KummerField<T>> {
        &self.field
    }
    pub fn tower(&self) -> &T {
        &self.field.tower
    }
    /// Numerator polynomials `p_j`, indexed by the power of `y`.
    pub fn components(&self) -> &[Poly<S<T>>] {
        &self.comps
    }
    pub fn denominator(&self) -> &Poly<S<T>> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// True when the function lies in `K0(x)`.
    pub fn is_x_only(&self) -> bool {
        self.comps.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn as_constant(&self) -> Option<S<T>> {
        if self.is_zero() {
            return Some(self.field.tower.zero());
        }
        if self.is_x_only() && self.comps[0].is_constant() && self.den.is_constant() {
            return Some(self.comps[0].coeffs()[0].clone());
        }
        None
    }

    fn check(&self, o: &Self) {
        debug_assert!(Arc::ptr_eq(&self.field, &o.field) || self.field.label == o.field.label);
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        if self.den == o.den {
            let comps = self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect();
            return Self::from_raw(&self.field, comps, self.den.clone());
        }
        let comps = self.comps.iter().zip(&o.comps).map(|(a, b)| a.mul(&o.den).add(&b.mul(&self.den))).collect();
        Self::from_raw(&self.field, comps, self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        CurveFunction { field: self.field.clone(), comps: self.comps.iter().map(|c| c.neg()).collect(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &S<T>) -> Self {
        if s.is_zero() {
            return self.field.zero();
        }
        CurveFunction { field: self.field.clone(), comps: self.comps.iter().map(|c| c.scale(s)).collect(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        if self.is_zero() || o.is_zero() {
            return self.field.zero();
        }
        let (comps, den) = Self::mul_parts(&self.field, (&self.comps, &self.den), (&o.comps, &o.den));
        Self::from_raw(&self.field, comps, den)
    }

    /// Product without gcd normalization.
    fn mul_parts(
        f: &KummerField<T>,
        (ac, ad): (&[Poly<S<T>>], &Poly<S<T>>),
        (bc, bd): (&[Poly<S<T>>], &Poly<S<T>>),
    ) -> (Vec<Poly<S<T>>>, Poly<S<T>>) {
        let n = f.n;
        let mut lo = vec![Poly::zero(); n];
        let mut hi = vec![Poly::zero(); n];
        for (i, a) in ac.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in bc.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a.mul(b);
                if i + j < n {
                    lo[i + j] = lo[i + j].add(&p);
                } else {
                    hi[i + j - n] = hi[i + j - n].add(&p);
                }
            }
        }
        let den = ad.mul(bd);
        if hi.iter().all(|h| h.is_zero()) {
            return (lo, den);
        }
        let comps = lo.iter().zip(&hi).map(|(l, h)| l.mul(&f.r_den).add(&h.mul(&f.r_num))).collect();
        (comps, den.mul(&f.r_den))
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// `y -> zeta_n^s y`, the Kummer automorphisms over `K0(x)`.
    pub fn kummer_conjugate(&self, s: i64) -> Self {
        let t = &self.field.tower;
        let z = t.zeta_m_pow(self.field.n, s);
        let mut w = t.one();
        let mut comps = Vec::with_capacity(self.comps.len());
        for c in &self.comps {
            comps.push(c.scale(&w));
            w = w.mul(&z);
        }
        CurveFunction { field: self.field.clone(), comps, den: self.den.clone() }
    }

    /// Inverse through the norm to `K0(x)`: `f^-1 = prod_{s != 0} sigma_s(f) / N(f)`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(HgcError::DivisionByZero);
        }
        let f = &self.field;
        if self.is_x_only() {
            let p = &self.comps[0];
            let lead = p.lead().unwrap().inv()?;
            return Ok(Self::from_raw(f, vec![self.den.scale(&lead)], p.scale(&lead)));
        }
        let nz: Vec<usize> = (0..f.n).filter(|&j| !self.comps[j].is_zero()).collect();
        if let [j] = nz[..] {
            // (c y^j / d)^-1 = d r_den y^(n-j) / (c r_num)
            let mut comps = vec![Poly::zero(); f.n];
            comps[(f.n - j) % f.n] = if j == 0 { self.den.clone() } else { self.den.mul(&f.r_den) };
            let den = if j == 0 { self.comps[0].clone() } else { self.comps[j].mul(&f.r_num) };
            return Ok(Self::from_raw(f, comps, den));
        }
        let one = Poly::constant(f.tower.one());
        let mut conj: (Vec<Poly<S<T>>>, Poly<S<T>>) = (vec![one.clone()], one.clone());
        for s in 1..f.n as i64 {
            let c = self.kummer_conjugate(s);
            conj = Self::mul_parts(f, (&conj.0, &conj.1), (&c.comps, &one));
        }
        let (norm, norm_den) = Self::mul_parts(f, (&conj.0, &conj.1), (&self.comps, &one));
        if norm.iter().skip(1).any(|c| !c.is_zero()) || norm[0].is_zero() {
            return Err(HgcError::InvariantViolation(format!("norm of {self} is not in K0(x)")));
        }
        // f^-1 = d conj / (g conj) with g the numerator of f
        let scale = self.den.mul(&norm_den);
        let comps = conj.0.iter().map(|c| c.mul(&scale)).collect();
        Ok(Self::from_raw(f, comps, norm[0].mul(&conj.1)))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.field.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.square();
            }
        }
        Ok(acc)
    }

    /// `d/dx`, using `d(y^j)/dx = j R'/(n R) y^j`.
    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let n = f.n as i64;
        let t = &f.tower;
        let a = f.r_num.derivative().mul(&f.r_den).sub(&f.r_num.mul(&f.r_den.derivative()));
        let b = f.r_num.mul(&f.r_den);
        let dd = self.den.derivative();
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let q = p.derivative().mul(&self.den).sub(&p.mul(&dd)).mul(&b).scale(&t.int(n));
                q.add(&p.mul(&self.den).mul(&a).scale(&t.int(j as i64)))
            })
            .collect();
        Self::from_raw(f, comps, self.den.square_poly().mul(&b).scale(&t.int(n)))
    }

    /// `f(xs, ys)` for functions `xs, ys` on a (possibly different) Kummer field.
    pub fn compose(&self, xs: &CurveFunction<T>, ys: &CurveFunction<T>) -> Result<CurveFunction<T>> {
        let target = xs.field.clone();
        let eval = |p: &Poly<S<T>>| -> CurveFunction<T> {
            let mut acc = target.zero();
            for c in p.coeffs().iter().rev() {
                acc = acc.mul(xs).add(&target.constant(c.clone()));
            }
            acc
        };
        let mut acc = target.zero();
        for c in self.comps.iter().rev() {
            acc = acc.mul(ys).add(&eval(c));
        }
        acc.div(&eval(&self.den))
    }

    /// Pullback by `(x, y) -> (1/(rho x), 1/(rho y))`, valid when `y^n = R` satisfies
    /// `R(1/(rho x)) = rho^-n / R(x)`.
    pub(crate) fn invert_vars(&self, rho: &S<T>) -> Self {
        let f = &self.field;
        let rinv = rho.inv().expect("rho is a unit");
        let deg = self.comps.iter().chain(std::iter::once(&self.den)).filter_map(|c| c.degree()).max().unwrap_or(0);
        let rev = |p: &Poly<S<T>>| {
            let mut c = vec![f.tower.zero(); deg + 1];
            let mut w = f.tower.one();
            for (i, a) in p.coeffs().iter().enumerate() {
                c[deg - i] = a.mul(&w);
                w = w.mul(&rinv);
            }
            Poly::from_coeffs(c)
        };
        let n = f.n;
        let mut comps = vec![Poly::zero(); n];
        comps[0] = rev(&self.comps[0]).mul(&f.r_num);
        let mut w = f.tower.one();
        for j in 1..n {
            w = w.mul(&rinv);
            comps[n - j] = rev(&self.comps[j]).scale(&w).mul(&f.r_den);
        }
        Self::from_raw(f, comps, rev(&self.den).mul(&f.r_num))
    }

    /// Pullback by `(x, y) -> (y, x)` on a field with `r_num, r_den` polynomials in `x^n`.
    pub(crate) fn swap_vars(&self) -> Result<Self> {
        let f = &self.field;
        let n = f.n;
        // sum_{j,i} p_{j,i} y^i x^j as a function, with y^i = y^(i mod n) R^(i div n)
        let lift = |polys: &[Poly<S<T>>]| -> Self {
            let q_max = polys.iter().filter_map(|c| c.degree()).max().unwrap_or(0) / n;
            let mut comps = vec![Poly::zero(); n];
            for (j, c) in polys.iter().enumerate() {
                for (i, a) in c.coeffs().iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let q = (i / n) as u32;
                    let t = Poly::monomial(a.clone(), j).mul(&f.r_num.pow(q)).mul(&f.r_den.pow(q_max as u32 - q));
                    comps[i % n] = comps[i % n].add(&t);
                }
            }
            Self::from_raw(f, comps, f.r_den.pow(q_max as u32))
        };
        let num = lift(&self.comps);
        let den = lift(std::slice::from_ref(&self.den));
        num.div(&den)
    }

    /// `x -> s x`, `y -> u y`.
    pub fn scale_vars(&self, s: &S<T>, u: &S<T>) -> Self {
        let t = &self.field.tower;
        let mut w = t.one();
        let mut comps = Vec::with_capacity(self.comps.len());
        for c in &self.comps {
            comps.push(c.scale_var(s).scale(&w));
            w = w.mul(u);
        }
        Self::from_raw(&self.field, comps, self.den.scale_var(s))
    }

    /// Coordinate vector over `K0` with respect to the monomials `x^i y^j / den`,
    /// for rank computations on spans of functions sharing a denominator.
    pub fn coefficient_map(&self) -> Vec<((usize, usize), S<T>)> {
        let mut out = Vec::new();
        for (j, c) in self.comps.iter().enumerate() {
            for (i, a) in c.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    out.push(((i, j), a.clone()));
                }
            }
        }
        out
    }
}

trait SquarePoly {
    fn square_poly(&self) -> Self;
}
impl<Sc: Scalar> SquarePoly for Poly<Sc> {
    fn square_poly(&self) -> Self {
        self.mul(self)
    }
}

impl<T: Tower> PartialEq for CurveFunction<T> {
    fn eq(&self, o: &Self) -> bool {
        self.comps == o.comps && self.den == o.den
    }
}
impl<T: Tower> Eq for CurveFunction<T> {}
impl<T: Tower> Hash for CurveFunction<T> {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.comps.hash(h);
        self.den.hash(h);
    }
}

impl<T: Tower> fmt::Debug for CurveFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<T: Tower> fmt::Display for CurveFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        write!(f, "(")?;
        for (j, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[")?;
            crate::arith::fmt_poly(f, c.coeffs(), "x")?;
            write!(f, "]")?;
            match j {
                0 => {}
                1 => write!(f, "*y")?,
                _ => write!(f, "*y^{j}")?,
            }
        }
        write!(f, ")")?;
        if !self.den.is_one() {
            write!(f, "/(")?;
            crate::arith::fmt_poly(f, self.den.coeffs(), "x")?;
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Automorphisms of `X_{N,lambda}`, acting on functions by pullback `f -> f o sigma`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Automorphism {
    /// `(x, y) -> (zeta^r x, zeta^s y)`.
    Group(i64, i64),
    /// `(x, y) -> (1/(rho x), 1/(rho y))`.
    Alpha,
    /// `(x, y) -> (y, x)`.
    Swap,
    /// The composite `w[0] o w[1] o ...` as maps of points.
    Word(Vec<Automorphism>),
}

impl Automorphism {
    pub fn inverse(&self) -> Automorphism {
        match self {
            Automorphism::Group(r, s) => Automorphism::Group(-r, -s),
            Automorphism::Alpha | Automorphism::Swap => self.clone(),
            Automorphism::Word(w) => Automorphism::Word(w.iter().rev().map(|a| a.inverse()).collect()),
        }
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Automorphism::Group(r, s) => write!(f, "g^({r},{s})"),
            Automorphism::Alpha => write!(f, "alpha"),
            Automorphism::Swap => write!(f, "swap"),
            Automorphism::Word(w) => {
                let parts: Vec<String> = w.iter().map(|a| a.to_string()).collect();
                write!(f, "{}", parts.join(" o "))
            }
        }
    }
}

/// The curve `(1 - x^M)(1 - y^N) = lambda x^M y^N` over a tower, `M | N`.
/// `M = N` is the hypergeometric curve `X_{N,lambda}`.
pub struct Curve<T: Tower> {
    tower: T,
    m: usize,
    ff: Arc<KummerField<T>>,
    ceiling: usize,
    pub(crate) charts: Mutex<HashMap<(Point<S<T>>, usize), Arc<Chart<S<T>>>>>,
    pub(crate) basic_divs: Mutex<HashMap<BasicFactor<S<T>>, Divisor<S<T>>>>,
}

impl<T: Tower> fmt::Debug for Curve<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Curve(M={}, N={}, {})", self.m, self.n(), self.tower.backend_name())
    }
}

impl<T: Tower> Curve<T> {
    pub fn new(tower: T) -> Self {
        let n = tower.n();
        Self::mixed(tower, n)
    }

    pub fn mixed(tower: T, m: usize) -> Self {
        let n = tower.n();
        assert!(m >= 1 && n % m == 0, "M must divide N");
        let one = tower.one();
        let rn = tower.rho().pow(n as i64).expect("rho nonzero");
        let r_num = Poly::constant(one.clone()).sub(&Poly::monomial(one.clone(), m));
        let r_den = Poly::constant(one).sub(&Poly::monomial(rn, m));
        let ff = KummerField::new(tower.clone(), n, r_num, r_den, format!("X(M={m},N={n})"));
        Curve { tower, m, ff, ceiling: 8 * n, charts: Mutex::new(HashMap::new()), basic_divs: Mutex::new(HashMap::new()) }
    }

    pub fn with_ceiling(mut self, ceiling: usize) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn tower(&self) -> &T {
        &self.tower
    }
    pub fn n(&self) -> usize {
        self.tower.n()
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn is_standard(&self) -> bool {
        self.m == self.n()
    }
    pub fn ceiling(&self) -> usize {
        self.ceiling
    }
    pub fn field(&self) -> &Arc<KummerField<T>> {
        &self.ff
    }

    /// `F(x, y) = (1 - x^M)(1 - y^N) - lambda x^M y^N` evaluated on functions.
    pub fn equation(&self, xs: &CurveFunction<T>, ys: &CurveFunction<T>) -> Result<CurveFunction<T>> {
        let one = xs.field().one();
        let xm = xs.pow(self.m as i64)?;
        let yn = ys.pow(self.n() as i64)?;
        let lam = self.tower.lambda();
        Ok(one.sub(&xm).mul(&one.sub(&yn)).sub(&xm.mul(&yn).scale(&lam)))
    }

    /// `F(x0, y0)` for scalars.
    pub fn equation_at(&self, x0: &S<T>, y0: &S<T>) -> S<T> {
        let one = self.tower.one();
        let xm = x0.pow(self.m as i64).unwrap();
        let yn = y0.pow(self.n() as i64).unwrap();
        one.sub(&xm).mul(&one.sub(&yn)).sub(&self.tower.lambda().mul(&xm).mul(&yn))
    }

    /// `(dF/dx, dF/dy)` at a point.
    pub fn gradient_at(&self, x0: &S<T>, y0: &S<T>) -> (S<T>, S<T>) {
        let t = &self.tower;
        let (m, n) = (self.m as i64, self.n() as i64);
        let rn = t.rho().pow(n).unwrap();
        let fx = t.int(-m).mul(&x0.pow(m - 1).unwrap()).mul(&t.one().sub(&rn.mul(&y0.pow(n).unwrap())));
        let fy = t.int(-n).mul(&y0.pow(n - 1).unwrap()).mul(&t.one().sub(&rn.mul(&x0.pow(m).unwrap())));
        (fx, fy)
    }

    /// `f o sigma`.
    pub fn apply(&self, sigma: &Automorphism, f: &CurveFunction<T>) -> Result<CurveFunction<T>> {
        let t = &self.tower;
        match sigma {
            Automorphism::Group(r, s) => Ok(f.scale_vars(&t.zeta_m_pow(self.m, *r), &t.zeta_pow(*s))),
            Automorphism::Alpha => {
                self.require_standard("alpha")?;
                Ok(f.invert_vars(&t.rho()))
            }
            Automorphism::Swap => {
                self.require_standard("swap")?;
                f.swap_vars()
            }
            Automorphism::Word(w) => {
                let mut g = f.clone();
                for a in w {
                    g = self.apply(a, &g)?;
                }
                Ok(g)
            }
        }
    }

    fn require_standard(&self, what: &str) -> Result<()> {
        if self.is_standard() {
            Ok(())
        } else {
            Err(HgcError::Unsupported(format!("{what} on the mixed-degree model")))
        }
    }

    /// `sum_{g in subgroup} g . f`.
    pub fn galois_trace(&self, f: &CurveFunction<T>, subgroup: &[(i64, i64)]) -> Result<CurveFunction<T>> {
        let mut acc = self.ff.zero();
        for &(r, s) in subgroup {
            acc = acc.add(&self.apply(&Automorphism::Group(r, s), f)?);
        }
        Ok(acc)
    }

    /// All of `G_N = (Z/N)^2` (or `Z/M x Z/N` on the mixed model).
    pub fn full_group(&self) -> Vec<(i64, i64)> {
        let (m, n) = (self.m as i64, self.n() as i64);
        (0..m).flat_map(|r| (0..n).map(move |s| (r, s))).collect()
    }
}

impl<T: Tower> FieldHandle<T> for Curve<T> {
    fn handle(&self) -> &Arc<KummerField<T>> {
        &self.ff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{FiniteSpec, FiniteTower, SymbolicTower};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_function<T: Tower>(c: &Curve<T>, rng: &mut ChaCha8Rng) -> CurveFunction<T> {
        let t = c.tower();
        let mut f = c.zero();
        for _ in 0..3 {
            let m = rng.gen_range(-1i64..=2);
            let k = rng.gen_range(-1i64..=2);
            f = f.add(&c.monomial(m, k).unwrap().scale(&t.random(rng)));
        }
        f
    }

    #[test]
    fn curve_relation_reduces_to_zero() {
        for n in [2usize, 3, 5] {
            let c = Curve::new(SymbolicTower::new(n));
            assert!(c.equation(&c.x(), &c.y()).unwrap().is_zero());
            // y^N (1 - x^N + lambda x^N) = 1 - x^N
            let t = c.tower();
            let xn = c.x().pow(n as i64).unwrap();
            let lhs = c.y().pow(n as i64).unwrap().mul(&c.one().sub(&xn).add(&xn.scale(&t.lambda())));
            assert_eq!(lhs, c.one().sub(&xn));
        }
    }

    #[test]
    fn inverses() {
        let c = Curve::new(SymbolicTower::new(3));
        let xy = c.x().mul(&c.y());
        assert!(xy.mul(&xy.inv().unwrap()).sub(&c.one()).is_zero());
        let f = c.x().sub(&c.constant(c.tower().zeta_pow(1)));
        assert!(f.mul(&f.inv().unwrap()).sub(&c.one()).is_zero());
        let y = c.y();
        assert_eq!(y.inv().unwrap().mul(&y), c.one());
        assert_eq!(c.zero().inv().unwrap_err(), HgcError::DivisionByZero);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = c.tower();
        for _ in 0..10 {
            let mut f = c.zero();
            for _ in 0..2 {
                let sc = t.xi().pow(rng.gen_range(-2..=2)).unwrap().mul(&t.zeta_pow(rng.gen_range(0..3))).mul(&t.int(rng.gen_range(1..4)));
                f = f.add(&c.monomial(rng.gen_range(-1..=2), rng.gen_range(-1..=2)).unwrap().scale(&sc));
            }
            if !f.is_zero() {
                assert_eq!(f.mul(&f.inv().unwrap()), c.one());
            }
        }
    }

    #[test]
    fn inverses_finite_field() {
        let t = FiniteTower::new(5, &FiniteSpec::from_seed(FiniteSpec::default_prime(5, 10_000), 3)).unwrap();
        let c = Curve::new(t);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let f = random_function(&c, &mut rng);
            if !f.is_zero() {
                assert_eq!(f.mul(&f.inv().unwrap()), c.one());
            }
        }
    }

    #[test]
    fn automorphism_actions() {
        let c = Curve::new(SymbolicTower::new(3));
        let t = c.tower();
        let gx = c.apply(&Automorphism::Group(1, 0), &c.x()).unwrap();
        assert_eq!(gx, c.x().scale(&t.zeta_pow(1)));
        let f = c.x().mul(&c.y().square());
        assert_eq!(c.apply(&Automorphism::Swap, &f).unwrap(), c.y().mul(&c.x().square()));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let f = random_function(&c, &mut rng);
            let aa = c.apply(&Automorphism::Alpha, &c.apply(&Automorphism::Alpha, &f).unwrap()).unwrap();
            assert_eq!(aa, f);
        }
        // pullback is contravariant: (s o t)^* = t^* s^*
        let s = Automorphism::Alpha;
        let g = Automorphism::Group(1, 2);
        let f = c.x().add(&c.y().square());
        let lhs = c.apply(&Automorphism::Word(vec![s.clone(), g.clone()]), &f).unwrap();
        let rhs = c.apply(&g, &c.apply(&s, &f).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn trace_of_monomials() {
        let c = Curve::new(SymbolicTower::new(5));
        let g = c.full_group();
        for m in 0..5 {
            for k in 0..5 {
                let tr = c.galois_trace(&c.monomial(m, k).unwrap(), &g).unwrap();
                if m == 0 && k == 0 {
                    assert_eq!(tr, c.int(25));
                } else {
                    assert!(tr.is_zero(), "({m},{k})");
                }
            }
        }
    }

    #[test]
    fn derivative_of_curve_relation() {
        let c = Curve::new(SymbolicTower::new(3));
        // d/dx F(x, y(x)) = 0
        let f = c.equation(&c.x(), &c.y()).unwrap();
        assert!(f.derivative().is_zero());
        let lhs = c.y().pow(3).unwrap().derivative();
        let rhs = c.y().square().mul(&c.y().derivative()).scale(&c.tower().int(3));
        assert_eq!(lhs, rhs);
    }
}
