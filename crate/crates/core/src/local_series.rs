//! Points, local parameters and truncated Laurent expansions.

use std::fmt;
use std::sync::Arc;

use crate::arith::{Poly, Scalar, Tower};
use crate::error::{HgcError, Result};
use crate::function_field::{Curve, CurveFunction};

type S<T> = <T as Tower>::S;

/// Precision used for exactly known series.
pub const EXACT: i64 = i64::MAX / 4;

/// `sum_k coeffs[k] t^(val+k) + O(t^prec)`. An empty `coeffs` means the series
/// is `O(t^prec)` and its leading term is not resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries<Sc> {
    val: i64,
    coeffs: Vec<Sc>,
    prec: i64,
    one: Sc,
}

impl<Sc: Scalar> LaurentSeries<Sc> {
    pub fn new(val: i64, coeffs: Vec<Sc>, prec: i64, one: &Sc) -> Self {
        let mut s = LaurentSeries { val, coeffs, prec, one: one.clone() };
        s.normalize();
        s
    }

    /// The polynomial `p(t)` known modulo `t^prec`.
    pub fn from_poly(p: &Poly<Sc>, prec: i64, one: &Sc) -> Self {
        Self::new(0, p.coeffs().to_vec(), prec, one)
    }

    pub fn monomial(c: Sc, k: i64, rel_prec: i64) -> Self {
        let one = c.one_like();
        Self::new(k, vec![c], k + rel_prec, &one)
    }

    fn normalize(&mut self) {
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.val += lead_zeros as i64;
        }
        let keep = (self.prec - self.val).max(0) as usize;
        self.coeffs.truncate(keep);
        if self.coeffs.is_empty() {
            self.val = self.prec;
        }
    }

    pub fn is_resolved(&self) -> bool {
        !self.coeffs.is_empty()
    }
    /// Valuation if the leading term is resolved.
    pub fn valuation(&self) -> Option<i64> {
        self.is_resolved().then_some(self.val)
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn leading(&self) -> Option<&Sc> {
        self.coeffs.first()
    }
    /// Coefficient of `t^k`; `None` if `k >= prec`.
    pub fn coeff(&self, k: i64) -> Option<Sc> {
        if k >= self.prec {
            return None;
        }
        if k < self.val {
            return Some(self.one.zero_like());
        }
        Some(self.coeffs.get((k - self.val) as usize).cloned().unwrap_or_else(|| self.one.zero_like()))
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        let lo = self.val.min(o.val);
        let end = |s: &Self| if s.coeffs.is_empty() { lo } else { s.val + s.coeffs.len() as i64 };
        let extent = end(self).max(end(o));
        let len = (prec.min(extent) - lo).max(0) as usize;
        let mut c = vec![self.one.zero_like(); len];
        for (s, sh) in [(self, self.val - lo), (o, o.val - lo)] {
            for (k, a) in s.coeffs.iter().enumerate() {
                let idx = sh as usize + k;
                if idx < len {
                    c[idx] = c[idx].add(a);
                }
            }
        }
        Self::new(lo, c, prec, &self.one)
    }

    pub fn neg(&self) -> Self {
        LaurentSeries { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Sc) -> Self {
        Self::new(self.val, self.coeffs.iter().map(|c| c.mul(s)).collect(), self.prec, &self.one)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = (self.val + o.prec).min(o.val + self.prec);
        let val = self.val + o.val;
        let extent = (self.coeffs.len() + o.coeffs.len()) as i64;
        let len = (prec - val).clamp(0, extent) as usize;
        let mut c = vec![self.one.zero_like(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::new(val, c, prec, &self.one)
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_resolved() {
            return Err(HgcError::DivisionByZero);
        }
        if self.prec - self.val > EXACT / 2 {
            if self.coeffs.len() == 1 {
                return Ok(Self::new(-self.val, vec![self.coeffs[0].inv()?], EXACT, &self.one));
            }
            return Err(HgcError::Unsupported("inverse of an exact series".into()));
        }
        let rel = (self.prec - self.val) as usize;
        let a0i = self.coeffs[0].inv()?;
        let mut b = vec![a0i.clone()];
        for k in 1..rel {
            let mut acc = self.one.zero_like();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                acc = acc.add(&self.coeffs[j].mul(&b[k - j]));
            }
            b.push(acc.mul(&a0i).neg());
        }
        Ok(Self::new(-self.val, b, -self.val + rel as i64, &self.one))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::new(0, vec![self.one.clone()], EXACT, &self.one);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let c = self.coeffs.iter().enumerate().map(|(k, a)| a.mul(&self.one.from_int_like(self.val + k as i64))).collect();
        Self::new(self.val - 1, c, self.prec - 1, &self.one)
    }

    /// Truncates to absolute precision `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        Self::new(self.val, self.coeffs.clone(), prec.min(self.prec), &self.one)
    }
}

impl<Sc: Scalar> fmt::Display for LaurentSeries<Sc> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, "({c})*t^{} + ", self.val + k as i64)?;
            }
        }
        write!(f, "O(t^{})", self.prec)
    }
}

/// Kinds of reduced fibers whose points are not individually representable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FiberKind {
    /// `x = c`
    X,
    /// `y = c`
    Y,
    /// `x y = c`; `root` is the value of `x^N`
    XY,
    /// `x = c y`; `root` is the value of `y^N`
    XCY,
}

/// A fiber of a basic function, optionally restricted to one value of `x^N` or `y^N`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiberKey<Sc> {
    pub kind: FiberKind,
    pub c: Sc,
    pub root: Option<Sc>,
}

/// Points of the curve. Cusp indices are reduced mod N (mod M for the `b` and
/// `c2` families of the mixed model).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point<Sc> {
    A(i64),
    B(i64),
    C1(i64),
    C2(i64),
    /// `g^{r,s} P` (`q = false`) or `g^{r,s} Q` (`q = true`), `P = (xi, -xi)`, `Q = (-xi, xi)`.
    Fixed { q: bool, r: i64, s: i64 },
    Affine { x: Sc, y: Sc },
    /// Every point of a reduced fiber, each with the same multiplicity.
    Fiber(FiberKey<Sc>),
}

impl<Sc: Scalar> Point<Sc> {
    pub const P: Point<Sc> = Point::Fixed { q: false, r: 0, s: 0 };
    pub const Q: Point<Sc> = Point::Fixed { q: true, r: 0, s: 0 };

    pub fn is_cusp(&self) -> bool {
        matches!(self, Point::A(_) | Point::B(_) | Point::C1(_) | Point::C2(_))
    }
}

impl<Sc: Scalar> fmt::Display for Point<Sc> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::A(i) => write!(f, "a_{i}"),
            Point::B(i) => write!(f, "b_{i}"),
            Point::C1(i) => write!(f, "c1_{i}"),
            Point::C2(i) => write!(f, "c2_{i}"),
            Point::Fixed { q, r, s } => {
                let base = if *q { "Q" } else { "P" };
                if *r == 0 && *s == 0 {
                    write!(f, "{base}")
                } else {
                    write!(f, "g^({r},{s}){base}")
                }
            }
            Point::Affine { x, y } => write!(f, "({x}, {y})"),
            Point::Fiber(k) => {
                let what = match k.kind {
                    FiberKind::X => format!("x = {}", k.c),
                    FiberKind::Y => format!("y = {}", k.c),
                    FiberKind::XY => format!("x*y = {}", k.c),
                    FiberKind::XCY => format!("x = ({})*y", k.c),
                };
                match (&k.root, k.kind) {
                    (Some(r), FiberKind::XY) => write!(f, "fiber{{{what}, x^N = {r}}}"),
                    (Some(r), _) => write!(f, "fiber{{{what}, y^N = {r}}}"),
                    (None, _) => write!(f, "fiber{{{what}}}"),
                }
            }
        }
    }
}

/// How the local parameter `t` is chosen at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parameter {
    /// `t = x - x0` (`x0 = 0` at the `a` cusps)
    X,
    /// `t = y - y0` (`y0 = 0` at the `b` cusps)
    Y,
    /// `t = 1/x`
    InvX,
    /// `t = 1/y`
    InvY,
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Parameter::X => "t = x - x0",
            Parameter::Y => "t = y - y0",
            Parameter::InvX => "t = 1/x",
            Parameter::InvY => "t = 1/y",
        };
        write!(f, "{s}")
    }
}

/// Expansions of the coordinates at a point, with the dependent coordinate
/// known modulo `t^work`.
#[derive(Clone, Debug)]
pub struct Chart<Sc> {
    pub param: Parameter,
    pub work: usize,
    pub xs: LaurentSeries<Sc>,
    pub ys: LaurentSeries<Sc>,
    pub dx_dt: LaurentSeries<Sc>,
    /// Valuation of `G(t, w_k)` after each Newton step.
    pub residuals: Vec<i64>,
}

/// Power series root of `A(t) + B(t) w^k = 0` with `w(0) = w0`, modulo `t^work`.
fn newton_lift<Sc: Scalar>(a: &Poly<Sc>, b: &Poly<Sc>, k: usize, w0: &Sc, work: usize) -> Result<(LaurentSeries<Sc>, Vec<i64>)> {
    let one = w0.one_like();
    let kk = one.from_int_like(k as i64);
    let check = a.eval(&one.zero_like()).add(&b.eval(&one.zero_like()).mul(&w0.pow(k as i64)?));
    if !check.is_zero() {
        return Err(HgcError::InvariantViolation(format!("initial value {w0} is not a root")));
    }
    let gw0 = kk.mul(&b.eval(&one.zero_like())).mul(&w0.pow(k as i64 - 1)?);
    if gw0.is_zero() {
        return Err(HgcError::SingularPoint(format!("dG/dw vanishes at w0 = {w0}")));
    }
    let mut w = LaurentSeries::new(0, vec![w0.clone()], 1, &one);
    let mut prec = 1i64;
    let mut residuals = Vec::new();
    while prec < work as i64 {
        prec = (2 * prec).min(work as i64);
        let wp = LaurentSeries::new(0, w.coeffs.clone(), prec, &one);
        let ap = LaurentSeries::from_poly(a, prec, &one);
        let bp = LaurentSeries::from_poly(b, prec, &one);
        let wk1 = wp.pow(k as i64 - 1)?;
        let g = ap.add(&bp.mul(&wk1.mul(&wp)));
        let gw = bp.mul(&wk1).scale(&kk);
        let step = g.mul(&gw.inv()?);
        w = wp.sub(&step);
        residuals.push(g.valuation().unwrap_or(g.prec()));
    }
    let w = LaurentSeries::new(0, w.coeffs, work as i64, &one);
    Ok((w, residuals))
}

impl<T: Tower> Curve<T> {
    fn zeta_index(&self, v: &S<T>, order: usize) -> Option<i64> {
        let t = self.tower();
        (0..order as i64).find(|&i| t.zeta_m_pow(order, i) == *v)
    }

    /// Canonical point with affine coordinates `(x0, y0)`.
    pub fn point_from_affine(&self, x0: S<T>, y0: S<T>) -> Result<Point<S<T>>> {
        if !self.equation_at(&x0, &y0).is_zero() {
            return Err(HgcError::InvariantViolation(format!("({x0}, {y0}) is not on the curve")));
        }
        let (n, m) = (self.n(), self.m());
        if x0.is_zero() {
            return self.zeta_index(&y0, n).map(Point::A).ok_or_else(|| HgcError::InvariantViolation("a-cusp index".into()));
        }
        if y0.is_zero() {
            return self.zeta_index(&x0, m).map(Point::B).ok_or_else(|| HgcError::InvariantViolation("b-cusp index".into()));
        }
        if self.is_standard() && n % 2 == 1 {
            let xi = self.tower().xi();
            let rx = x0.div(&xi)?;
            let ry = y0.div(&xi)?;
            if let (Some(r), Some(s)) = (self.zeta_index(&rx, n), self.zeta_index(&ry.neg(), n)) {
                return Ok(Point::Fixed { q: false, r, s });
            }
            if let (Some(r), Some(s)) = (self.zeta_index(&rx.neg(), n), self.zeta_index(&ry, n)) {
                return Ok(Point::Fixed { q: true, r, s });
            }
        }
        Ok(Point::Affine { x: x0, y: y0 })
    }

    /// Affine coordinates of a non-cusp point.
    pub fn affine_coords(&self, p: &Point<S<T>>) -> Option<(S<T>, S<T>)> {
        let t = self.tower();
        match p {
            Point::A(i) => Some((t.zero(), t.zeta_pow(*i))),
            Point::B(i) => Some((t.zeta_m_pow(self.m(), *i), t.zero())),
            Point::Fixed { q, r, s } => {
                let xi = if *q { t.xi().neg() } else { t.xi() };
                Some((t.zeta_pow(*r).mul(&xi), t.zeta_pow(*s).mul(&xi).neg()))
            }
            Point::Affine { x, y } => Some((x.clone(), y.clone())),
            _ => None,
        }
    }

    /// The 4N cusps (`a`, `b`, `c1`, `c2` families).
    pub fn cusps(&self) -> Vec<Point<S<T>>> {
        let (n, m) = (self.n() as i64, self.m() as i64);
        let mut v: Vec<_> = (0..n).map(Point::A).collect();
        v.extend((0..m).map(Point::B));
        v.extend((0..n).map(Point::C1));
        v.extend((0..m).map(Point::C2));
        v
    }

    fn canonical(&self, p: Point<S<T>>) -> Point<S<T>> {
        let (n, m) = (self.n() as i64, self.m() as i64);
        match p {
            Point::A(i) => Point::A(i.rem_euclid(n)),
            Point::B(i) => Point::B(i.rem_euclid(m)),
            Point::C1(i) => Point::C1(i.rem_euclid(n)),
            Point::C2(i) => Point::C2(i.rem_euclid(m)),
            Point::Fixed { q, r, s } => Point::Fixed { q, r: r.rem_euclid(n), s: s.rem_euclid(n) },
            other => other,
        }
    }

    /// `sigma(p)` for the point map `sigma`.
    pub fn act(&self, sigma: &crate::function_field::Automorphism, p: &Point<S<T>>) -> Result<Point<S<T>>> {
        use crate::function_field::Automorphism as Au;
        let t = self.tower();
        let out = match (sigma, p) {
            (Au::Word(w), _) => {
                let mut q = p.clone();
                for a in w.iter().rev() {
                    q = self.act(a, &q)?;
                }
                q
            }
            (Au::Group(r, s), _) => match p {
                Point::A(i) => Point::A(i + s),
                Point::B(i) => Point::B(i + r),
                Point::C1(i) => Point::C1(i + s),
                Point::C2(i) => Point::C2(i + r),
                Point::Fixed { q, r: r0, s: s0 } => Point::Fixed { q: *q, r: r0 + r, s: s0 + s },
                Point::Affine { x, y } => {
                    self.point_from_affine(x.mul(&t.zeta_m_pow(self.m(), *r)), y.mul(&t.zeta_pow(*s)))?
                }
                Point::Fiber(k) => {
                    let (zr, zs) = (t.zeta_pow(*r), t.zeta_pow(*s));
                    let c = match k.kind {
                        FiberKind::X => k.c.mul(&zr),
                        FiberKind::Y => k.c.mul(&zs),
                        FiberKind::XY => k.c.mul(&zr).mul(&zs),
                        FiberKind::XCY => k.c.mul(&zr).div(&zs)?,
                    };
                    Point::Fiber(FiberKey { kind: k.kind, c, root: k.root.clone() })
                }
            },
            (Au::Alpha, _) => {
                self.require_standard_points()?;
                let rho = t.rho();
                let rn = rho.pow(self.n() as i64)?;
                match p {
                    Point::A(i) => Point::C1(-i),
                    Point::B(i) => Point::C2(-i),
                    Point::C1(i) => Point::A(-i),
                    Point::C2(i) => Point::B(-i),
                    Point::Fixed { q, r, s } => Point::Fixed { q: *q, r: -r, s: -s },
                    Point::Affine { x, y } => self.point_from_affine(rho.mul(x).inv()?, rho.mul(y).inv()?)?,
                    Point::Fiber(k) => {
                        let (c, root) = match k.kind {
                            FiberKind::X | FiberKind::Y => (rho.mul(&k.c).inv()?, None),
                            FiberKind::XY => (rho.square().mul(&k.c).inv()?, k.root.as_ref().map(|r| rn.mul(r).inv()).transpose()?),
                            FiberKind::XCY => (k.c.inv()?, k.root.as_ref().map(|r| rn.mul(r).inv()).transpose()?),
                        };
                        Point::Fiber(FiberKey { kind: k.kind, c, root })
                    }
                }
            }
            (Au::Swap, _) => {
                self.require_standard_points()?;
                let n = self.n() as i64;
                match p {
                    Point::A(i) => Point::B(*i),
                    Point::B(i) => Point::A(*i),
                    Point::C1(i) => Point::C2(*i),
                    Point::C2(i) => Point::C1(*i),
                    Point::Fixed { q, r, s } => Point::Fixed { q: !q, r: *s, s: *r },
                    Point::Affine { x, y } => self.point_from_affine(y.clone(), x.clone())?,
                    Point::Fiber(k) => {
                        let (kind, c, root) = match k.kind {
                            FiberKind::X => (FiberKind::Y, k.c.clone(), None),
                            FiberKind::Y => (FiberKind::X, k.c.clone(), None),
                            FiberKind::XY => {
                                let cn = k.c.pow(n)?;
                                (FiberKind::XY, k.c.clone(), k.root.as_ref().map(|r| cn.div(r)).transpose()?)
                            }
                            FiberKind::XCY => {
                                let cn = k.c.pow(n)?;
                                (FiberKind::XCY, k.c.inv()?, k.root.as_ref().map(|r| cn.mul(r)))
                            }
                        };
                        Point::Fiber(FiberKey { kind, c, root })
                    }
                }
            }
        };
        Ok(self.canonical(out))
    }

    fn require_standard_points(&self) -> Result<()> {
        if self.is_standard() {
            Ok(())
        } else {
            Err(HgcError::Unsupported("alpha and swap on the mixed-degree model".into()))
        }
    }

    /// Local parameter and coordinate expansions at `p` modulo `t^work`.
    pub fn chart(&self, p: &Point<S<T>>, work: usize) -> Result<Arc<Chart<S<T>>>> {
        let key = (p.clone(), work);
        if let Some(c) = self.charts.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let c = Arc::new(self.build_chart(p, work)?);
        self.charts.lock().unwrap().insert(key, c.clone());
        Ok(c)
    }

    fn build_chart(&self, p: &Point<S<T>>, work: usize) -> Result<Chart<S<T>>> {
        let t = self.tower();
        let one = t.one();
        let (n, m) = (self.n(), self.m());
        let rn = t.rho().pow(n as i64)?;
        let w = work as i64;
        let tpow = |k: usize| Poly::monomial(one.clone(), k);
        let cst = |c: S<T>| Poly::constant(c);
        let tser = LaurentSeries::new(1, vec![one.clone()], w, &one);
        let tinv = LaurentSeries::new(-1, vec![one.clone()], w - 1, &one);
        // A(t) + B(t) w^K = 0 in every chart
        let (param, a, b, k, w0) = match p {
            Point::A(i) => (Parameter::X, cst(one.clone()).sub(&tpow(m)), tpow(m).scale(&rn).sub(&cst(one.clone())), n, t.zeta_pow(*i)),
            Point::B(i) => {
                (Parameter::Y, cst(one.clone()).sub(&tpow(n)), tpow(n).scale(&rn).sub(&cst(one.clone())), m, t.zeta_m_pow(m, *i))
            }
            Point::C1(i) => {
                let w0 = t.rho().inv()?.mul(&t.zeta_pow(*i));
                (Parameter::InvX, tpow(m).sub(&cst(one.clone())), cst(rn.clone()).sub(&tpow(m)), n, w0)
            }
            Point::C2(i) => {
                let rho_m = t.rho().pow((n / m) as i64)?;
                let w0 = rho_m.inv()?.mul(&t.zeta_m_pow(m, *i));
                (Parameter::InvY, tpow(n).sub(&cst(one.clone())), cst(rn.clone()).sub(&tpow(n)), m, w0)
            }
            Point::Fiber(k) => return Err(HgcError::UnsupportedFiber(format!("no local expansion at {}", Point::Fiber(k.clone())))),
            _ => {
                let (x0, y0) = self.affine_coords(p).unwrap();
                let (fx, fy) = self.gradient_at(&x0, &y0);
                if !fy.is_zero() {
                    let xm = Poly::from_coeffs(vec![x0.clone(), one.clone()]).pow(m as u32);
                    (Parameter::X, cst(one.clone()).sub(&xm), xm.scale(&rn).sub(&cst(one.clone())), n, y0)
                } else if !fx.is_zero() {
                    let yn = Poly::from_coeffs(vec![y0.clone(), one.clone()]).pow(n as u32);
                    (Parameter::Y, cst(one.clone()).sub(&yn), yn.scale(&rn).sub(&cst(one.clone())), m, x0)
                } else {
                    return Err(HgcError::SingularPoint(format!("{p}")));
                }
            }
        };
        let (ws, residuals) = newton_lift(&a, &b, k, &w0, work)?;
        let (xs, ys, dx_dt) = match (p, &param) {
            (Point::A(_), _) => (tser.clone(), ws, LaurentSeries::new(0, vec![one.clone()], w, &one)),
            (Point::B(_), _) => (ws.clone(), tser.clone(), ws.derivative()),
            (Point::C1(_), _) => (tinv.clone(), ws, LaurentSeries::new(-2, vec![one.neg()], w - 2, &one)),
            (Point::C2(_), _) => (ws.clone(), tinv.clone(), ws.derivative()),
            (_, Parameter::X) => {
                let (x0, _) = self.affine_coords(p).unwrap();
                let xs = LaurentSeries::new(0, vec![x0, one.clone()], w, &one);
                (xs, ws, LaurentSeries::new(0, vec![one.clone()], w, &one))
            }
            (_, _) => {
                let (_, y0) = self.affine_coords(p).unwrap();
                let ys = LaurentSeries::new(0, vec![y0, one.clone()], w, &one);
                (ws.clone(), ys, ws.derivative())
            }
        };
        Ok(Chart { param, work, xs, ys, dx_dt, residuals })
    }

    /// Evaluates `f` on a chart (no precision escalation).
    pub fn series_on_chart(&self, f: &CurveFunction<T>, chart: &Chart<S<T>>) -> Result<LaurentSeries<S<T>>> {
        let one = self.tower().one();
        let eval = |p: &Poly<S<T>>| {
            let mut acc = LaurentSeries::new(0, vec![], EXACT, &one);
            for c in p.coeffs().iter().rev() {
                acc = acc.mul(&chart.xs).add(&LaurentSeries::new(0, vec![c.clone()], EXACT, &one));
            }
            acc
        };
        let mut acc = LaurentSeries::new(0, vec![], EXACT, &one);
        let mut ypow = LaurentSeries::new(0, vec![one.clone()], EXACT, &one);
        for (j, c) in f.components().iter().enumerate() {
            if j > 0 {
                ypow = ypow.mul(&chart.ys);
            }
            if !c.is_zero() {
                acc = acc.add(&eval(c).mul(&ypow));
            }
        }
        let d = eval(f.denominator());
        if !d.is_resolved() {
            // nothing is known until the denominator's leading term is
            return Ok(LaurentSeries::new(0, vec![], -EXACT, &one));
        }
        Ok(acc.mul(&d.inv()?))
    }

    /// Laurent expansion of `f` at `p`. With `target = None` the working precision
    /// doubles from 2N until the leading term is resolved, up to the ceiling;
    /// with `target = Some(k)` it increases until the series is known modulo `t^k`.
    pub fn expand_at(&self, f: &CurveFunction<T>, p: &Point<S<T>>, target: Option<i64>) -> Result<LaurentSeries<S<T>>> {
        if f.is_zero() {
            return Err(HgcError::DivisionByZero);
        }
        let mut work = 2 * self.n();
        loop {
            let chart = self.chart(p, work)?;
            let s = self.series_on_chart(f, &chart)?;
            let done = match target {
                None => s.is_resolved(),
                Some(k) => s.prec() >= k,
            };
            if done {
                return Ok(match target {
                    Some(k) => s.truncate(k),
                    None => s,
                });
            }
            let over = match target {
                None => work >= self.ceiling(),
                Some(k) => work as i64 > 4 * (k.abs() + self.ceiling() as i64),
            };
            if over {
                return Err(HgcError::PrecisionExhausted { point: p.to_string(), ceiling: self.ceiling() });
            }
            work = (2 * work).min(self.ceiling().max(work + 1)).max(work + 1);
            if target.is_some() {
                work = work.max(2 * work);
            }
        }
    }

    pub fn ord_at(&self, f: &CurveFunction<T>, p: &Point<S<T>>) -> Result<i64> {
        Ok(self.expand_at(f, p, None)?.valuation().expect("resolved"))
    }

    /// Expansion of the coefficient of `dt` in `f dx`.
    pub fn form_series(&self, f: &CurveFunction<T>, p: &Point<S<T>>, target: Option<i64>) -> Result<LaurentSeries<S<T>>> {
        let mut work = 2 * self.n();
        loop {
            let chart = self.chart(p, work)?;
            let s = self.series_on_chart(f, &chart)?.mul(&chart.dx_dt);
            let done = match target {
                None => s.is_resolved(),
                Some(k) => s.prec() >= k,
            };
            if done {
                return Ok(s);
            }
            if work >= 4 * self.ceiling() {
                return Err(HgcError::PrecisionExhausted { point: p.to_string(), ceiling: self.ceiling() });
            }
            work *= 2;
        }
    }

    /// Residue of `f dx` at `p`.
    pub fn residue_at(&self, f: &CurveFunction<T>, p: &Point<S<T>>) -> Result<S<T>> {
        if f.is_zero() {
            return Ok(self.tower().zero());
        }
        let s = self.form_series(f, p, Some(0))?;
        Ok(s.coeff(-1).expect("known below 0"))
    }

    /// Order of `f dx` at `p`.
    pub fn form_ord_at(&self, f: &CurveFunction<T>, p: &Point<S<T>>) -> Result<i64> {
        Ok(self.form_series(f, p, None)?.valuation().expect("resolved"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{FiniteSpec, FiniteTower, SymbolicTower};
    use crate::function_field::{Automorphism, FieldHandle};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cusp_charts() {
        let c = Curve::new(SymbolicTower::new(3));
        let t = c.tower();
        let ch = c.chart(&Point::A(0), 6).unwrap();
        assert_eq!(ch.ys.coeff(0).unwrap(), t.one());
        assert_eq!(c.ord_at(&c.x(), &Point::A(0)).unwrap(), 1);
        assert_eq!(c.ord_at(&c.x(), &Point::C1(0)).unwrap(), -1);
        assert_eq!(c.ord_at(&c.y(), &Point::C2(0)).unwrap(), -1);
        let f = c.x().sub(&c.one());
        assert_eq!(c.ord_at(&f, &Point::B(0)).unwrap(), 3);
        for i in 0..3 {
            let g = c.x().sub(&c.constant(t.rho().inv().unwrap().mul(&t.zeta_pow(i))));
            assert_eq!(c.ord_at(&g, &Point::C2(i)).unwrap(), 3);
        }
    }

    #[test]
    fn fixed_points_and_newton() {
        let c = Curve::new(SymbolicTower::new(3));
        let t = c.tower();
        let ch = c.chart(&Point::P, 8).unwrap();
        assert_eq!(ch.xs.coeff(0).unwrap(), t.xi());
        assert_eq!(ch.ys.coeff(0).unwrap(), t.xi().neg());
        // residual valuations at least double
        for (k, r) in ch.residuals.iter().enumerate() {
            assert!(*r >= 1 << k, "{:?}", ch.residuals);
        }
        assert!(c.equation_at(&t.xi(), &t.xi().neg()).is_zero());
        assert!(c.equation_at(&t.xi().neg(), &t.xi()).is_zero());
        assert_eq!(c.point_from_affine(t.xi(), t.xi().neg()).unwrap(), Point::P);
    }

    #[test]
    fn residues() {
        let c = Curve::new(SymbolicTower::new(3));
        let dlog = c.x().inv().unwrap();
        assert_eq!(c.residue_at(&dlog, &Point::A(0)).unwrap(), c.tower().one());
        // residue theorem for dx/x: +1 at each a_i, -1 at each c1_i
        let total = c.cusps().iter().fold(c.tower().zero(), |acc, p| acc.add(&c.residue_at(&dlog, p).unwrap()));
        assert!(total.is_zero());
    }

    #[test]
    fn valuation_axioms_and_equivariance() {
        let tower = FiniteTower::new(3, &FiniteSpec::from_seed(FiniteSpec::default_prime(3, 1000), 2)).unwrap();
        let c = Curve::new(tower);
        let t = c.tower().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = c.cusps();
        for _ in 0..50 {
            let mk = |rng: &mut ChaCha8Rng| {
                let m = rng.gen_range(-1i64..=2);
                let k = rng.gen_range(0i64..=2);
                c.monomial(m, k).unwrap().scale(&t.random(rng)).add(&c.constant(t.random(rng)))
            };
            let f = mk(&mut rng);
            let g = mk(&mut rng);
            let p = &pts[rng.gen_range(0..pts.len())];
            if f.is_zero() || g.is_zero() {
                continue;
            }
            let (of, og) = (c.ord_at(&f, p).unwrap_or_else(|e| panic!("{e:?} {f} @ {p}")), c.ord_at(&g, p).unwrap_or_else(|e| panic!("{e:?} {g} @ {p}")));
            assert_eq!(c.ord_at(&f.mul(&g), p).unwrap(), of + og);
            let s = f.add(&g);
            if !s.is_zero() {
                let os = c.ord_at(&s, p).unwrap();
                assert!(os >= of.min(og));
                if of != og {
                    assert_eq!(os, of.min(og));
                }
            }
        }
        let f = c.x().add(&c.y().square()).sub(&c.int(2));
        for sigma in [Automorphism::Group(1, 0), Automorphism::Group(0, 1), Automorphism::Alpha, Automorphism::Swap] {
            let g = c.apply(&sigma, &f).unwrap();
            for p in &pts {
                assert_eq!(c.ord_at(&g, p).unwrap(), c.ord_at(&f, &c.act(&sigma, p).unwrap()).unwrap(), "{sigma} {p}");
            }
        }
    }
}
