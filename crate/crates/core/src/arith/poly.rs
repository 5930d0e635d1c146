use std::fmt;

use super::Scalar;
use crate::error::{HgcError, Result};

/// Dense univariate polynomial, coefficients stored low degree first with no
/// trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Poly<S> {
    c: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn from_coeffs(mut c: Vec<S>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn constant(s: S) -> Self {
        Self::from_coeffs(vec![s])
    }

    /// `coef * X^deg`.
    pub fn monomial(coef: S, deg: usize) -> Self {
        if coef.is_zero() {
            return Self::zero();
        }
        let mut c = vec![coef.zero_like(); deg + 1];
        c[deg] = coef;
        Poly { c }
    }

    /// `X - root`.
    pub fn linear(root: &S) -> Self {
        Poly { c: vec![root.neg(), root.one_like()] }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&S> {
        self.c.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&S> {
        self.c.get(i)
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let (long, short) = if self.c.len() >= o.c.len() { (self, o) } else { (o, self) };
        let mut c = long.c.clone();
        for (i, s) in short.c.iter().enumerate() {
            c[i] = c[i].add(s);
        }
        Self::from_coeffs(c)
    }

    pub fn neg(&self) -> Self {
        Poly { c: self.c.iter().map(|x| x.neg()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a.sub(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.neg(),
                (None, None) => unreachable!(),
            });
        }
        Self::from_coeffs(c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let z = self.c[0].zero_like();
        let mut c = vec![z; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(c)
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Poly { c: self.c.iter().map(|x| x.mul(s)).collect() }
    }

    /// Multiplies by `X^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut c = vec![self.c[0].zero_like(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    /// Divides by `X^k`, which must divide the polynomial.
    pub fn unshift(&self, k: usize) -> Self {
        debug_assert!(self.c.iter().take(k).all(|x| x.is_zero()));
        Poly { c: self.c.iter().skip(k).cloned().collect() }
    }

    /// Substitutes `X -> s X`.
    pub fn scale_var(&self, s: &S) -> Self {
        let mut p = s.one_like();
        let mut c = Vec::with_capacity(self.c.len());
        for a in &self.c {
            c.push(a.mul(&p));
            p = p.mul(s);
        }
        Self::from_coeffs(c)
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return match self.c.first() {
                Some(a) => Self::constant(a.one_like()),
                None => panic!("0^0 for a polynomial without coefficient context"),
            };
        }
        let mut acc: Option<Self> = None;
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => b.clone(),
                    Some(a) => a.mul(&b),
                });
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc.unwrap()
    }

    pub fn divrem(&self, d: &Self) -> Result<(Self, Self)> {
        let dl = d.lead().ok_or(HgcError::DivisionByZero)?;
        let dd = d.c.len() - 1;
        if self.c.len() < d.c.len() {
            return Ok((Self::zero(), self.clone()));
        }
        let inv = dl.inv()?;
        let mut r = self.c.clone();
        let mut q = vec![dl.zero_like(); self.c.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = r[k + dd].mul(&inv);
            if coef.is_zero() {
                continue;
            }
            for (j, dc) in d.c.iter().enumerate() {
                r[k + j] = r[k + j].sub(&coef.mul(dc));
            }
            q[k] = coef;
        }
        r.truncate(dd);
        Ok((Self::from_coeffs(q), Self::from_coeffs(r)))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return Err(HgcError::InvariantViolation("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn monic(&self) -> Result<Self> {
        match self.lead() {
            None => Ok(Self::zero()),
            Some(l) if l.is_one() => Ok(self.clone()),
            Some(l) => Ok(self.scale(&l.inv()?)),
        }
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Result<Self> {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r.monic()?;
        }
        a.monic()
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = x.zero_like();
        for a in self.c.iter().rev() {
            acc = acc.mul(x).add(a);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.mul(&a.from_int_like(i as i64)))
                .collect(),
        )
    }

    /// Applies a coefficient map (used for ring homomorphisms between backends).
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T>) -> Result<Poly<T>> {
        Ok(Poly::from_coeffs(self.c.iter().map(f).collect::<Result<Vec<_>>>()?))
    }

    /// Number of times `X - root` divides the polynomial (0 for the zero polynomial).
    pub fn root_multiplicity(&self, root: &S) -> usize {
        if self.is_zero() {
            return 0;
        }
        let lin = Self::linear(root);
        let mut p = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = p.divrem(&lin).expect("linear divisor");
            if !r.is_zero() {
                return k;
            }
            k += 1;
            p = q;
        }
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    /// Formats in the variable `X`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(f, &self.c, "X")
    }
}

pub fn fmt_poly<S: Scalar>(f: &mut fmt::Formatter<'_>, c: &[S], var: &str) -> fmt::Result {
    let mut first = true;
    for (i, a) in c.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        match i {
            0 => write!(f, "({a})")?,
            1 => write!(f, "({a})*{var}")?,
            _ => write!(f, "({a})*{var}^{i}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}
