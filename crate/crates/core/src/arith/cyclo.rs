use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::finite::{FiniteSpec, FiniteTower};
use super::Scalar;
use crate::error::{HgcError, Result};

/// Integer coefficients of the n-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_polynomial(n: usize) -> Vec<BigInt> {
    assert!(n >= 1);
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut p: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::from(-1);
    p[n] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = int_poly_div_exact(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

fn int_poly_div_exact(a: &[BigInt], monic: &[BigInt]) -> Vec<BigInt> {
    let dd = monic.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - dd];
    for k in (0..q.len()).rev() {
        let c = r[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, m) in monic.iter().enumerate() {
            r[k + j] -= &c * m;
        }
        q[k] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

/// The cyclotomic field `Q(zeta_n) = Q[z]/Phi_n(z)`.
#[derive(Debug)]
pub struct CycloField {
    n: usize,
    modulus: Vec<BigInt>,
    degree: usize,
    probe: OnceLock<Option<FiniteTower>>,
}

impl CycloField {
    pub fn new(n: usize) -> Arc<Self> {
        let modulus = cyclotomic_polynomial(n);
        let degree = modulus.len() - 1;
        Arc::new(CycloField { n, modulus, degree, probe: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// A fixed finite specialization used to certify coprimality cheaply.
    pub(crate) fn probe(&self) -> Option<&FiniteTower> {
        self.probe
            .get_or_init(|| {
                let q = FiniteSpec::default_prime(self.n, 1 << 30);
                FiniteTower::new(self.n, &FiniteSpec::from_seed(q, 0x5eed)).ok()
            })
            .as_ref()
    }

    /// Euler phi of n.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    pub fn int(self: &Arc<Self>, v: i64) -> Cyclo {
        let mut num = vec![BigInt::zero(); self.degree];
        num[0] = BigInt::from(v);
        Cyclo { field: self.clone(), num, den: BigInt::one() }
    }

    pub fn rational(self: &Arc<Self>, r: &BigRational) -> Cyclo {
        let mut num = vec![BigInt::zero(); self.degree];
        num[0] = r.numer().clone();
        Cyclo::normalized(self.clone(), num, r.denom().clone())
    }

    /// `zeta^k` for any integer k.
    pub fn zeta_pow(self: &Arc<Self>, k: i64) -> Cyclo {
        let e = k.rem_euclid(self.n as i64) as usize;
        let mut v = vec![BigInt::zero(); e.max(self.degree - 1) + 1];
        v[e] = BigInt::one();
        let num = self.reduce(v);
        Cyclo { field: self.clone(), num, den: BigInt::one() }
    }

    pub fn from_int_coeffs(self: &Arc<Self>, coeffs: Vec<BigInt>, den: BigInt) -> Cyclo {
        let mut v = coeffs;
        if v.len() < self.degree {
            v.resize(self.degree, BigInt::zero());
        }
        let num = self.reduce(v);
        Cyclo::normalized(self.clone(), num, den)
    }

    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree;
        for k in (d..v.len()).rev() {
            let c = std::mem::take(&mut v[k]);
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                let m = &self.modulus[j];
                if !m.is_zero() {
                    v[k - d + j] -= &c * m;
                }
            }
        }
        v.truncate(d);
        v.resize(d, BigInt::zero());
        v
    }
}

/// An element of `Q(zeta_n)`, stored as an integer vector over a positive common denominator.
#[derive(Clone, Debug)]
pub struct Cyclo {
    field: Arc<CycloField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclo {
    fn normalized(field: Arc<CycloField>, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for x in num.iter_mut() {
                *x = -&*x;
            }
        }
        let mut g = den.clone();
        for x in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(x);
        }
        if num.iter().all(|x| x.is_zero()) {
            den = BigInt::one();
        } else if !g.is_one() {
            for x in num.iter_mut() {
                *x = &*x / &g;
            }
            den /= &g;
        }
        Cyclo { field, num, den }
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    /// Coordinates in the power basis `1, zeta, ..., zeta^(phi-1)`.
    pub fn coords(&self) -> Vec<BigRational> {
        self.num.iter().map(|x| BigRational::new(x.clone(), self.den.clone())).collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).all(|x| x.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn mul_matrix_column(&self, j: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.field.degree + j];
        for (i, a) in self.num.iter().enumerate() {
            v[i + j] = a.clone();
        }
        self.field.reduce(v)
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Self) -> bool {
        self.field.n == o.field.n && self.den == o.den && self.num == o.num
    }
}
impl Eq for Cyclo {}

impl Hash for Cyclo {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.field.n.hash(h);
        self.num.hash(h);
        self.den.hash(h);
    }
}

impl PartialOrd for Cyclo {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cyclo {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.field.n, &self.num, &self.den).cmp(&(o.field.n, &o.num, &o.den))
    }
}

impl Scalar for Cyclo {
    fn zero_like(&self) -> Self {
        self.field.int(0)
    }
    fn one_like(&self) -> Self {
        self.field.int(1)
    }
    fn from_int_like(&self, v: i64) -> Self {
        self.field.int(v)
    }
    fn is_zero(&self) -> bool {
        self.num.iter().all(|x| x.is_zero())
    }
    fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num.iter().skip(1).all(|x| x.is_zero())
    }
    fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.field.n, o.field.n);
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        if self.den == o.den {
            let num = self.num.iter().zip(&o.num).map(|(a, b)| a + b).collect();
            return Cyclo::normalized(self.field.clone(), num, self.den.clone());
        }
        let num = self.num.iter().zip(&o.num).map(|(a, b)| a * &o.den + b * &self.den).collect();
        Cyclo::normalized(self.field.clone(), num, &self.den * &o.den)
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn neg(&self) -> Self {
        Cyclo { field: self.field.clone(), num: self.num.iter().map(|x| -x).collect(), den: self.den.clone() }
    }
    fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.field.n, o.field.n);
        if self.is_zero() || o.is_zero() {
            return self.zero_like();
        }
        let d = self.field.degree;
        let a_nz: Vec<usize> = (0..d).filter(|&i| !self.num[i].is_zero()).collect();
        let b_nz: Vec<usize> = (0..d).filter(|&i| !o.num[i].is_zero()).collect();
        if a_nz.len() == 1 && a_nz[0] == 0 && self.den.is_one() {
            let c = &self.num[0];
            let num = o.num.iter().map(|x| x * c).collect();
            return Cyclo::normalized(self.field.clone(), num, o.den.clone());
        }
        let mut v = vec![BigInt::zero(); 2 * d - 1];
        for &i in &a_nz {
            for &j in &b_nz {
                v[i + j] += &self.num[i] * &o.num[j];
            }
        }
        let num = self.field.reduce(v);
        Cyclo::normalized(self.field.clone(), num, &self.den * &o.den)
    }
    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(HgcError::DivisionByZero);
        }
        let d = self.field.degree;
        if self.num.iter().skip(1).all(|x| x.is_zero()) {
            let mut num = vec![BigInt::zero(); d];
            num[0] = self.den.clone();
            return Ok(Cyclo::normalized(self.field.clone(), num, self.num[0].clone()));
        }
        // Solve M b = e_0 where column j of M is (num * z^j) mod Phi.
        let cols: Vec<Vec<BigInt>> = (0..d).map(|j| self.mul_matrix_column(j)).collect();
        let mut m: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> =
                    (0..d).map(|j| BigRational::from_integer(cols[j][i].clone())).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !m[r][col].is_zero()).ok_or_else(|| {
                HgcError::InvariantViolation("singular multiplication matrix in cyclotomic field".into())
            })?;
            m.swap(col, piv);
            let pv = m[col][col].clone();
            for x in m[col].iter_mut() {
                *x = &*x / &pv;
            }
            for r in 0..d {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in col..=d {
                        let t = &m[col][c] * &f;
                        m[r][c] -= t;
                    }
                }
            }
        }
        // b = solution * den (since self = num/den).
        let sol: Vec<BigRational> = (0..d).map(|i| m[i][d].clone() * BigRational::from_integer(self.den.clone())).collect();
        let mut l = BigInt::one();
        for s in &sol {
            l = l.lcm(s.denom());
        }
        let num = sol.iter().map(|s| s.numer() * (&l / s.denom())).collect();
        Ok(Cyclo::normalized(self.field.clone(), num, l))
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let r = BigRational::new(a.clone(), self.den.clone());
            let coef = if r.is_integer() { r.numer().to_string() } else { format!("{}/{}", r.numer(), r.denom()) };
            terms.push(match i {
                0 => coef,
                1 if r.is_one() => "zeta".to_string(),
                _ if r.is_one() => format!("zeta^{i}"),
                1 => format!("{coef}*zeta"),
                _ => format!("{coef}*zeta^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Exact integer k-th root of a nonnegative integer, if it exists.
pub(crate) fn exact_int_root(v: &BigInt, k: u32) -> Option<BigInt> {
    if v.is_negative() {
        if k % 2 == 1 {
            return exact_int_root(&-v, k).map(|r| -r);
        }
        return None;
    }
    let r = v.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *v {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn cyclotomic_polynomials() {
        let p = |n| cyclotomic_polynomial(n).iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(p(1), vec![-1, 1]);
        assert_eq!(p(3), vec![1, 1, 1]);
        assert_eq!(p(4), vec![1, 0, 1]);
        assert_eq!(p(6), vec![1, -1, 1]);
        assert_eq!(p(5), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn roots_of_unity_relations() {
        for n in [2usize, 3, 4, 5, 6, 7] {
            let f = CycloField::new(n);
            assert!(f.zeta_pow(n as i64).is_one());
            assert!(f.zeta_pow(1).mul(&f.zeta_pow(n as i64 - 1)).is_one());
            if [2, 3, 5, 7].contains(&n) {
                let s = (0..n as i64).fold(f.int(0), |acc, k| acc.add(&f.zeta_pow(k)));
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn inverse() {
        let f = CycloField::new(5);
        let a = f.int(3).add(&f.zeta_pow(1)).add(&f.zeta_pow(3).mul(&f.int(-2)));
        assert!(a.mul(&a.inv().unwrap()).is_one());
        assert_eq!(f.int(0).inv(), Err(HgcError::DivisionByZero));
    }
}
