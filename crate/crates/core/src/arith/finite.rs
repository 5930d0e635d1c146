use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Cyclo, Scalar, Tower};
use crate::error::{HgcError, Result};

/// An element of the prime field `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fp {
    v: u64,
    q: u64,
}

impl Fp {
    pub fn new(v: i64, q: u64) -> Self {
        Fp { v: v.rem_euclid(q as i64) as u64, q }
    }
    pub fn value(&self) -> u64 {
        self.v
    }
    pub fn modulus(&self) -> u64 {
        self.q
    }
    fn raw(&self, v: u64) -> Self {
        Fp { v, q: self.q }
    }
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, q);
        }
        b = mulmod(b, b, q);
        e >>= 1;
    }
    acc
}

impl Scalar for Fp {
    fn zero_like(&self) -> Self {
        self.raw(0)
    }
    fn one_like(&self) -> Self {
        self.raw(1)
    }
    fn from_int_like(&self, v: i64) -> Self {
        Fp::new(v, self.q)
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.q, o.q);
        self.raw((self.v + o.v) % self.q)
    }
    fn sub(&self, o: &Self) -> Self {
        self.raw((self.v + self.q - o.v) % self.q)
    }
    fn mul(&self, o: &Self) -> Self {
        self.raw(mulmod(self.v, o.v, self.q))
    }
    fn neg(&self) -> Self {
        self.raw((self.q - self.v) % self.q)
    }
    fn inv(&self) -> Result<Self> {
        if self.v == 0 {
            return Err(HgcError::DivisionByZero);
        }
        Ok(self.raw(powmod(self.v, self.q - 2, self.q)))
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// How the specialization values are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpec {
    pub q: u64,
    pub lambda: Option<i64>,
    pub xi: Option<i64>,
    pub seed: Option<u64>,
}

impl FiniteSpec {
    pub fn from_seed(q: u64, seed: u64) -> Self {
        FiniteSpec { q, lambda: None, xi: None, seed: Some(seed) }
    }

    /// Smallest prime `q >= lower` with `q = 1 mod 2N`.
    pub fn default_prime(n: usize, lower: u64) -> u64 {
        let m = 2 * n as u64;
        let mut q = lower.max(m + 1);
        q += (m + 1 - q % m) % m;
        while !is_prime(q) {
            q += m;
        }
        q
    }
}

/// Prime-field specialization `zeta_N -> zeta0`, `xi -> xi0`, `lambda -> 1 - xi0^(-2N)`.
#[derive(Clone, Debug)]
pub struct FiniteTower {
    n: usize,
    q: u64,
    zeta0: u64,
    xi0: u64,
    xi_negated: bool,
}

impl FiniteTower {
    pub fn new(n: usize, spec: &FiniteSpec) -> Result<Self> {
        let q = spec.q;
        if n < 2 {
            return Err(HgcError::InvalidSpec("N must be at least 2".into()));
        }
        if q >= 1 << 31 || !is_prime(q) {
            return Err(HgcError::InvalidSpec(format!("q={q} must be a prime below 2^31")));
        }
        if (q - 1) % (2 * n as u64) != 0 {
            return Err(HgcError::InvalidSpec(format!("q={q} is not 1 mod 2N={}", 2 * n)));
        }
        let zeta0 = primitive_root_of_unity(q, n as u64);
        let mut t = FiniteTower { n, q, zeta0, xi0: 1, xi_negated: false };
        let xi0 = match (spec.xi, spec.lambda) {
            (Some(xi), lam) => {
                let x = Fp::new(xi, q);
                if x.is_zero() {
                    return Err(HgcError::InvalidSpec("xi0 must be nonzero".into()));
                }
                if let Some(l) = lam {
                    let lhs = x.pow(2 * n as i64)?.mul(&Fp::new(1, q).sub(&Fp::new(l, q)));
                    if !lhs.is_one() {
                        return Err(HgcError::InvalidSpec(format!(
                            "xi0^(2N) (1 - lambda0) = {lhs} != 1 for xi0={xi}, lambda0={l}"
                        )));
                    }
                }
                x.v
            }
            (None, Some(l)) => {
                let oml = Fp::new(1 - l, q);
                if oml.is_zero() {
                    return Err(HgcError::InvalidSpec("lambda0 = 1".into()));
                }
                let target = oml.inv()?;
                let roots = t.roots(&target, 2 * n)?;
                match roots.first() {
                    Some(r) => r.v,
                    None => {
                        return Err(HgcError::InvalidSpec(format!(
                            "(1 - lambda0)^-1 has no 2N-th root mod {q} for lambda0={l}"
                        )))
                    }
                }
            }
            (None, None) => {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.unwrap_or(0));
                let start = rng.gen_range(0..q - 2);
                let found = (0..q - 2).map(|i| 2 + (start + i) % (q - 2)).find(|&cand| {
                    t.xi0 = cand;
                    t.check_generic().is_ok()
                });
                found.ok_or_else(|| HgcError::InvalidSpec(format!("no non-degenerate xi0 mod {q} for N={n}")))?
            }
        };
        t.xi0 = xi0;
        let lam = t.lambda();
        if lam.is_zero() || lam.is_one() {
            return Err(HgcError::InvalidSpec(format!("lambda0 = {lam} is degenerate")));
        }
        Ok(t)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn el(&self, v: i64) -> Fp {
        Fp::new(v, self.q)
    }

    /// Image of the internal generator of the symbolic tower.
    pub fn xi_internal_value(&self) -> Fp {
        self.el(self.xi0 as i64)
    }

    pub fn cyclo_to_fp(&self, c: &Cyclo) -> Result<Fp> {
        let q = BigInt::from(self.q);
        let red = |b: &BigInt| -> u64 { (((b % &q) + &q) % &q).to_u64().unwrap() };
        let den = self.el(red(c.denominator()) as i64);
        if den.is_zero() {
            return Err(HgcError::SpecializationPole(format!("denominator of {c} vanishes mod {}", self.q)));
        }
        let z = self.el(self.zeta0 as i64);
        let mut acc = self.zero();
        for a in c.numerators().iter().rev() {
            acc = acc.mul(&z).add(&self.el(red(a) as i64));
        }
        acc.div(&den)
    }

    /// Rejects specializations that create coincidences absent over the generic tower:
    /// special `lambda` values with extra branch-point symmetries and fibers
    /// that acquire repeated points.
    pub fn check_generic(&self) -> Result<()> {
        let l = self.lambda();
        let bad = [0i64, 1, -1, 2];
        for b in bad {
            if l == self.el(b) {
                return Err(HgcError::DegenerateSpecialization(format!("lambda0 = {b}")));
            }
        }
        let two_l = l.add(&l);
        if two_l.is_one() {
            return Err(HgcError::DegenerateSpecialization("lambda0 = 1/2".into()));
        }
        if l.square().sub(&l).add(&self.one()).is_zero() {
            return Err(HgcError::DegenerateSpecialization("lambda0 is a primitive 6th root of unity".into()));
        }
        // xi0^(2N) = 1 would put the fixed points on cusps
        if self.xi_internal_value().pow(2 * self.n as i64)?.is_one() {
            return Err(HgcError::DegenerateSpecialization("xi0^(2N) = 1".into()));
        }
        // 4 rho^N (1 + rho^N)^(-2) = 1 collapses the fibers of x - c y
        let rn = self.rho().pow(self.n as i64)?;
        let onep = self.one().add(&rn);
        if onep.square().sub(&rn.mul(&self.el(4))).is_zero() {
            return Err(HgcError::DegenerateSpecialization("rho0^N = 1".into()));
        }
        Ok(())
    }
}

fn primitive_root_of_unity(q: u64, n: u64) -> u64 {
    let factors = prime_factors(q - 1);
    let g = (2..q)
        .find(|&g| factors.iter().all(|&p| powmod(g, (q - 1) / p, q) != 1))
        .expect("prime field has a generator");
    powmod(g, (q - 1) / n, q)
}

// ---- dense polynomials over F_q for root finding ----

fn ptrim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn prem(a: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let li = powmod(m[dm], q - 2, q);
    while r.len() > dm {
        let c = mulmod(*r.last().unwrap(), li, q);
        let off = r.len() - 1 - dm;
        for (j, &mj) in m.iter().enumerate() {
            r[off + j] = (r[off + j] + q - mulmod(c, mj, q)) % q;
        }
        r = ptrim(r);
    }
    r
}

fn pmulmod(a: &[u64], b: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mulmod(x, y, q)) % q;
        }
    }
    prem(&ptrim(r), m, q)
}

fn ppowmod(base: &[u64], mut e: u64, m: &[u64], q: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = prem(base, m, q);
    while e > 0 {
        if e & 1 == 1 {
            acc = pmulmod(&acc, &b, m, q);
        }
        b = pmulmod(&b, &b, m, q);
        e >>= 1;
    }
    acc
}

fn pgcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let (mut a, mut b) = (ptrim(a.to_vec()), ptrim(b.to_vec()));
    while !b.is_empty() {
        let r = prem(&a, &b, q);
        a = b;
        b = r;
    }
    if a.is_empty() {
        return a;
    }
    let li = powmod(*a.last().unwrap(), q - 2, q);
    a.iter().map(|&c| mulmod(c, li, q)).collect()
}

fn pdiv(a: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    let mut out = vec![0u64; a.len() - dm];
    let li = powmod(m[dm], q - 2, q);
    for k in (0..out.len()).rev() {
        let c = mulmod(r[k + dm], li, q);
        out[k] = c;
        for (j, &mj) in m.iter().enumerate() {
            r[k + j] = (r[k + j] + q - mulmod(c, mj, q)) % q;
        }
    }
    out
}

/// Distinct roots in `F_q` of a polynomial (coefficients low degree first),
/// by Cantor-Zassenhaus with a fixed seed.
pub(crate) fn roots_mod_q(f: &[u64], q: u64) -> Vec<u64> {
    let f = ptrim(f.to_vec());
    if f.len() <= 1 {
        return vec![];
    }
    let xq = ppowmod(&[0, 1], q, &f, q);
    let mut xqx = xq.clone();
    if xqx.len() < 2 {
        xqx.resize(2, 0);
    }
    xqx[1] = (xqx[1] + q - 1) % q;
    let g = pgcd(&f, &ptrim(xqx), q);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    split(g, q, &mut rng, &mut out);
    out.sort();
    out
}

fn split(g: Vec<u64>, q: u64, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    let d = g.len().saturating_sub(1);
    if d == 0 {
        return;
    }
    if d == 1 {
        let li = powmod(g[1], q - 2, q);
        out.push((q - mulmod(g[0], li, q)) % q);
        return;
    }
    if q == 2 {
        for r in 0..2 {
            if g.iter().rev().fold(0, |acc, &c| (acc * r + c) % 2) == 0 {
                out.push(r);
            }
        }
        return;
    }
    loop {
        let delta = rng.gen_range(0..q);
        let mut h = ppowmod(&[delta, 1], (q - 1) / 2, &g, q);
        if h.is_empty() {
            continue;
        }
        h[0] = (h[0] + q - 1) % q;
        let c = pgcd(&g, &ptrim(h), q);
        let dc = c.len().saturating_sub(1);
        if dc > 0 && dc < d {
            let other = pdiv(&g, &c, q);
            split(c, q, rng, out);
            split(other, q, rng, out);
            return;
        }
    }
}

impl Tower for FiniteTower {
    type S = Fp;

    fn n(&self) -> usize {
        self.n
    }
    fn backend_name(&self) -> String {
        let sign = if self.xi_negated { "-" } else { "" };
        format!("finite(q={}, xi0={sign}{})", self.q, self.xi0)
    }
    fn int(&self, v: i64) -> Fp {
        self.el(v)
    }
    fn zeta_pow(&self, k: i64) -> Fp {
        let e = k.rem_euclid(self.n as i64) as u64;
        self.el(powmod(self.zeta0, e, self.q) as i64)
    }
    fn xi(&self) -> Fp {
        let x = self.xi_internal_value();
        if self.xi_negated { x.neg() } else { x }
    }
    fn roots(&self, a: &Fp, k: usize) -> Result<Vec<Fp>> {
        if a.is_zero() {
            return Ok(vec![*a]);
        }
        let mut f = vec![0u64; k + 1];
        f[0] = a.neg().v;
        f[k] = 1;
        Ok(roots_mod_q(&f, self.q).into_iter().map(|r| self.el(r as i64)).collect())
    }
    fn random(&self, rng: &mut dyn RngCore) -> Fp {
        self.el(rng.gen_range(0..self.q) as i64)
    }
    fn negate_xi(&self) -> Self {
        FiniteTower { xi_negated: !self.xi_negated, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SymbolicTower;

    #[test]
    fn primes() {
        assert!(is_prime(31) && is_prime(2147483647) && !is_prime(561) && !is_prime(1));
        assert_eq!(FiniteSpec::default_prime(3, 10), 13);
    }

    #[test]
    fn spec_from_lambda_and_xi() {
        // lambda0 = 3 has no admissible xi0 mod 31: (1 - 3)^-1 = 15 is not a 6th power
        let no_xi = FiniteTower::new(3, &FiniteSpec { q: 31, lambda: Some(3), xi: None, seed: None });
        assert!(matches!(no_xi, Err(HgcError::InvalidSpec(_))));
        let t = FiniteTower::new(3, &FiniteSpec { q: 31, lambda: Some(16), xi: None, seed: None }).unwrap();
        assert_eq!(t.el(1).sub(&t.el(3)), t.el(29));
        assert_eq!(t.lambda(), t.el(16));
        assert!(t.xi().pow(6).unwrap().mul(&t.one().sub(&t.lambda())).is_one());
        let bad = FiniteTower::new(3, &FiniteSpec { q: 29, lambda: Some(3), xi: None, seed: None });
        assert!(matches!(bad, Err(HgcError::InvalidSpec(_))));
        let inconsistent = FiniteTower::new(3, &FiniteSpec { q: 31, lambda: Some(3), xi: Some(2), seed: None });
        assert!(matches!(inconsistent, Err(HgcError::InvalidSpec(_))));
    }

    #[test]
    fn relations_and_roots() {
        for n in [3usize, 4, 5, 6] {
            let q = FiniteSpec::default_prime(n, 1000);
            let t = FiniteTower::new(n, &FiniteSpec::from_seed(q, 11)).unwrap();
            t.check_generic().unwrap();
            assert!(t.zeta_pow(1).pow(n as i64).unwrap().is_one());
            assert!(!t.zeta_pow(1).is_one());
            assert_eq!(t.rho().pow(n as i64).unwrap(), t.one().sub(&t.lambda()));
            let a = t.el(12345);
            let r = t.roots(&a.pow(n as i64).unwrap(), n).unwrap();
            assert_eq!(r.len(), n);
            assert!(r.contains(&a));
        }
    }

    #[test]
    fn specialization_is_a_homomorphism() {
        let s = SymbolicTower::new(3);
        let f = FiniteTower::new(3, &FiniteSpec::from_seed(FiniteSpec::default_prime(3, 5000), 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let a = s.random(&mut rng);
            let b = s.random(&mut rng);
            let (Ok(fa), Ok(fb)) = (a.specialize(&f), b.specialize(&f)) else { continue };
            assert_eq!(a.mul(&b).specialize(&f).unwrap(), fa.mul(&fb));
            assert_eq!(a.add(&b).specialize(&f).unwrap(), fa.add(&fb));
        }
        assert_eq!(s.rho().pow(3).unwrap().specialize(&f).unwrap(), f.one().sub(&f.lambda()));
        assert_eq!(s.xi().specialize(&f).unwrap(), f.xi());
    }
}
