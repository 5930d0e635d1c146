//! Exact coefficient arithmetic.
//!
//! The coefficient field of the curve family is `Q(zeta_N)(lambda)(xi)` with
//! `xi^(2N) = (1 - lambda)^(-1)`. Since `lambda = 1 - xi^(-2N)` is determined by
//! `xi`, the field is the rational function field `Q(zeta_N)(xi)`, which is what
//! [`SymbolicTower`] implements. [`FiniteTower`] is a prime-field specialization
//! with the same interface.

mod cyclo;
mod finite;
pub mod linalg;
mod poly;
mod ratfunc;

use std::fmt::{Debug, Display};
use std::hash::Hash;

use rand::RngCore;

pub use cyclo::{cyclotomic_polynomial, Cyclo, CycloField};
pub use finite::{FiniteSpec, FiniteTower, Fp};
pub use poly::{fmt_poly, Poly};
pub use ratfunc::{SymbolicTower, TowerScalar};

use crate::error::{HgcError, Result};

/// An element of an exact field. Elements carry whatever context they need,
/// so arithmetic never needs an external handle.
pub trait Scalar: Clone + PartialEq + Eq + Ord + Hash + Debug + Display + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_int_like(&self, v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;

    fn is_one(&self) -> bool {
        self.sub(&self.one_like()).is_zero()
    }

    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one_like();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    fn square(&self) -> Self {
        self.mul(self)
    }
}

/// A concrete coefficient field for the curve `X_{N,lambda}` together with the
/// distinguished elements `zeta_N`, `xi`, `rho = xi^-2` and `lambda = 1 - rho^N`.
pub trait Tower: Clone + Debug + Send + Sync + 'static {
    type S: Scalar;

    fn n(&self) -> usize;
    fn backend_name(&self) -> String;
    fn int(&self, v: i64) -> Self::S;
    /// `zeta_N^k` for a fixed primitive N-th root of unity.
    fn zeta_pow(&self, k: i64) -> Self::S;
    /// The generator `xi` with `xi^2 = rho^-1`.
    fn xi(&self) -> Self::S;
    /// All `k`-th roots of `a` lying in the field (empty when there are none).
    /// Errors with `UnsupportedFiber` when the backend cannot decide.
    fn roots(&self, a: &Self::S, k: usize) -> Result<Vec<Self::S>>;
    /// A pseudo-random element of moderate size, for property tests.
    fn random(&self, rng: &mut dyn RngCore) -> Self::S;
    /// The same field presented with generator `-xi` (the automorphism `xi -> -xi`).
    fn negate_xi(&self) -> Self;

    /// `true` only if `a` and `b` are certainly coprime; used to skip gcds.
    fn certify_coprime(&self, _a: &Poly<Self::S>, _b: &Poly<Self::S>) -> bool {
        false
    }

    fn zero(&self) -> Self::S {
        self.int(0)
    }
    fn one(&self) -> Self::S {
        self.int(1)
    }
    fn rational(&self, num: i64, den: i64) -> Result<Self::S> {
        self.int(num).div(&self.int(den))
    }
    fn rho(&self) -> Self::S {
        self.xi().pow(-2).expect("xi is nonzero")
    }
    fn rho_inv(&self) -> Self::S {
        self.xi().square()
    }
    fn lambda(&self) -> Self::S {
        self.one().sub(&self.rho().pow(self.n() as i64).expect("rho nonzero"))
    }
    /// `zeta_N^(k N / m)`, a primitive m-th root of unity raised to k, for m | N.
    fn zeta_m_pow(&self, m: usize, k: i64) -> Self::S {
        assert!(m > 0 && self.n() % m == 0, "m must divide N");
        self.zeta_pow(k * (self.n() / m) as i64)
    }
}

/// Checks that two towers describe the same field presentation.
pub fn ensure_same_backend<T: Tower>(a: &T, b: &T) -> Result<()> {
    if a.backend_name() != b.backend_name() || a.n() != b.n() {
        return Err(HgcError::BackendMismatch(format!(
            "{} (N={}) vs {} (N={})",
            a.backend_name(),
            a.n(),
            b.backend_name(),
            b.n()
        )));
    }
    Ok(())
}
