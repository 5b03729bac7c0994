//! Prime-field scalars.
//!
//! Every symbol of a message or of the common randomness is a uniform element
//! of `F_q`. The modulus is chosen at runtime so the same scheme can be audited
//! over several fields.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus. Products of two residues must fit in a `u64`.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

/// A prime field `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self { q })
    }

    /// The binary field, the default for every audit.
    pub fn binary() -> Self {
        Self { q: 2 }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement { value: value % self.q, q: self.q }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    // Raw residue arithmetic, used by the matrix routines.

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.q
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.q;
        if a == 0 {
            return Err(Error::InverseOfZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Reduce a signed integer into `[0, q)`.
    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self::binary()
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;

    fn try_from(q: u64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.q
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An element of `F_q` that carries its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    q: u64,
}

/// The four scalar operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    /// Inverse of the left operand; the right operand only has to share the modulus.
    Inv,
}

impl FieldElement {
    pub fn new(value: u64, q: u64) -> Result<Self> {
        Ok(PrimeField::new(q)?.element(value))
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { q: self.q }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn apply(self, other: Self, op: FieldOp) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q, other.q));
        }
        let f = self.field();
        let value = match op {
            FieldOp::Add => f.add(self.value, other.value),
            FieldOp::Sub => f.sub(self.value, other.value),
            FieldOp::Mul => f.mul(self.value, other.value),
            FieldOp::Inv => f.inv(self.value)?,
        };
        Ok(Self { value, q: self.q })
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        self.apply(other, FieldOp::Add)
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        self.apply(other, FieldOp::Sub)
    }

    pub fn checked_mul(self, other: Self) -> Result<Self> {
        self.apply(other, FieldOp::Mul)
    }

    pub fn inverse(self) -> Result<Self> {
        self.apply(self, FieldOp::Inv)
    }

    pub fn negate(self) -> Self {
        Self { value: self.field().neg(self.value), q: self.q }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
