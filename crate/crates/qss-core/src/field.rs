//! Exact arithmetic in the prime field Z_d.
//!
//! Every value is reduced modulo a [`PrimeModulus`] at construction time and
//! stays reduced through all operations, so there is no floating point and no
//! overflow anywhere in the classical layer.

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime selection requires n >= 2, got {0}")]
    InvalidPrimeBound(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// A prime modulus d, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    /// Checks d >= 2 and primality by deterministic trial division.
    pub fn new(d: u64) -> Result<Self, FieldError> {
        if d < 2 {
            return Err(FieldError::ModulusTooSmall(d));
        }
        if !is_prime(d) {
            return Err(FieldError::NotPrime(d));
        }
        Ok(PrimeModulus(d))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Builds the residue class of `value` in Z_d.
    pub fn element(self, value: u64) -> FieldElement {
        FieldElement::new(value, self)
    }
}

impl std::fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut div = 3u64;
    while div.checked_mul(div).is_some_and(|sq| sq <= n) {
        if n.is_multiple_of(div) {
            return false;
        }
        div += 2;
    }
    true
}

/// Smallest prime p with n < p <= 2n.
///
/// The strict lower bound guarantees that n distinct nonzero evaluation
/// points exist in Z_p. Existence follows from Bertrand's postulate.
pub fn select_prime(n: u64) -> Result<PrimeModulus, FieldError> {
    if n < 2 {
        return Err(FieldError::InvalidPrimeBound(n));
    }
    let upper = n
        .checked_mul(2)
        .ok_or(FieldError::InvalidPrimeBound(n))?;
    let p = (n + 1..=upper)
        .find(|&c| is_prime(c))
        .expect("Bertrand's postulate: a prime exists in (n, 2n] for n >= 2");
    Ok(PrimeModulus(p))
}

/// An element of Z_d. Always satisfies `0 <= value < d`.
///
/// Arithmetic operators panic if the operands carry different moduli; code
/// that mixes moduli is a bug, not a runtime condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: PrimeModulus,
}

impl FieldElement {
    /// Reduces `value` modulo d.
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        FieldElement {
            value: value % modulus.0,
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse via Fermat's little theorem (a^(d-2) mod d).
    pub fn inverse(self) -> Result<Self, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(FieldElement {
            value: pow_mod(self.value, self.modulus.0 - 2, self.modulus.0),
            modulus: self.modulus,
        })
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch in addition");
        FieldElement {
            value: (self.value + rhs.value) % self.modulus.0,
            modulus: self.modulus,
        }
    }
}

impl std::ops::Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch in subtraction");
        FieldElement {
            value: (self.value + self.modulus.0 - rhs.value) % self.modulus.0,
            modulus: self.modulus,
        }
    }
}

impl std::ops::Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch in multiplication");
        FieldElement {
            value: mul_mod(self.value, rhs.value, self.modulus.0),
            modulus: self.modulus,
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.value)
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}
