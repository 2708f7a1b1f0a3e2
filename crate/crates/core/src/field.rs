//! Arithmetic in the prime field GF(p).
//!
//! The modulus is a runtime value so a single build handles any small prime.
//! Hot loops work on raw `u32` residues through [`PrimeField`]; the checked
//! [`FieldElement`] wrapper carries its modulus and refuses to mix fields.

use std::fmt;

use thiserror::Error;

/// Largest modulus accepted (exclusive).
pub const MAX_MODULUS: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} exceeds the supported bound {MAX_MODULUS}")]
    TooLarge(u32),
    #[error("field modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The field GF(p). Cheap to copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: 2 }
    }
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p >= MAX_MODULUS {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.p;
        if a == 0 {
            return None;
        }
        if self.p == 2 {
            return Some(1);
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.reduce(t0))
    }

    /// Signed representative in `(-p/2, p/2]`, used when re-reading
    /// coefficients under a different modulus.
    pub fn signed(self, a: u32) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    pub fn element(self, value: i64) -> FieldElement {
        FieldElement {
            value: self.reduce(value),
            modulus: self.p,
        }
    }
}

/// A residue together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn new(value: i64, modulus: u32) -> Result<Self, FieldError> {
        Ok(PrimeField::new(modulus)?.element(value))
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn field(self) -> PrimeField {
        PrimeField { p: self.modulus }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: Self) -> Result<PrimeField, FieldError> {
        if self.modulus != other.modulus {
            return Err(FieldError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(self.field())
    }

    pub fn add(self, other: Self) -> Result<Self, FieldError> {
        let f = self.same_field(other)?;
        Ok(FieldElement {
            value: f.add(self.value, other.value),
            modulus: self.modulus,
        })
    }

    pub fn sub(self, other: Self) -> Result<Self, FieldError> {
        let f = self.same_field(other)?;
        Ok(FieldElement {
            value: f.sub(self.value, other.value),
            modulus: self.modulus,
        })
    }

    pub fn mul(self, other: Self) -> Result<Self, FieldError> {
        let f = self.same_field(other)?;
        Ok(FieldElement {
            value: f.mul(self.value, other.value),
            modulus: self.modulus,
        })
    }

    pub fn neg(self) -> Self {
        FieldElement {
            value: self.field().neg(self.value),
            modulus: self.modulus,
        }
    }

    pub fn inverse(self) -> Result<Self, FieldError> {
        let value = self.field().inv(self.value).ok_or(FieldError::ZeroInverse)?;
        Ok(FieldElement {
            value,
            modulus: self.modulus,
        })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: i64, p: u32) -> FieldElement {
        FieldElement::new(v, p).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(el(1, 2).add(el(1, 2)).unwrap().value(), 0);
        assert_eq!(el(3, 5).add(el(4, 5)).unwrap().value(), 2);
        assert_eq!(el(0, 2).add(el(1, 2)).unwrap().value(), 1);
    }

    #[test]
    fn mixing_moduli_is_an_error() {
        assert_eq!(
            el(1, 3).add(el(1, 5)),
            Err(FieldError::ModulusMismatch { left: 3, right: 5 })
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(el(1, 2).inverse().unwrap().value(), 1);
        assert_eq!(el(2, 5).inverse().unwrap().value(), 3);
        // exhaustive search over residues mod 7
        let expected = (1..7).find(|b| (3 * b) % 7 == 1).unwrap();
        assert_eq!(expected, 5);
        assert_eq!(el(3, 7).inverse().unwrap().value(), expected as u32);
        assert_eq!(el(0, 7).inverse(), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn modulus_validation() {
        assert_eq!(PrimeField::new(4), Err(FieldError::NotPrime(4)));
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(PrimeField::new(65537), Err(FieldError::TooLarge(65537)));
        assert!(PrimeField::new(65521).is_ok());
    }

    #[test]
    fn field_axioms_small_primes() {
        for p in [2u32, 3, 5, 7] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..p {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..p {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    for c in 0..p {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn signed_representatives() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.signed(4), -1);
        assert_eq!(f.signed(2), 2);
        assert_eq!(f.signed(3), -2);
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(f2.signed(1), 1);
    }
}
