//! Arithmetic in the prime field F_p.
//!
//! Everything downstream (differentials, actions, structure constants) is
//! exact arithmetic over F_p, so this module is deliberately small and
//! branch-light. Scalars are stored as residues in `[0, p)`.

use crate::error::FplinalgError;

/// Checks primality by trial division. Inputs here are small (p is a word).
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A scalar in F_p. The modulus travels with the value so that mixed-modulus
/// arithmetic is a loud error instead of silent garbage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    p: u32,
}

impl FpScalar {
    pub fn new(value: i64, p: u32) -> Result<Self, FplinalgError> {
        if !is_prime(p as u64) {
            return Err(FplinalgError::NotPrime(p));
        }
        Ok(Self::reduce(value, p))
    }

    /// Reduces an integer into `[0, p)` without re-checking primality.
    pub fn reduce(value: i64, p: u32) -> Self {
        let m = value.rem_euclid(p as i64) as u32;
        FpScalar { value: m, p }
    }

    pub fn zero(p: u32) -> Self {
        FpScalar { value: 0, p }
    }

    pub fn one(p: u32) -> Self {
        FpScalar { value: 1 % p, p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: Self) -> u32 {
        assert_eq!(self.p, other.p, "mixed moduli {} and {}", self.p, other.p);
        self.p
    }

    pub fn add(self, other: Self) -> Self {
        let p = self.check(other);
        FpScalar { value: add_mod(self.value, other.value, p), p }
    }

    pub fn sub(self, other: Self) -> Self {
        let p = self.check(other);
        FpScalar { value: sub_mod(self.value, other.value, p), p }
    }

    pub fn mul(self, other: Self) -> Self {
        let p = self.check(other);
        FpScalar { value: mul_mod(self.value, other.value, p), p }
    }

    pub fn neg(self) -> Self {
        FpScalar { value: neg_mod(self.value, self.p), p: self.p }
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(self) -> Result<Self, FplinalgError> {
        if self.value == 0 {
            return Err(FplinalgError::DivisionByZero);
        }
        Ok(FpScalar { value: inv_mod(self.value, self.p), p: self.p })
    }

    /// The scalar 1/2, which exists exactly when p is odd. Twisted group
    /// operations and odd-part antisymmetrization both need it.
    pub fn half(p: u32) -> Result<Self, FplinalgError> {
        if p == 2 {
            return Err(FplinalgError::EvenPrime);
        }
        Ok(FpScalar { value: inv_mod(2 % p, p), p })
    }
}

#[inline(always)]
pub fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline(always)]
pub fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline(always)]
pub fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline(always)]
pub fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

/// Inverse mod p by Fermat; p is prime and a nonzero.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc: u64 = 1;
    let mut b = base as u64 % p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    base = acc as u32;
    base
}

/// n! as an element of F_p; only valid for n < p.
pub fn factorial_mod(n: u32, p: u32) -> Result<u32, FplinalgError> {
    if n >= p {
        return Err(FplinalgError::FactorialOutOfRange { n, p });
    }
    let mut acc = 1u32;
    for k in 2..=n {
        acc = mul_mod(acc, k, p);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(is_prime(251));
        assert!(!is_prime(1));
        assert!(!is_prime(9));
        assert!(!is_prime(91));
    }

    #[test]
    fn field_ops_f5() {
        let a = FpScalar::new(7, 5).unwrap();
        let b = FpScalar::new(-1, 5).unwrap();
        assert_eq!(a.value(), 2);
        assert_eq!(b.value(), 4);
        assert_eq!(a.add(b).value(), 1);
        assert_eq!(a.sub(b).value(), 3);
        assert_eq!(a.mul(b).value(), 3);
        assert_eq!(a.inv().unwrap().mul(a).value(), 1);
    }

    #[test]
    fn half_exists_iff_odd() {
        let h = FpScalar::half(3).unwrap();
        assert_eq!(h.add(h).value(), 1);
        assert!(FpScalar::half(2).is_err());
    }

    #[test]
    fn inverses_all_nonzero_residues() {
        for p in [3u32, 5, 7, 11] {
            for a in 1..p {
                assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
            }
        }
    }

    #[test]
    fn factorial_bounds() {
        assert_eq!(factorial_mod(2, 3).unwrap(), 2);
        assert!(factorial_mod(3, 3).is_err());
        assert_eq!(factorial_mod(4, 5).unwrap(), 4); // 24 mod 5
    }
}
