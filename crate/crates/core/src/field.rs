//! Prime-field scalar arithmetic.
//!
//! Scalars are canonical residues `0..p` stored as `u64`. GF(2) is the
//! default and the performance-critical case; the linear algebra layer
//! switches to bit-packed columns when `characteristic() == 2`.

use alloc::format;

use crate::{Error, Result};

/// A finite prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec { p: 2 }
    }
}

impl FieldSpec {
    /// GF(2).
    pub const GF2: FieldSpec = FieldSpec { p: 2 };

    /// Constructs GF(p), validating that `p` is prime.
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(FieldSpec { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn is_gf2(&self) -> bool {
        self.p == 2
    }

    /// Reduces an arbitrary integer into canonical residue form.
    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Multiplicative inverse of a nonzero residue (Fermat).
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0 && a < self.p);
        self.pow(a, self.p - 2)
    }

    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b))
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        if self.p == 2 {
            return base;
        }
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_validation() {
        assert!(FieldSpec::new(2).is_ok());
        assert!(FieldSpec::new(3).is_ok());
        assert!(FieldSpec::new(101).is_ok());
        assert!(FieldSpec::new(1).is_err());
        assert!(FieldSpec::new(4).is_err());
        assert!(FieldSpec::new(91).is_err()); // 7 * 13
    }

    #[test]
    fn arithmetic_mod_7() {
        let f = FieldSpec::new(7).unwrap();
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.mul(3, 5), 1);
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn gf2_inverse() {
        let f = FieldSpec::GF2;
        assert_eq!(f.inv(1), 1);
        assert_eq!(f.neg(1), 1);
    }
}
