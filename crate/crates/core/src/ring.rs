use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The coefficient ring Z/m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModRing {
    m: u32,
}

impl ModRing {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::BadModulus(m));
        }
        Ok(ModRing { m })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.m
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.m as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.m as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.m as u64 - b as u64 % self.m as u64) % self.m as u64) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.m as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.m - a % self.m) % self.m
    }

    pub fn is_unit(self, a: u32) -> bool {
        a.gcd(&self.m) == 1
    }

    pub fn inv(self, a: u32) -> Option<u32> {
        let e = (a as i64).extended_gcd(&(self.m as i64));
        (e.gcd == 1).then(|| self.reduce(e.x))
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.m;
        base %= self.m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `(-1)^k` in the ring.
    pub fn sign(self, k: usize) -> u32 {
        if k.is_multiple_of(2) {
            1 % self.m
        } else {
            self.m - 1
        }
    }

    /// `m | q+1`, the condition for ∂² = 0.
    pub fn kills_q_plus_one(self, q: u32) -> bool {
        (q as u64 + 1).is_multiple_of(self.m as u64)
    }

    pub fn require_divides_q_plus_one(self, q: u32) -> Result<()> {
        if self.kills_q_plus_one(q) {
            Ok(())
        } else {
            Err(Error::ModulusMustDivide {
                m: self.m,
                q_plus_one: q + 1,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let r = ModRing::new(6).unwrap();
        assert_eq!(r.add(4, 5), 3);
        assert_eq!(r.sub(1, 4), 3);
        assert_eq!(r.neg(0), 0);
        assert_eq!(r.inv(5), Some(5));
        assert_eq!(r.inv(4), None);
        assert!(r.is_unit(5) && !r.is_unit(3));
        assert_eq!(r.pow(5, 3), 5);
        assert_eq!(r.sign(3), 5);
        assert_eq!(r.reduce(-7), 5);
        assert!(ModRing::new(1).is_err());
    }

    #[test]
    fn q_plus_one() {
        assert!(ModRing::new(3).unwrap().kills_q_plus_one(2));
        assert!(!ModRing::new(2).unwrap().kills_q_plus_one(2));
        assert!(ModRing::new(4).unwrap().kills_q_plus_one(3));
        assert!(ModRing::new(2)
            .unwrap()
            .require_divides_q_plus_one(2)
            .unwrap_err()
            .to_string()
            .contains("must divide q+1"));
    }
}
