//! Finite fields F_q with table arithmetic.
//!
//! Elements are indices `0..q`. For `q = p^e` with `e > 1` the index of
//! `a_0 + a_1 x + ... + a_{e-1} x^{e-1}` is `sum a_i p^i`, and multiplication
//! reduces modulo the Conway polynomial of degree `e` over F_p. The table of
//! moduli below covers every prime power up to 256.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Conway polynomials, coefficients listed from the constant term upwards.
const CONWAY: &[(u32, u32, &[u8])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 2, &[3, 6, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 2, &[2, 12, 1]),
];

/// Returns `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

pub fn is_prime(m: u32) -> bool {
    matches!(prime_power(m), Some((_, 1)))
}

#[derive(Debug)]
struct Tables {
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// The finite field F_q. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    q: u32,
    p: u32,
    e: u32,
    modulus: Vec<u8>,
    tables: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for Field {}

#[derive(Serialize)]
struct FieldSummary<'a> {
    q: u32,
    p: u32,
    e: u32,
    modulus: &'a [u8],
}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSummary {
            q: self.q,
            p: self.p,
            e: self.e,
            modulus: &self.modulus,
        }
        .serialize(s)
    }
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > 256 {
            return Err(Error::FieldTooLarge(q));
        }
        let modulus: Vec<u8> = if e == 1 {
            vec![0, 1]
        } else {
            CONWAY
                .iter()
                .find(|(pp, ee, _)| *pp == p && *ee == e)
                .map(|(_, _, c)| c.to_vec())
                .ok_or(Error::FieldTooLarge(q))?
        };
        let qs = q as usize;
        let digits = |x: usize| -> Vec<u32> {
            let mut v = Vec::with_capacity(e as usize);
            let mut x = x as u32;
            for _ in 0..e {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let undigits = |d: &[u32]| -> u8 {
            let mut x = 0u32;
            for &c in d.iter().rev() {
                x = x * p + c;
            }
            x as u8
        };
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..qs {
            let da = digits(a);
            for b in 0..qs {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = undigits(&sum);
                mul[a * qs + b] = if e == 1 {
                    ((a * b) % qs) as u8
                } else {
                    undigits(&poly_mulmod(&da, &db, &modulus, p))
                };
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..qs)
                    .find(|&b| mul[a * qs + b] == 1)
                    .ok_or_else(|| Error::Inconsistency(format!("no inverse of {a} in F_{q}")))?
                    as u8;
            }
        }
        Ok(Field {
            q,
            p,
            e,
            modulus,
            tables: Arc::new(Tables { add, mul, neg, inv }),
        })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Coefficients of the defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.tables.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.tables.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.tables.neg[a as usize]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero");
        self.tables.inv[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        (0..self.q).map(|x| x as u8)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = u8> {
        (1..self.q).map(|x| x as u8)
    }

    /// `x ↦ a·x + y` on whole rows.
    pub fn axpy(&self, a: u8, x: &[u8], y: &mut [u8]) {
        if a == 0 {
            return;
        }
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.add(*yi, self.mul(a, xi));
        }
    }

    pub fn dot(&self, x: &[u8], y: &[u8]) -> u8 {
        x.iter()
            .zip(y)
            .fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u8], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // modulus is monic; eliminate from the top.
    for deg in (e..2 * e).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for (k, &mk) in modulus[..e].iter().enumerate() {
            let t = deg - e + k;
            prod[t] = (prod[t] + (p - c) * mk as u32 % p) % p;
        }
    }
    prod.truncate(e);
    prod
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &Field) {
        let q = f.q() as u8;
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..q {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn f2_is_xor_and() {
        let f = Field::new(2).unwrap();
        for a in 0..2u8 {
            for b in 0..2u8 {
                assert_eq!(f.add(a, b), a ^ b);
                assert_eq!(f.mul(a, b), a & b);
            }
        }
    }

    #[test]
    fn f4_uses_x2_x_1() {
        let f = Field::new(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // x * x = x + 1  (index 2 is x, index 3 is x+1)
        assert_eq!(f.mul(2, 2), 3);
        check_axioms(&f);
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            check_axioms(&Field::new(q).unwrap());
        }
    }

    #[test]
    fn every_extension_modulus_is_primitive() {
        // The class of x must have multiplicative order q-1, which also forces irreducibility.
        for &(p, e, _) in CONWAY {
            let q = p.pow(e);
            let f = Field::new(q).unwrap();
            let x = p as u8; // index of the polynomial x
            let mut acc = 1u8;
            let mut order = 0;
            loop {
                acc = f.mul(acc, x);
                order += 1;
                if acc == 1 {
                    break;
                }
                assert!(order < q, "x has no finite order in F_{q}");
            }
            assert_eq!(order, q - 1, "modulus for F_{q} is not primitive");
        }
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert_eq!(Field::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(Field::new(1).unwrap_err(), Error::NotPrimePower(1));
        assert_eq!(Field::new(12).unwrap_err(), Error::NotPrimePower(12));
        assert!(Field::new(6).unwrap_err().to_string().contains("not a prime power"));
    }

    #[test]
    fn prime_power_decomposition() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(256), Some((2, 8)));
        assert_eq!(prime_power(100), None);
        assert!(is_prime(13));
        assert!(!is_prime(9));
    }
}
