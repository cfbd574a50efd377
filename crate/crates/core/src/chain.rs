//! Finitely supported chains and cochains over Z/m.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::ModRing;
use crate::subspace::Subspace;

/// A `k`-chain in F_q^n with coefficients in Z/m.
///
/// Terms are kept in canonical subspace order with zero coefficients dropped,
/// so `len()` is the support size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    n: usize,
    k: usize,
    ring: ModRing,
    terms: BTreeMap<Subspace, u32>,
}

/// On the finite complete complex a cochain is identified with the chain
/// `Σ α(W)·W` via the Kronecker deltas δ_W.
pub type Cochain = Chain;

impl Chain {
    pub fn zero(n: usize, k: usize, ring: ModRing) -> Self {
        Chain {
            n,
            k,
            ring,
            terms: BTreeMap::new(),
        }
    }

    /// `c·U`.
    pub fn generator(u: Subspace, coeff: u32, ring: ModRing) -> Self {
        let mut c = Chain::zero(u.ambient_dim(), u.dim(), ring);
        c.add_term(u, coeff);
        c
    }

    /// Builds a chain from terms, checking every subspace sits at `(n, k)`.
    pub fn from_terms<I>(n: usize, k: usize, ring: ModRing, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subspace, i64)>,
    {
        let mut c = Chain::zero(n, k, ring);
        for (u, x) in terms {
            if u.ambient_dim() != n {
                return Err(Error::AmbientMismatch {
                    expected: n,
                    found: u.ambient_dim(),
                });
            }
            if u.dim() != k {
                return Err(Error::LevelMismatch {
                    expected: k,
                    found: u.dim(),
                });
            }
            c.add_term(u, ring.reduce(x));
        }
        Ok(c)
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn level(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn ring(&self) -> ModRing {
        self.ring
    }

    /// Support size `|α|`.
    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, u: &Subspace) -> u32 {
        self.terms.get(u).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Subspace, u32)> {
        self.terms.iter().map(|(u, &c)| (u, c))
    }

    pub fn support(&self) -> impl Iterator<Item = &Subspace> {
        self.terms.keys()
    }

    /// Adds `c·U`. `U` must have the chain's level and ambient.
    pub fn add_term(&mut self, u: Subspace, c: u32) {
        debug_assert_eq!(u.dim(), self.k);
        debug_assert_eq!(u.ambient_dim(), self.n);
        let c = c % self.ring.modulus();
        if c == 0 {
            return;
        }
        let ring = self.ring;
        match self.terms.entry(u) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = ring.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Chain) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                expected: self.ring.modulus(),
                found: other.ring.modulus(),
            });
        }
        if self.n != other.n {
            return Err(Error::AmbientMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.k != other.k {
            return Err(Error::LevelMismatch {
                expected: self.k,
                found: other.k,
            });
        }
        Ok(())
    }

    /// `self + c·other`.
    pub fn add_scaled(&mut self, c: u32, other: &Chain) -> Result<()> {
        self.check_compatible(other)?;
        for (u, x) in other.iter() {
            self.add_term(u.clone(), self.ring.mul(c, x));
        }
        Ok(())
    }

    pub fn plus(&self, other: &Chain) -> Result<Chain> {
        let mut out = self.clone();
        out.add_scaled(1, other)?;
        Ok(out)
    }

    pub fn minus(&self, other: &Chain) -> Result<Chain> {
        let mut out = self.clone();
        out.add_scaled(self.ring.neg(1), other)?;
        Ok(out)
    }

    pub fn scaled(&self, c: u32) -> Chain {
        let mut out = Chain::zero(self.n, self.k, self.ring);
        for (u, x) in self.iter() {
            out.add_term(u.clone(), self.ring.mul(c, x));
        }
        out
    }

    pub fn negated(&self) -> Chain {
        self.scaled(self.ring.neg(1))
    }

    /// Keeps the terms whose subspace satisfies `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&Subspace) -> bool) -> Chain {
        Chain {
            n: self.n,
            k: self.k,
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .filter(|(u, _)| keep(u))
                .map(|(u, &c)| (u.clone(), c))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("chain serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Chain> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    subspace: Subspace,
    coeff: u32,
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    n: usize,
    k: usize,
    m: u32,
    terms: Vec<TermJson>,
}

impl Serialize for Chain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChainJson {
            n: self.n,
            k: self.k,
            m: self.ring.modulus(),
            terms: self
                .iter()
                .map(|(u, c)| TermJson {
                    subspace: u.clone(),
                    coeff: c,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Chain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ChainJson::deserialize(d)?;
        let ring = ModRing::new(raw.m).map_err(D::Error::custom)?;
        Chain::from_terms(
            raw.n,
            raw.k,
            ring,
            raw.terms.into_iter().map(|t| (t.subspace, t.coeff as i64)),
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn zero_coefficients_are_dropped() {
        let r = ModRing::new(3).unwrap();
        let u = Subspace::coordinate(2, &[0]);
        let mut c = Chain::generator(u.clone(), 2, r);
        assert_eq!(c.len(), 1);
        c.add_term(u.clone(), 1);
        assert!(c.is_empty());
        c.add_term(u.clone(), 3);
        assert!(c.is_empty());
        assert_eq!(Chain::generator(u, 5, r).get(&Subspace::coordinate(2, &[0])), 2);
    }

    #[test]
    fn arithmetic_checks_compatibility() {
        let r3 = ModRing::new(3).unwrap();
        let r5 = ModRing::new(5).unwrap();
        let a = Chain::generator(Subspace::coordinate(2, &[0]), 1, r3);
        let b = Chain::generator(Subspace::coordinate(2, &[1]), 1, r5);
        assert!(matches!(a.plus(&b), Err(Error::RingMismatch { .. })));
        let c = Chain::generator(Subspace::zero(2), 1, r3);
        assert!(matches!(a.plus(&c), Err(Error::LevelMismatch { .. })));
        assert!(a.minus(&a).unwrap().is_empty());
    }

    #[test]
    fn json_is_sorted_and_round_trips() {
        let f = Field::new(2).unwrap();
        let r = ModRing::new(3).unwrap();
        let l2 = Subspace::span(&f, 2, &[vec![1, 1]]);
        let l1 = Subspace::coordinate(2, &[1]);
        let c = Chain::from_terms(2, 1, r, [(l2, 2), (l1, -1)]).unwrap();
        let js = c.to_json();
        assert_eq!(
            js,
            r#"{"n":2,"k":1,"m":3,"terms":[{"subspace":{"n":2,"k":1,"rows":[[0,1]]},"coeff":2},{"subspace":{"n":2,"k":1,"rows":[[1,1]]},"coeff":2}]}"#
        );
        assert_eq!(Chain::from_json(&js).unwrap(), c);
        assert!(Chain::from_json(r#"{"n":2,"k":2,"m":3,"terms":[{"subspace":{"n":2,"k":1,"rows":[[0,1]]},"coeff":2}]}"#).is_err());
    }
}
