//! The complete q-complex Gr(F_q^n) with lazily materialized levels.

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::budget;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::qnum::gaussian_binomial;
use crate::subspace::{enumerate_grassmannian, Subspace};

struct Level {
    spaces: Vec<Subspace>,
    index: HashMap<Subspace, u32>,
}

/// All subspaces of F_q^n, graded by dimension.
///
/// Levels, their index maps, and the face incidences are built on first use and
/// shared afterwards; every accessor is safe to call from many threads.
pub struct Ambient {
    field: Field,
    n: usize,
    levels: Vec<OnceLock<Level>>,
    faces: Vec<OnceLock<Vec<Box<[u32]>>>>,
    cofaces: Vec<OnceLock<Vec<Box<[u32]>>>>,
}

impl std::fmt::Debug for Ambient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ambient(F_{}^{})", self.field.q(), self.n)
    }
}

impl Ambient {
    pub fn new(field: Field, n: usize) -> Self {
        Ambient {
            field,
            n,
            levels: (0..=n).map(|_| OnceLock::new()).collect(),
            faces: (0..=n).map(|_| OnceLock::new()).collect(),
            cofaces: (0..=n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn with_q(q: u32, n: usize) -> Result<Self> {
        if n > 64 {
            return Err(Error::InvalidArgument(format!("ambient dimension {n} exceeds 64")));
        }
        Ok(Ambient::new(Field::new(q)?, n))
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.q()
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k > self.n {
            return Err(Error::LevelMismatch {
                expected: self.n,
                found: k,
            });
        }
        Ok(())
    }

    /// `|Gr_k(n)|`, without materializing anything.
    pub fn level_size(&self, k: usize) -> u128 {
        let g = gaussian_binomial(self.n as u64, k as u64, self.q() as u64);
        u128::try_from(g).unwrap_or(u128::MAX)
    }

    fn level_data(&self, k: usize) -> Result<&Level> {
        self.check_level(k)?;
        if let Some(l) = self.levels[k].get() {
            return Ok(l);
        }
        budget::check("subspaces", self.level_size(k))?;
        Ok(self.levels[k].get_or_init(|| {
            let spaces = enumerate_grassmannian(&self.field, self.n, k);
            let index = spaces
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i as u32))
                .collect();
            Level { spaces, index }
        }))
    }

    /// `Gr_k(n)` in canonical order.
    pub fn level(&self, k: usize) -> Result<&[Subspace]> {
        Ok(&self.level_data(k)?.spaces)
    }

    /// Position of `u` inside its level.
    pub fn index_of(&self, u: &Subspace) -> Result<usize> {
        if u.ambient_dim() != self.n {
            return Err(Error::AmbientMismatch {
                expected: self.n,
                found: u.ambient_dim(),
            });
        }
        let l = self.level_data(u.dim())?;
        l.index
            .get(u)
            .map(|&i| i as usize)
            .ok_or_else(|| Error::Parse("subspace is not in canonical form".into()))
    }

    /// For each `U` in level `k`, the sorted indices of its codimension-one
    /// subspaces in level `k-1`. Empty rows at `k = 0`.
    pub fn faces(&self, k: usize) -> Result<&[Box<[u32]>]> {
        self.check_level(k)?;
        if let Some(f) = self.faces[k].get() {
            return Ok(f);
        }
        let spaces = self.level(k)?;
        if k == 0 {
            return Ok(self.faces[0].get_or_init(|| vec![Box::from([]); spaces.len()]));
        }
        let lower = self.level_data(k - 1)?;
        budget::check(
            "incidences",
            spaces.len() as u128 * crate::qnum::gauss(k, 1, self.q()) as u128,
        )?;
        Ok(self.faces[k].get_or_init(|| {
            spaces
                .par_iter()
                .map(|u| {
                    let mut idx: Vec<u32> = u
                        .codim1_subspaces(&self.field)
                        .iter()
                        .map(|w| lower.index[w])
                        .collect();
                    idx.sort_unstable();
                    idx.into_boxed_slice()
                })
                .collect()
        }))
    }

    /// For each `W` in level `k`, the sorted indices of the `(k+1)`-spaces
    /// containing it. Empty rows at `k = n`.
    pub fn cofaces(&self, k: usize) -> Result<&[Box<[u32]>]> {
        self.check_level(k)?;
        if let Some(c) = self.cofaces[k].get() {
            return Ok(c);
        }
        let size = self.level(k)?.len();
        if k == self.n {
            return Ok(self.cofaces[k].get_or_init(|| vec![Box::from([]); size]));
        }
        let up = self.faces(k + 1)?;
        Ok(self.cofaces[k].get_or_init(|| {
            let mut rows: Vec<Vec<u32>> = vec![Vec::new(); size];
            for (j, f) in up.iter().enumerate() {
                for &i in f.iter() {
                    rows[i as usize].push(j as u32);
                }
            }
            rows.into_iter().map(Vec::into_boxed_slice).collect()
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::gauss;

    #[test]
    fn incidence_counts() {
        let a = Ambient::with_q(2, 4).unwrap();
        for k in 0..=4 {
            assert_eq!(a.level(k).unwrap().len() as u64, gauss(4, k, 2));
            for f in a.faces(k).unwrap() {
                assert_eq!(f.len() as u64, if k == 0 { 0 } else { gauss(k, 1, 2) });
            }
            for c in a.cofaces(k).unwrap() {
                assert_eq!(c.len() as u64, gauss(4 - k, 1, 2));
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let a = Ambient::with_q(3, 3).unwrap();
        for (i, u) in a.level(1).unwrap().iter().enumerate() {
            assert_eq!(a.index_of(u).unwrap(), i);
        }
        assert!(a.level(4).is_err());
        assert!(a.index_of(&Subspace::zero(2)).is_err());
    }
}
