//! Sparse matrices over Z/m and incremental echelon bases over F_p.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::ModRing;

/// A column-major sparse matrix with entries in Z/m.
///
/// Each column is a list of `(row, value)` pairs sorted by row with no zeros.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    modulus: u32,
    cols: Vec<Vec<(u32, u32)>>,
}

impl SparseMatrix {
    pub fn from_columns(nrows: usize, ring: ModRing, cols: Vec<Vec<(u32, u32)>>) -> Self {
        let m = ring.modulus();
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c.sort_unstable_by_key(|e| e.0);
                let mut out: Vec<(u32, u32)> = Vec::with_capacity(c.len());
                for (r, v) in c {
                    debug_assert!((r as usize) < nrows);
                    match out.last_mut() {
                        Some(last) if last.0 == r => last.1 = (last.1 + v) % m,
                        _ => out.push((r, v % m)),
                    }
                }
                out.retain(|e| e.1 != 0);
                out
            })
            .collect::<Vec<_>>();
        SparseMatrix {
            nrows,
            ncols: cols.len(),
            modulus: m,
            cols,
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn column(&self, j: usize) -> &[(u32, u32)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<(u32, u32)>] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Number of nonzeros in each row.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.nrows];
        for c in &self.cols {
            for &(r, _) in c {
                out[r as usize] += 1;
            }
        }
        out
    }

    /// `A x` for a dense vector `x` of length `ncols`.
    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.ncols);
        let m = self.modulus as u64;
        let mut acc = vec![0u64; self.nrows];
        for (c, &xj) in self.cols.iter().zip(x) {
            if xj == 0 {
                continue;
            }
            for &(r, v) in c {
                acc[r as usize] = (acc[r as usize] + v as u64 * xj as u64) % m;
            }
        }
        acc.into_iter().map(|v| v as u32).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(r, v) in c {
                cols[r as usize].push((j as u32, v));
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            modulus: self.modulus,
            cols,
        }
    }

    /// Product `self * other`, both over the same modulus.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols != other.nrows || self.modulus != other.modulus {
            return Err(Error::InvalidArgument("incompatible matrix product".into()));
        }
        let m = self.modulus as u64;
        let cols = other
            .cols
            .iter()
            .map(|c| {
                let mut acc: HashMap<u32, u64> = HashMap::new();
                for &(k, v) in c {
                    for &(r, w) in &self.cols[k as usize] {
                        let e = acc.entry(r).or_insert(0);
                        *e = (*e + v as u64 * w as u64) % m;
                    }
                }
                let mut out: Vec<(u32, u32)> = acc
                    .into_iter()
                    .filter(|e| e.1 != 0)
                    .map(|(r, v)| (r, v as u32))
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();
        Ok(SparseMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            modulus: self.modulus,
            cols,
        })
    }

    /// Row-major dense copy with entries reduced modulo `modulus` (which must
    /// divide the matrix modulus or equal it).
    pub fn to_dense(&self, modulus: u64) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; self.ncols]; self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(r, v) in c {
                out[r as usize][j] = v as u64 % modulus;
            }
        }
        out
    }

    /// Rank over F_p. `p` must be prime and divide the matrix modulus.
    ///
    /// Columns are inserted sparsest first, which keeps fill-in low on
    /// incidence matrices.
    pub fn rank_mod_p(&self, p: u32) -> usize {
        let mut order: Vec<usize> = (0..self.ncols).collect();
        order.sort_by_key(|&j| self.cols[j].len());
        let mut basis = FpBasis::new(p);
        for j in order {
            basis.insert(self.cols[j].iter().map(|&(r, v)| (r, v % p)).collect());
        }
        basis.rank()
    }
}

/// Echelon basis of a subspace of F_p^N, grown one sparse vector at a time.
///
/// Stored rows are normalized so their leading entry is 1; a vector lies in
/// the span iff eliminating leading entries reduces it to zero.
#[derive(Clone, Debug)]
pub struct FpBasis {
    p: u64,
    pivots: HashMap<u32, Vec<(u32, u32)>>,
}

impl FpBasis {
    pub fn new(p: u32) -> Self {
        FpBasis {
            p: p as u64,
            pivots: HashMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn inv(&self, a: u64) -> u64 {
        // p is prime, so a^(p-2) is the inverse
        let (mut base, mut exp, mut acc) = (a % self.p, self.p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }

    /// Eliminates leading entries until the leading column has no pivot.
    fn reduce(&self, mut v: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
        v.retain(|e| e.1 != 0);
        v.sort_unstable_by_key(|e| e.0);
        let p = self.p;
        while let Some(&(lead, c)) = v.first() {
            let Some(row) = self.pivots.get(&lead) else {
                break;
            };
            // v -= c * row
            let f = (p - c as u64) % p;
            let mut out = Vec::with_capacity(v.len() + row.len());
            let (mut i, mut j) = (0, 0);
            while i < v.len() || j < row.len() {
                let take_v = j == row.len() || (i < v.len() && v[i].0 < row[j].0);
                let take_r = i == v.len() || (j < row.len() && row[j].0 < v[i].0);
                if take_v {
                    out.push(v[i]);
                    i += 1;
                } else if take_r {
                    out.push((row[j].0, (f * row[j].1 as u64 % p) as u32));
                    j += 1;
                } else {
                    let x = (v[i].1 as u64 + f * row[j].1 as u64) % p;
                    if x != 0 {
                        out.push((v[i].0, x as u32));
                    }
                    i += 1;
                    j += 1;
                }
            }
            v = out;
        }
        v
    }

    /// Adds `v` to the basis; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<(u32, u32)>) -> bool {
        let v = self.reduce(v);
        let Some(&(lead, c)) = v.first() else {
            return false;
        };
        let ic = self.inv(c as u64);
        let row = v
            .into_iter()
            .map(|(r, x)| (r, (x as u64 * ic % self.p) as u32))
            .collect();
        self.pivots.insert(lead, row);
        true
    }

    pub fn contains(&self, v: Vec<(u32, u32)>) -> bool {
        self.reduce(v).is_empty()
    }
}
