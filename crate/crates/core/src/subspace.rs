//! Subspaces of F_q^n in reduced row echelon form.
//!
//! A [`Subspace`] stores its RREF basis row-major, one byte per field element.
//! The derived ordering compares `(n, k, rows)` lexicographically, which is the
//! canonical order used everywhere (enumeration, chain terms, matrix indices).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: u8,
    k: u8,
    rows: Box<[u8]>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Span{{")?;
        for (i, r) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}<F^{}>", self.n)
    }
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            n: n as u8,
            k: 0,
            rows: Box::new([]),
        }
    }

    pub fn ambient(n: usize) -> Self {
        let mut rows = vec![0u8; n * n];
        for i in 0..n {
            rows[i * n + i] = 1;
        }
        Subspace {
            n: n as u8,
            k: n as u8,
            rows: rows.into(),
        }
    }

    /// Span of the standard basis vectors `e_i` for the given zero-based indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let mut rows = vec![0u8; idx.len() * n];
        for (r, &i) in idx.iter().enumerate() {
            rows[r * n + i] = 1;
        }
        Subspace {
            n: n as u8,
            k: idx.len() as u8,
            rows: rows.into(),
        }
    }

    /// Canonical subspace spanned by `rows` (the `rref` operation).
    pub fn span<R: AsRef<[u8]>>(field: &Field, n: usize, rows: &[R]) -> Self {
        let mut mat: Vec<Vec<u8>> = rows.iter().map(|r| r.as_ref().to_vec()).collect();
        for r in &mat {
            debug_assert_eq!(r.len(), n);
        }
        let rank = echelonize(field, &mut mat);
        mat.truncate(rank);
        Subspace {
            n: n as u8,
            k: rank as u8,
            rows: mat.concat().into(),
        }
    }

    /// Like [`Subspace::span`] but validates vector lengths and entries.
    pub fn try_span<R: AsRef<[u8]>>(field: &Field, n: usize, rows: &[R]) -> Result<Self> {
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::AmbientMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            if let Some(&x) = r.iter().find(|&&x| x as u32 >= field.q()) {
                return Err(Error::InvalidVector(format!(
                    "entry {x} is not an element of F_{}",
                    field.q()
                )));
            }
        }
        Ok(Self::span(field, n, rows))
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.k as usize
    }

    pub fn row(&self, i: usize) -> &[u8] {
        let n = self.n as usize;
        &self.rows[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        let n = self.n.max(1) as usize;
        self.rows.chunks(n).take(self.k as usize)
    }

    pub fn rows_vec(&self) -> Vec<Vec<u8>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// Pivot column of every row.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows()
            .map(|r| r.iter().position(|&x| x != 0).expect("zero row in RREF"))
            .collect()
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch {
                expected: self.n as usize,
                found: other.n as usize,
            });
        }
        Ok(())
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the subspace.
    pub fn reduce(&self, field: &Field, v: &mut [u8]) {
        for (r, piv) in self.rows().zip(self.pivots()) {
            let c = v[piv];
            if c != 0 {
                field.axpy(field.neg(c), r, v);
            }
        }
    }

    pub fn contains_vector(&self, field: &Field, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(field, &mut w);
        w.iter().all(|&x| x == 0)
    }

    /// `true` iff `other ⊆ self`.
    pub fn contains(&self, field: &Field, other: &Subspace) -> Result<bool> {
        self.check_same_ambient(other)?;
        Ok(self.contains_unchecked(field, other))
    }

    pub(crate) fn contains_unchecked(&self, field: &Field, other: &Subspace) -> bool {
        other.k <= self.k && other.rows().all(|r| self.contains_vector(field, r))
    }

    pub fn sum(&self, field: &Field, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        let rows: Vec<&[u8]> = self.rows().chain(other.rows()).collect();
        Ok(Subspace::span(field, self.n as usize, &rows))
    }

    /// `self ∩ other`, computed as `(self^⊥ + other^⊥)^⊥`.
    pub fn intersect(&self, field: &Field, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        let s = self.perp(field).sum(field, &other.perp(field))?;
        Ok(s.perp(field))
    }

    /// Orthogonal complement under `⟨x,y⟩ = Σ x_i y_i`.
    pub fn perp(&self, field: &Field) -> Subspace {
        let n = self.n as usize;
        let pivots = self.pivots();
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(n - self.dim());
        for j in (0..n).filter(|&j| !is_pivot[j]) {
            let mut v = vec![0u8; n];
            v[j] = 1;
            for (r, &p) in self.rows().zip(&pivots) {
                v[p] = field.neg(r[j]);
            }
            basis.push(v);
        }
        Subspace::span(field, n, &basis)
    }

    /// Every vector of the subspace (q^k of them), zero first.
    pub fn vectors(&self, field: &Field) -> Vec<Vec<u8>> {
        let n = self.n as usize;
        let mut out = vec![vec![0u8; n]];
        for r in self.rows() {
            let mut next = Vec::with_capacity(out.len() * field.q() as usize);
            for c in field.elements() {
                for v in &out {
                    let mut w = v.clone();
                    field.axpy(c, r, &mut w);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }

    /// Image of a vector of coordinates `coeffs` (length `k`) under the basis.
    pub fn combine(&self, field: &Field, coeffs: &[u8]) -> Vec<u8> {
        let mut v = vec![0u8; self.n as usize];
        for (r, &c) in self.rows().zip(coeffs) {
            field.axpy(c, r, &mut v);
        }
        v
    }

    /// All codimension-one subspaces, in canonical order.
    pub fn codim1_subspaces(&self, field: &Field) -> Vec<Subspace> {
        let k = self.dim();
        if k == 0 {
            return Vec::new();
        }
        let mut out: Vec<Subspace> = enumerate_grassmannian(field, k, k - 1)
            .into_iter()
            .map(|h| {
                let rows: Vec<Vec<u8>> = h.rows().map(|c| self.combine(field, c)).collect();
                Subspace::span(field, self.n as usize, &rows)
            })
            .collect();
        out.sort();
        out
    }

    /// All subspaces of the ambient containing `self` with one more dimension.
    pub fn superspaces(&self, field: &Field) -> Vec<Subspace> {
        self.superspaces_within_unchecked(field, &Subspace::ambient(self.n as usize))
    }

    /// Superspaces of dimension `k+1` that lie inside `h`.
    pub fn superspaces_within(&self, field: &Field, h: &Subspace) -> Result<Vec<Subspace>> {
        self.check_same_ambient(h)?;
        if !h.contains_unchecked(field, self) {
            return Ok(Vec::new());
        }
        Ok(self.superspaces_within_unchecked(field, h))
    }

    pub(crate) fn superspaces_within_unchecked(&self, field: &Field, h: &Subspace) -> Vec<Subspace> {
        let n = self.n as usize;
        let complement = self.complement_in(field, h);
        let r = complement.len();
        if r == 0 {
            return Vec::new();
        }
        let own: Vec<&[u8]> = self.rows().collect();
        let mut out: Vec<Subspace> = enumerate_grassmannian(field, r, 1)
            .into_iter()
            .map(|line| {
                let coeffs = line.row(0);
                let mut v = vec![0u8; n];
                for (c, w) in coeffs.iter().zip(&complement) {
                    field.axpy(*c, w, &mut v);
                }
                let mut rows = own.clone();
                rows.push(&v);
                Subspace::span(field, n, &rows)
            })
            .collect();
        out.sort();
        out
    }

    /// Rows of `h` that extend a basis of `self` to a basis of `h` (assumes `self ⊆ h`).
    fn complement_in(&self, field: &Field, h: &Subspace) -> Vec<Vec<u8>> {
        let mut acc = self.clone();
        let mut out = Vec::new();
        for r in h.rows() {
            if !acc.contains_vector(field, r) {
                out.push(r.to_vec());
                let rows: Vec<&[u8]> = acc.rows().chain(std::iter::once(r)).collect();
                acc = Subspace::span(field, self.n as usize, &rows);
            }
        }
        out
    }

    /// Checks the RREF invariants and that every entry is a field element.
    pub fn validate(&self, field: &Field) -> Result<()> {
        if self.rows.iter().any(|&x| x as u32 >= field.q()) {
            return Err(Error::InvalidVector(format!(
                "entry outside F_{}",
                field.q()
            )));
        }
        let canon = Subspace::span(field, self.n as usize, &self.rows_vec());
        if &canon != self {
            return Err(Error::Parse("rows are not in reduced row echelon form".into()));
        }
        Ok(())
    }
}

/// In-place Gauss-Jordan elimination. Returns the rank; the first `rank` rows
/// of `mat` hold the RREF basis afterwards.
pub fn echelonize(field: &Field, mat: &mut [Vec<u8>]) -> usize {
    if mat.is_empty() {
        return 0;
    }
    let n = mat[0].len();
    if field.q() == 2 && n <= 64 {
        return echelonize_f2(mat, n);
    }
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..mat.len()).find(|&i| mat[i][col] != 0) else {
            continue;
        };
        mat.swap(rank, piv);
        let inv = field.inv(mat[rank][col]);
        for x in mat[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = mat[rank].clone();
        for (i, row) in mat.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let c = field.neg(row[col]);
                field.axpy(c, &pivot_row, row);
            }
        }
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    rank
}

/// F_2 elimination on bit-packed words (bit `j` is coordinate `j`).
fn echelonize_f2(mat: &mut [Vec<u8>], n: usize) -> usize {
    let mut words: Vec<u64> = mat
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold(0u64, |w, (j, &x)| w | ((x as u64 & 1) << j))
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let bit = 1u64 << col;
        let Some(piv) = (rank..words.len()).find(|&i| words[i] & bit != 0) else {
            continue;
        };
        words.swap(rank, piv);
        let p = words[rank];
        for (i, w) in words.iter_mut().enumerate() {
            if i != rank && *w & bit != 0 {
                *w ^= p;
            }
        }
        rank += 1;
        if rank == words.len() {
            break;
        }
    }
    for (row, w) in mat.iter_mut().zip(&words) {
        for (j, x) in row.iter_mut().enumerate() {
            *x = ((w >> j) & 1) as u8;
        }
    }
    rank
}

/// All `k`-dimensional subspaces of F_q^n in canonical order.
///
/// Generated by recursion over pivot patterns, so every RREF matrix is built
/// exactly once; the final sort puts them in lexicographic order.
pub fn enumerate_grassmannian(field: &Field, n: usize, k: usize) -> Vec<Subspace> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    choose_pivots(field, n, k, 0, &mut pivots, &mut out);
    out.sort();
    out
}

fn choose_pivots(
    field: &Field,
    n: usize,
    k: usize,
    start: usize,
    pivots: &mut Vec<usize>,
    out: &mut Vec<Subspace>,
) {
    if pivots.len() == k {
        fill_free_entries(field, n, pivots, out);
        return;
    }
    let remaining = k - pivots.len();
    for c in start..=(n - remaining) {
        pivots.push(c);
        choose_pivots(field, n, k, c + 1, pivots, out);
        pivots.pop();
    }
}

fn fill_free_entries(field: &Field, n: usize, pivots: &[usize], out: &mut Vec<Subspace>) {
    let k = pivots.len();
    let mut is_pivot = vec![false; n];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let mut base = vec![0u8; k * n];
    let mut free = Vec::new();
    for (i, &p) in pivots.iter().enumerate() {
        base[i * n + p] = 1;
        for j in (p + 1)..n {
            if !is_pivot[j] {
                free.push(i * n + j);
            }
        }
    }
    let q = field.q() as u8;
    let mut counter = vec![0u8; free.len()];
    loop {
        let mut rows = base.clone();
        for (&pos, &v) in free.iter().zip(&counter) {
            rows[pos] = v;
        }
        out.push(Subspace {
            n: n as u8,
            k: k as u8,
            rows: rows.into(),
        });
        // odometer
        let mut i = 0;
        loop {
            if i == counter.len() {
                return;
            }
            counter[i] += 1;
            if counter[i] < q {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    n: usize,
    k: usize,
    rows: Vec<Vec<u32>>,
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceJson {
            n: self.ambient_dim(),
            k: self.dim(),
            rows: self
                .rows()
                .map(|r| r.iter().map(|&x| x as u32).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    /// Structural checks only; entries are checked against a field by [`Subspace::validate`].
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SubspaceJson::deserialize(d)?;
        if raw.n > 255 || raw.k > raw.n || raw.rows.len() != raw.k {
            return Err(D::Error::custom("inconsistent n/k/rows"));
        }
        let mut data = Vec::with_capacity(raw.n * raw.k);
        let mut last_pivot: Option<usize> = None;
        let mut pivots = Vec::new();
        for r in &raw.rows {
            if r.len() != raw.n || r.iter().any(|&x| x > 255) {
                return Err(D::Error::custom("row has wrong length or entry > 255"));
            }
            let p = r
                .iter()
                .position(|&x| x != 0)
                .ok_or_else(|| D::Error::custom("zero row"))?;
            if r[p] != 1 || last_pivot.is_some_and(|lp| p <= lp) {
                return Err(D::Error::custom("rows are not in reduced row echelon form"));
            }
            last_pivot = Some(p);
            pivots.push(p);
            data.extend(r.iter().map(|&x| x as u8));
        }
        for (i, &p) in pivots.iter().enumerate() {
            for (j, r) in raw.rows.iter().enumerate() {
                if j != i && r[p] != 0 {
                    return Err(D::Error::custom("pivot column not cleared"));
                }
            }
        }
        Ok(Subspace {
            n: raw.n as u8,
            k: raw.k as u8,
            rows: data.into(),
        })
    }
}
