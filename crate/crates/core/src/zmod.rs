//! Module computations over Z/m for composite m.
//!
//! Z/m splits as a product of local rings Z/p^a, and over a local ring every
//! matrix has a Smith form with diagonal entries p^v. Kernels, span sizes and
//! quotient structure are computed prime by prime and recombined.

use crate::budget;
use crate::error::{Error, Result};

/// Largest dimension accepted by the dense local Smith form.
pub const MAX_DENSE_DIM: usize = 2000;

/// Prime factorization `[(p, a)]` of `m`, primes ascending.
pub fn factor(mut m: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut a = 0;
            while m.is_multiple_of(p) {
                m /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn valuation(x: u64, p: u64, a: u32) -> u32 {
    if x == 0 {
        return a;
    }
    let mut v = 0;
    let mut x = x;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (m as i128, a as i128);
    while nr != 0 {
        let qt = r / nr;
        (t, nt) = (nt, t - qt * nt);
        (r, nr) = (nr, r - qt * nr);
    }
    debug_assert_eq!(r, 1, "not a unit");
    t.rem_euclid(m as i128) as u64
}

/// Result of a Smith reduction over Z/p^a.
struct LocalSmith {
    /// Valuations of the nonzero diagonal entries, in pivot order.
    vals: Vec<u32>,
    /// Column transform `R` (`ncols × ncols`, row-major) with `L A R = D`.
    right: Option<Vec<Vec<u64>>>,
}

/// Smith reduction of a dense row-major matrix over Z/p^a.
fn local_smith(mut a: Vec<Vec<u64>>, ncols: usize, p: u64, e: u32, track: bool) -> LocalSmith {
    let pa = p.pow(e);
    let nrows = a.len();
    let mut right = track.then(|| {
        (0..ncols)
            .map(|i| {
                let mut r = vec![0u64; ncols];
                r[i] = 1;
                r
            })
            .collect::<Vec<_>>()
    });
    let mut vals = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // pivot of least valuation in the remaining block
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in t..nrows {
            for j in t..ncols {
                let x = a[i][j];
                if x == 0 {
                    continue;
                }
                let v = valuation(x, p, e);
                if best.is_none_or(|b| v < b.0) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            break;
        };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            if let Some(r) = right.as_mut() {
                for row in r.iter_mut() {
                    row.swap(t, pj);
                }
            }
        }
        let pv = p.pow(v);
        let unit_inv = inv_mod(a[t][t] / pv, pa);
        // clear column t below the pivot
        for i in t + 1..nrows {
            let x = a[i][t];
            if x == 0 {
                continue;
            }
            let f = (x / pv) % pa * unit_inv % pa;
            let (head, tail) = a.split_at_mut(i);
            let prow = &head[t];
            let row = &mut tail[0];
            for j in t..ncols {
                if prow[j] != 0 {
                    row[j] = (row[j] + pa - f * prow[j] % pa) % pa;
                }
            }
        }
        // clear row t right of the pivot; only the pivot row changes in A
        for j in t + 1..ncols {
            let x = a[t][j];
            if x == 0 {
                continue;
            }
            let f = (x / pv) % pa * unit_inv % pa;
            a[t][j] = 0;
            if let Some(r) = right.as_mut() {
                for row in r.iter_mut() {
                    if row[t] != 0 {
                        row[j] = (row[j] + pa - f * row[t] % pa) % pa;
                    }
                }
            }
        }
        vals.push(v);
        t += 1;
    }
    LocalSmith { vals, right }
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows > MAX_DENSE_DIM || cols > MAX_DENSE_DIM {
        return Err(Error::BudgetExceeded {
            what: "dense Smith form dimension",
            needed: format!("{rows}x{cols}"),
            limit: format!("{MAX_DENSE_DIM}x{MAX_DENSE_DIM}"),
        });
    }
    budget::check("dense matrix entries", rows as u128 * cols as u128)
}

/// `log_p` of the size of the Z/p^a-component of the span of `gens`.
///
/// `gens` are vectors of length `dim` with entries mod `m`; the result is one
/// exponent per prime of `m`, in [`factor`] order.
pub fn span_exponents(gens: &[Vec<u32>], dim: usize, m: u32) -> Result<Vec<u32>> {
    check_dims(gens.len(), dim)?;
    Ok(factor(m)
        .into_iter()
        .map(|(p, a)| {
            let pa = (p as u64).pow(a);
            let mat: Vec<Vec<u64>> = gens
                .iter()
                .map(|g| g.iter().map(|&x| x as u64 % pa).collect())
                .collect();
            let s = local_smith(mat, dim, p as u64, a, false);
            s.vals.iter().map(|&v| a - v).sum()
        })
        .collect())
}

/// Generators of the kernel of the `nrows × ncols` matrix `mat` (row-major)
/// over Z/m, each a vector of length `ncols`.
pub fn kernel_generators(mat: &[Vec<u32>], ncols: usize, m: u32) -> Result<Vec<Vec<u32>>> {
    check_dims(mat.len(), ncols)?;
    let fac = factor(m);
    let mut out = Vec::new();
    for &(p, a) in &fac {
        let pa = (p as u64).pow(a);
        let dense: Vec<Vec<u64>> = mat
            .iter()
            .map(|r| r.iter().map(|&x| x as u64 % pa).collect())
            .collect();
        let s = local_smith(dense, ncols, p as u64, a, true);
        let r = s.right.expect("tracked");
        // CRT idempotent: 1 mod p^a, 0 mod the other prime powers
        let rest = m as u64 / pa;
        let lift = rest * inv_mod(rest % pa, pa) % m as u64;
        let mut push = |i: usize, scale: u64| {
            let v: Vec<u32> = (0..ncols)
                .map(|row| (r[row][i] * scale % pa * lift % m as u64) as u32)
                .collect();
            if v.iter().any(|&x| x != 0) {
                out.push(v);
            }
        };
        for (i, &v) in s.vals.iter().enumerate() {
            if v > 0 {
                push(i, (p as u64).pow(a - v));
            }
        }
        for i in s.vals.len()..ncols {
            push(i, 1);
        }
    }
    Ok(out)
}

/// Invariant factors of the quotient `Z/B` where `B ⊆ Z ⊆ (Z/m)^dim` are given
/// by generators. Returns the cyclic orders `p^t` (with multiplicity), sorted
/// ascending; an empty list means the quotient is trivial.
pub fn quotient_structure(z: &[Vec<u32>], b: &[Vec<u32>], dim: usize, m: u32) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let logbs = span_exponents(b, dim, m)?;
    for (pi, (p, a)) in factor(m).into_iter().enumerate() {
        let pa = (p as u64).pow(a);
        let logb = logbs[pi];
        // s[j] = log_p |p^j Z + B| - log_p |B|
        let mut s = Vec::with_capacity(a as usize + 2);
        for j in 0..=a {
            let pj = (p as u64).pow(j);
            let gens: Vec<Vec<u32>> = z
                .iter()
                .map(|g| g.iter().map(|&x| ((x as u64 % pa) * pj % pa) as u32).collect())
                .chain(b.iter().map(|g| g.iter().map(|&x| (x as u64 % pa) as u32).collect()))
                .collect();
            let l = local_span_exponent(&gens, dim, p, a)?;
            s.push(l.checked_sub(logb).ok_or_else(|| {
                Error::Inconsistency("boundaries are not contained in cycles".into())
            })?);
        }
        s.push(0);
        // cyclic factors of order >= p^(j+1) number s[j] - s[j+1]
        for t in 1..=a as usize {
            let at_least_t = s[t - 1] - s[t];
            let at_least_next = if t < a as usize { s[t] - s[t + 1] } else { 0 };
            for _ in 0..at_least_t.saturating_sub(at_least_next) {
                out.push((p as u64).pow(t as u32));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn local_span_exponent(gens: &[Vec<u32>], dim: usize, p: u32, a: u32) -> Result<u32> {
    check_dims(gens.len(), dim)?;
    let mat: Vec<Vec<u64>> = gens
        .iter()
        .map(|g| g.iter().map(|&x| x as u64).collect())
        .collect();
    let s = local_smith(mat, dim, p as u64, a, false);
    Ok(s.vals.iter().map(|&v| a - v).sum())
}
