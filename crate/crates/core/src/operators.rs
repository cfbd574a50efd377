//! Boundary, coboundary, restriction, the bilinear pairing and perp duality.

use rayon::prelude::*;

use crate::ambient::Ambient;
use crate::chain::{Chain, Cochain};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::qnum::q_int;
use crate::ring::ModRing;
use crate::sparse::SparseMatrix;
use crate::subspace::Subspace;

fn check_ring(x: &Chain, ring: ModRing) -> Result<()> {
    if x.ring() != ring {
        return Err(Error::RingMismatch {
            expected: ring.modulus(),
            found: x.ring().modulus(),
        });
    }
    Ok(())
}

/// `∂U = Σ_{W ⊆_1 U} W`, extended linearly. Level-0 chains map to zero.
pub fn boundary(field: &Field, x: &Chain) -> Chain {
    let k = x.level();
    let mut out = Chain::zero(x.ambient_dim(), k.saturating_sub(1), x.ring());
    if k == 0 {
        return out;
    }
    for (u, c) in x.iter() {
        for w in u.codim1_subspaces(field) {
            out.add_term(w, c);
        }
    }
    out
}

/// [`boundary`] with an explicit ring check.
pub fn boundary_in(field: &Field, x: &Chain, ring: ModRing) -> Result<Chain> {
    check_ring(x, ring)?;
    Ok(boundary(field, x))
}

/// `(dα)(U) = α(∂U)`, computed by scattering each support element to its
/// superspaces.
pub fn coboundary(field: &Field, a: &Cochain) -> Result<Cochain> {
    let k = a.level();
    if k >= a.ambient_dim() {
        return Err(Error::InvalidArgument(format!(
            "coboundary needs level < n, got level {k} in dimension {}",
            a.ambient_dim()
        )));
    }
    let mut out = Chain::zero(a.ambient_dim(), k + 1, a.ring());
    for (w, c) in a.iter() {
        for u in w.superspaces(field) {
            out.add_term(u, c);
        }
    }
    Ok(out)
}

/// Coboundary that switches to a gather over the cached incidence table
/// once the support exceeds 1% of the level.
pub fn coboundary_cached(amb: &Ambient, a: &Cochain) -> Result<Cochain> {
    let k = a.level();
    if a.ambient_dim() != amb.n() {
        return Err(Error::AmbientMismatch {
            expected: amb.n(),
            found: a.ambient_dim(),
        });
    }
    if k >= amb.n() || (a.len() as u128) * 100 < amb.level_size(k) {
        return coboundary(amb.field(), a);
    }
    let ring = a.ring();
    let lower = amb.level(k)?;
    let dense: Vec<u32> = lower.iter().map(|w| a.get(w)).collect();
    let faces = amb.faces(k + 1)?;
    let upper = amb.level(k + 1)?;
    let vals: Vec<u32> = faces
        .par_iter()
        .map(|f| f.iter().fold(0, |acc, &i| ring.add(acc, dense[i as usize])))
        .collect();
    let mut out = Chain::zero(amb.n(), k + 1, ring);
    for (u, v) in upper.iter().zip(vals) {
        out.add_term(u.clone(), v);
    }
    Ok(out)
}

/// Keeps the support elements contained in `h`.
pub fn restrict(field: &Field, a: &Cochain, h: &Subspace) -> Result<Cochain> {
    if h.ambient_dim() != a.ambient_dim() {
        return Err(Error::AmbientMismatch {
            expected: a.ambient_dim(),
            found: h.ambient_dim(),
        });
    }
    Ok(a.filtered(|u| h.contains_unchecked(field, u)))
}

/// The coboundary of the complete complex on `h`, applied to the restriction
/// of `a` to `h`: `d|_H`.
pub fn coboundary_within(field: &Field, a: &Cochain, h: &Subspace) -> Result<Cochain> {
    if h.ambient_dim() != a.ambient_dim() {
        return Err(Error::AmbientMismatch {
            expected: a.ambient_dim(),
            found: h.ambient_dim(),
        });
    }
    let mut out = Chain::zero(a.ambient_dim(), a.level() + 1, a.ring());
    for (w, c) in a.iter() {
        if !h.contains_unchecked(field, w) {
            continue;
        }
        for u in w.superspaces_within_unchecked(field, h) {
            out.add_term(u, c);
        }
    }
    Ok(out)
}

/// `⟨α, β⟩ = Σ_W α(W) β(W)`.
pub fn bilinear(a: &Cochain, b: &Cochain) -> Result<u32> {
    if a.level() != b.level() {
        return Err(Error::LevelMismatch {
            expected: a.level(),
            found: b.level(),
        });
    }
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::AmbientMismatch {
            expected: a.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    check_ring(b, a.ring())?;
    let r = a.ring();
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    Ok(small
        .iter()
        .fold(0, |acc, (w, x)| r.add(acc, r.mul(x, large.get(w)))))
}

/// Applies `⊥` to every support element, keeping coefficients.
pub fn perp_chain(field: &Field, x: &Chain) -> Chain {
    let n = x.ambient_dim();
    let mut out = Chain::zero(n, n - x.level(), x.ring());
    for (u, c) in x.iter() {
        out.add_term(u.perp(field), c);
    }
    out
}

/// The matrix of `∂_k`, rows indexed by `Gr_{k-1}(n)` and columns by
/// `Gr_k(n)`, both in canonical order.
pub fn boundary_matrix(amb: &Ambient, k: usize, ring: ModRing) -> Result<SparseMatrix> {
    if k == 0 || k > amb.n() {
        return Err(Error::InvalidArgument(format!(
            "boundary matrix needs 1 <= k <= n, got k = {k}"
        )));
    }
    let faces = amb.faces(k)?;
    let one = 1 % ring.modulus();
    let cols = faces
        .iter()
        .map(|f| f.iter().map(|&i| (i, one)).collect())
        .collect();
    Ok(SparseMatrix::from_columns(amb.level(k - 1)?.len(), ring, cols))
}

/// Returns `(q+1) mod m` after checking on every `k`-space that `∂²U` is that
/// multiple of the sum of its codimension-two subspaces.
pub fn d_squared_defect(n: usize, k: usize, q: u32, m: u32) -> Result<u32> {
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!(
            "d_squared_defect needs 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let amb = Ambient::with_q(q, n)?;
    let ring = ModRing::new(m)?;
    let lam = ring.reduce(q as i64 + 1);
    let field = amb.field();
    let bad = amb.level(k)?.par_iter().find_any(|u| {
        let dd = boundary(field, &boundary(field, &Chain::generator((*u).clone(), 1, ring)));
        let mut expect = Chain::zero(n, k - 2, ring);
        for w in crate::subspace::enumerate_grassmannian(field, k, k - 2) {
            let rows: Vec<Vec<u8>> = w.rows().map(|c| u.combine(field, c)).collect();
            expect.add_term(Subspace::span(field, n, &rows), lam);
        }
        dd != expect
    });
    if let Some(u) = bad {
        return Err(Error::Inconsistency(format!(
            "∂² on {u:?} is not (q+1) times the codimension-two sum"
        )));
    }
    Ok(lam)
}

/// Returns `λ = [n-k]_q - [k]_q mod m` after checking
/// `(∂d - d∂)U = λ·U` on every generator of level `k`.
pub fn heisenberg_defect(n: usize, k: usize, q: u32, m: u32) -> Result<u32> {
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "heisenberg_defect needs 1 <= k <= n-1, got k = {k}, n = {n}"
        )));
    }
    let amb = Ambient::with_q(q, n)?;
    let ring = ModRing::new(m)?;
    let lam = ring.reduce(q_int(n - k, q) as i64 - q_int(k, q) as i64);
    let field = amb.field();
    let bad = amb.level(k)?.par_iter().find_any(|u| {
        let g = Chain::generator((*u).clone(), 1, ring);
        let dd = boundary(field, &coboundary(field, &g).expect("k < n"));
        let other = coboundary(field, &boundary(field, &g)).expect("k-1 < n");
        dd.minus(&other).expect("same level") != g.scaled(lam)
    });
    if let Some(u) = bad {
        return Err(Error::Inconsistency(format!(
            "(∂d - d∂) on {u:?} is not {lam} times the identity"
        )));
    }
    Ok(lam)
}
