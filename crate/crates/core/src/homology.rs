//! Homology and cohomology of the complete q-complex over Z/m.

use serde::Serialize;

use crate::ambient::Ambient;
use crate::chain::{Chain, Cochain};
use crate::cone::ConeEngine;
use crate::error::{Error, Result};
use crate::field::is_prime;
use crate::operators::{bilinear, boundary, boundary_matrix};
use crate::ring::ModRing;
use crate::sparse::{FpBasis, SparseMatrix};
use crate::zmod;

/// Per-level counts. Dimensions are over F_p on the prime path; on the
/// composite path `dim_*` and `rank_boundary` hold `log_p` sizes summed over the
/// primes `p | m`, and the structure is in `elementary_divisors`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub t: usize,
    pub dim_c: usize,
    pub rank_boundary: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elementary_divisors: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyReport {
    pub n: usize,
    pub q: u32,
    pub m: u32,
    /// `"homology"` or `"cohomology"`.
    pub kind: &'static str,
    /// `"prime"` or `"composite"`.
    pub path: &'static str,
    pub levels: Vec<LevelReport>,
    pub euler_chains: i64,
    pub euler_homology: i64,
    pub vanishing_pattern: bool,
    pub verdict: String,
}

impl HomologyReport {
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.dim_h).collect()
    }

    fn finish(mut self) -> Self {
        let n = self.n;
        self.vanishing_pattern = self
            .levels
            .iter()
            .all(|l| l.dim_h == 0 || (n.is_multiple_of(2) && l.t == n / 2));
        if self.path == "prime" {
            let sign = |t: usize| if t.is_multiple_of(2) { 1 } else { -1 };
            self.euler_chains = self.levels.iter().map(|l| sign(l.t) * l.dim_c as i64).sum();
            self.euler_homology = self.levels.iter().map(|l| sign(l.t) * l.dim_h as i64).sum();
        }
        self.verdict = format!(
            "vanishing-pattern: {}",
            if self.vanishing_pattern { "PASS" } else { "FAIL" }
        );
        self
    }
}

fn require_kills(q: u32, m: u32) -> Result<ModRing> {
    let ring = ModRing::new(m)?;
    ring.require_divides_q_plus_one(q)?;
    Ok(ring)
}

/// Ranks of `∂_1 .. ∂_n` over F_p, index `t` holding `rank ∂_t` (`0` at `t = 0`).
fn boundary_ranks(amb: &Ambient, ring: ModRing, p: u32, transpose: bool) -> Result<Vec<usize>> {
    let n = amb.n();
    let mut ranks = vec![0; n + 2];
    for (t, r) in ranks.iter_mut().enumerate().take(n + 1).skip(1) {
        let mat = boundary_matrix(amb, t, ring)?;
        *r = if transpose {
            mat.transpose().rank_mod_p(p)
        } else {
            mat.rank_mod_p(p)
        };
    }
    Ok(ranks)
}

/// Dimensions of `H_t(Gr(F_q^n); F_p)` by rank-nullity.
pub fn homology_dims(n: usize, q: u32, p: u32) -> Result<HomologyReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let ring = require_kills(q, p)?;
    let amb = Ambient::with_q(q, n)?;
    let ranks = boundary_ranks(&amb, ring, p, false)?;
    let levels = (0..=n)
        .map(|t| {
            let dim_c = amb.level_size(t) as usize;
            let dim_z = dim_c - ranks[t];
            let dim_b = ranks[t + 1];
            LevelReport {
                t,
                dim_c,
                rank_boundary: ranks[t],
                dim_z,
                dim_b,
                dim_h: dim_z - dim_b,
                elementary_divisors: None,
            }
        })
        .collect();
    Ok(HomologyReport {
        n,
        q,
        m: p,
        kind: "homology",
        path: "prime",
        levels,
        euler_chains: 0,
        euler_homology: 0,
        vanishing_pattern: false,
        verdict: String::new(),
    }
    .finish())
}

/// Dimensions of `H^t` from the transposed matrices `d_t = ∂_{t+1}^T`,
/// checked against `dim H^t = dim H_{n-t}`.
pub fn cohomology_dims(n: usize, q: u32, p: u32) -> Result<HomologyReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let ring = require_kills(q, p)?;
    let amb = Ambient::with_q(q, n)?;
    // rank d_t = rank of ∂_{t+1}^T
    let tr = boundary_ranks(&amb, ring, p, true)?;
    let levels: Vec<LevelReport> = (0..=n)
        .map(|t| {
            let dim_c = amb.level_size(t) as usize;
            let rank_d = tr[t + 1];
            let dim_z = dim_c - rank_d;
            let dim_b = tr[t];
            LevelReport {
                t,
                dim_c,
                rank_boundary: rank_d,
                dim_z,
                dim_b,
                dim_h: dim_z - dim_b,
                elementary_divisors: None,
            }
        })
        .collect();
    let hom = homology_dims(n, q, p)?;
    for l in &levels {
        let other = hom.levels[n - l.t].dim_h;
        if l.dim_h != other {
            return Err(Error::Inconsistency(format!(
                "dim H^{} = {} but dim H_{} = {}",
                l.t,
                l.dim_h,
                n - l.t,
                other
            )));
        }
    }
    Ok(HomologyReport {
        n,
        q,
        m: p,
        kind: "cohomology",
        path: "prime",
        levels,
        euler_chains: 0,
        euler_homology: 0,
        vanishing_pattern: false,
        verdict: String::new(),
    }
    .finish())
}

fn dense_rows(mat: &SparseMatrix, m: u32) -> Vec<Vec<u32>> {
    mat.to_dense(m as u64)
        .into_iter()
        .map(|r| r.into_iter().map(|x| x as u32).collect())
        .collect()
}

fn columns_dense(mat: &SparseMatrix) -> Vec<Vec<u32>> {
    mat.columns()
        .iter()
        .map(|c| {
            let mut v = vec![0u32; mat.nrows()];
            for &(r, x) in c {
                v[r as usize] = x;
            }
            v
        })
        .collect()
}

/// Structure of each `H_t(Gr(F_q^n); Z/m)` as a list of cyclic orders.
pub fn homology_structure(n: usize, q: u32, m: u32) -> Result<HomologyReport> {
    let ring = require_kills(q, m)?;
    let amb = Ambient::with_q(q, n)?;
    let log_total = |e: &[u32]| e.iter().sum::<u32>() as usize;
    let mut levels = Vec::with_capacity(n + 1);
    for t in 0..=n {
        let dim = amb.level_size(t) as usize;
        let z = if t == 0 {
            (0..dim)
                .map(|i| {
                    let mut v = vec![0u32; dim];
                    v[i] = 1;
                    v
                })
                .collect()
        } else {
            let mat = boundary_matrix(&amb, t, ring)?;
            zmod::kernel_generators(&dense_rows(&mat, m), dim, m)?
        };
        let b = if t < n {
            columns_dense(&boundary_matrix(&amb, t + 1, ring)?)
        } else {
            Vec::new()
        };
        let divisors = zmod::quotient_structure(&z, &b, dim, m)?;
        let z_log = log_total(&zmod::span_exponents(&z, dim, m)?);
        let b_log = log_total(&zmod::span_exponents(&b, dim, m)?);
        let fac = zmod::factor(m);
        let c_log = dim * fac.iter().map(|&(_, a)| a as usize).sum::<usize>();
        levels.push(LevelReport {
            t,
            dim_c: c_log,
            rank_boundary: c_log - z_log,
            dim_z: z_log,
            dim_b: b_log,
            dim_h: divisors.len(),
            elementary_divisors: Some(divisors),
        });
    }
    Ok(HomologyReport {
        n,
        q,
        m,
        kind: "homology",
        path: "composite",
        levels,
        euler_chains: 0,
        euler_homology: 0,
        vanishing_pattern: false,
        verdict: String::new(),
    }
    .finish())
}

/// A chain `c` with `∂c = τ`, namely the cone `c_{b,τ}`.
pub fn fill_cycle(engine: &ConeEngine, tau: &Chain) -> Result<Chain> {
    let field = engine.field();
    engine.ring().require_divides_q_plus_one(field.q())?;
    let t = tau.level();
    let n = tau.ambient_dim();
    if 2 * t >= n {
        return Err(Error::NotBelowMiddle { level: t, n });
    }
    if !boundary(field, tau).is_empty() {
        return Err(Error::NotACycle);
    }
    let c = engine.cone(tau)?;
    if boundary(field, &c) != *tau {
        return Err(Error::Inconsistency("cone does not fill the cycle".into()));
    }
    Ok(c)
}

fn to_sparse(amb: &Ambient, x: &Chain) -> Result<Vec<(u32, u32)>> {
    x.iter()
        .map(|(u, c)| Ok((amb.index_of(u)? as u32, c)))
        .collect()
}

/// Whether `β ∈ B_k = im ∂_{k+1}`.
pub fn is_boundary(amb: &Ambient, beta: &Chain) -> Result<bool> {
    let k = beta.level();
    let ring = beta.ring();
    let m = ring.modulus();
    if k >= amb.n() {
        return Ok(beta.is_empty());
    }
    let mat = boundary_matrix(amb, k + 1, ring)?;
    if is_prime(m) {
        let mut basis = FpBasis::new(m);
        for c in mat.columns() {
            basis.insert(c.clone());
        }
        return Ok(basis.contains(to_sparse(amb, beta)?));
    }
    let dim = mat.nrows();
    let mut gens = columns_dense(&mat);
    let before = zmod::span_exponents(&gens, dim, m)?;
    let mut v = vec![0u32; dim];
    for (i, c) in to_sparse(amb, beta)? {
        v[i as usize] = c;
    }
    gens.push(v);
    Ok(zmod::span_exponents(&gens, dim, m)? == before)
}

/// Whether `β ∈ B^k = im d_{k-1}` for a cochain `β`.
pub fn is_coboundary(amb: &Ambient, beta: &Cochain) -> Result<bool> {
    let k = beta.level();
    let ring = beta.ring();
    let m = ring.modulus();
    if k == 0 {
        return Ok(beta.is_empty());
    }
    let d = boundary_matrix(amb, k, ring)?.transpose();
    if is_prime(m) {
        let mut basis = FpBasis::new(m);
        for c in d.columns() {
            basis.insert(c.clone());
        }
        return Ok(basis.contains(to_sparse(amb, beta)?));
    }
    let dim = d.nrows();
    let mut gens = columns_dense(&d);
    let before = zmod::span_exponents(&gens, dim, m)?;
    let mut v = vec![0u32; dim];
    for (i, c) in to_sparse(amb, beta)? {
        v[i as usize] = c;
    }
    gens.push(v);
    Ok(zmod::span_exponents(&gens, dim, m)? == before)
}

/// Outcome of the pairing certificate: a cocycle `α` pairing nontrivially
/// with a cycle `β` shows `β ∉ B` and `α ∉ B^*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub pairing: u32,
    pub alpha_is_cocycle: bool,
    pub beta_is_cycle: bool,
    pub beta_is_boundary: bool,
    pub alpha_is_coboundary: bool,
    /// The rank-based membership tests agree with what the pairing implies.
    pub consistent: bool,
}

pub fn nontriviality_certificate(amb: &Ambient, alpha: &Cochain, beta: &Chain) -> Result<Certificate> {
    let field = amb.field();
    let pairing = bilinear(alpha, beta)?;
    let alpha_is_cocycle = if alpha.level() < amb.n() {
        crate::operators::coboundary(field, alpha)?.is_empty()
    } else {
        true
    };
    let beta_is_cycle = boundary(field, beta).is_empty();
    let beta_is_boundary = is_boundary(amb, beta)?;
    let alpha_is_coboundary = is_coboundary(amb, alpha)?;
    let implied = pairing != 0 && alpha_is_cocycle && beta_is_cycle;
    let consistent = !implied || (!beta_is_boundary && !alpha_is_coboundary);
    Ok(Certificate {
        pairing,
        alpha_is_cocycle,
        beta_is_cycle,
        beta_is_boundary,
        alpha_is_coboundary,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{ConeVariant, OrderedBasis};
    use crate::subspace::Subspace;

    #[test]
    fn prime_path_examples() {
        assert_eq!(homology_dims(4, 2, 3).unwrap().dims(), vec![0, 0, 7, 0, 0]);
        assert_eq!(homology_dims(5, 2, 3).unwrap().dims(), vec![0; 6]);
        assert_eq!(homology_dims(3, 2, 3).unwrap().dims(), vec![0; 4]);
        let r = homology_dims(4, 3, 2).unwrap();
        assert_eq!(r.dims(), vec![0, 0, 52, 0, 0]);
        assert!(r.vanishing_pattern);
        assert_eq!(r.euler_chains, r.euler_homology);
        assert_eq!(r.verdict, "vanishing-pattern: PASS");
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(matches!(homology_dims(3, 2, 2), Err(Error::ModulusMustDivide { .. })));
        assert!(matches!(homology_dims(3, 3, 4), Err(Error::NotPrime(4))));
        assert!(homology_structure(3, 2, 2).is_err());
    }

    #[test]
    fn vanishing_pattern_small_cases() {
        for (q, p) in [(2, 3), (3, 2)] {
            for n in 0..=5 {
                if q == 3 && n == 5 {
                    continue;
                }
                let r = homology_dims(n, q, p).unwrap();
                assert!(r.vanishing_pattern, "n={n} q={q}");
                assert_eq!(r.euler_chains, r.euler_homology);
                for l in &r.levels {
                    assert_eq!(l.dim_z, l.dim_c - l.rank_boundary);
                }
            }
        }
    }

    #[test]
    fn cohomology_mirrors_homology() {
        let c = cohomology_dims(4, 2, 3).unwrap();
        assert_eq!(c.dims(), vec![0, 0, 7, 0, 0]);
        assert_eq!(cohomology_dims(5, 2, 3).unwrap().dims(), vec![0; 6]);
        assert_eq!(cohomology_dims(3, 2, 3).unwrap().dims(), vec![0; 4]);
    }

    #[test]
    fn composite_path() {
        let r = homology_structure(3, 3, 4).unwrap();
        assert!(r.levels.iter().all(|l| l.elementary_divisors.as_ref().unwrap().is_empty()));
        let r = homology_structure(0, 3, 4).unwrap();
        assert_eq!(r.levels[0].elementary_divisors, Some(vec![4]));
        // middle homology over Z/4 reduces to the F_2 dimension
        let r = homology_structure(2, 3, 4).unwrap();
        let h1 = r.levels[1].elementary_divisors.clone().unwrap();
        let f2 = homology_dims(2, 3, 2).unwrap().levels[1].dim_h;
        assert_eq!(h1.len(), f2);
        assert!(r.levels[0].elementary_divisors.as_ref().unwrap().is_empty());
        assert!(r.levels[2].elementary_divisors.as_ref().unwrap().is_empty());
    }

    #[test]
    fn fill_cycle_examples() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let f = amb.field();
        let r = ModRing::new(3).unwrap();
        let e = ConeEngine::new(f.clone(), OrderedBasis::standard(5), r, ConeVariant::Modular).unwrap();
        let plane = Subspace::coordinate(5, &[1, 3]);
        let tau = boundary(f, &Chain::generator(plane, 1, r));
        let c = fill_cycle(&e, &tau).unwrap();
        assert_eq!(boundary(f, &c), tau);
        assert!(fill_cycle(&e, &Chain::zero(5, 1, r)).unwrap().is_empty());
        let line = Chain::generator(Subspace::coordinate(5, &[0]), 1, r);
        assert_eq!(fill_cycle(&e, &line), Err(Error::NotACycle));
        let t3 = boundary(f, &Chain::generator(Subspace::coordinate(5, &[0, 1, 2, 3]), 1, r));
        assert!(matches!(fill_cycle(&e, &t3), Err(Error::NotBelowMiddle { .. })));
    }

    #[test]
    fn boundary_membership() {
        let amb = Ambient::with_q(2, 4).unwrap();
        let f = amb.field();
        let r = ModRing::new(3).unwrap();
        let plane = Subspace::coordinate(4, &[0, 1]);
        let tau = boundary(f, &Chain::generator(plane.clone(), 2, r));
        assert!(is_boundary(&amb, &tau).unwrap());
        assert!(!is_boundary(&amb, &Chain::generator(Subspace::coordinate(4, &[0]), 1, r)).unwrap());
        let d = crate::operators::coboundary(f, &Chain::generator(Subspace::coordinate(4, &[0]), 1, r)).unwrap();
        assert!(is_coboundary(&amb, &d).unwrap());
        assert!(!is_coboundary(&amb, &Chain::generator(plane, 1, r)).unwrap());

        let amb = Ambient::with_q(3, 2).unwrap();
        let r4 = ModRing::new(4).unwrap();
        let tau = boundary(amb.field(), &Chain::generator(Subspace::ambient(2), 1, r4));
        assert!(is_boundary(&amb, &tau).unwrap());
        let lines = amb.level(1).unwrap();
        let z = Chain::from_terms(2, 1, r4, [(lines[0].clone(), 1), (lines[1].clone(), -1)]).unwrap();
        assert!(boundary(amb.field(), &z).is_empty());
        assert!(!is_boundary(&amb, &z).unwrap());
        assert!(!is_boundary(&amb, &z.scaled(2)).unwrap());
    }
}
