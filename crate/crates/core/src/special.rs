//! The middle cycles η_n and ψ_n of Gr(F_q^{2n}) and their pairing.

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::Chain;
use crate::cone::{ConeEngine, ConeVariant, OrderedBasis};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::operators::{bilinear, boundary};
use crate::ring::ModRing;
use crate::subspace::{echelonize, enumerate_grassmannian, Subspace};

fn unit_vector(len: usize, i: usize) -> Vec<u8> {
    let mut v = vec![0u8; len];
    v[i] = 1;
    v
}

fn admissible_ring(q: u32, m: u32) -> Result<ModRing> {
    let ring = ModRing::new(m)?;
    ring.require_divides_q_plus_one(q)?;
    Ok(ring)
}

/// `η_n` in `F_q^{2n}` by the two-cone recursion
/// `η_i = c_{b+_{2i}, η_{i-1}} - c_{b-_{2i}, η_{i-1}}`, `η_0 = 𝟘`.
pub fn eta_recursive(n: usize, q: u32, m: u32) -> Result<Chain> {
    let ring = admissible_ring(q, m)?;
    let field = Field::new(q)?;
    let dim = 2 * n;
    let mut eta = Chain::generator(Subspace::zero(dim), 1, ring);
    for i in 1..=n {
        // (e_1, ..., e_{2i-2}, e_{2i-1}) and (e_1, ..., e_{2i-2}, e_{2i})
        let common: Vec<Vec<u8>> = (0..2 * i - 2).map(|j| unit_vector(dim, j)).collect();
        let mut plus = common.clone();
        plus.push(unit_vector(dim, 2 * i - 2));
        let mut minus = common;
        minus.push(unit_vector(dim, 2 * i - 1));
        let cp = ConeEngine::new(
            field.clone(),
            OrderedBasis::new(&field, dim, plus)?,
            ring,
            ConeVariant::Modular,
        )?;
        let cm = ConeEngine::new(
            field.clone(),
            OrderedBasis::new(&field, dim, minus)?,
            ring,
            ConeVariant::Modular,
        )?;
        eta = cp.cone(&eta)?.minus(&cm.cone(&eta)?)?;
    }
    Ok(eta)
}

/// `η_n` from the closed formula, with the support-distinctness check.
#[derive(Clone, Debug, Serialize)]
pub struct EtaExplicit {
    pub chain: Chain,
    /// `2^n q^{n(n-1)/2}`.
    pub expected_terms: u64,
    /// Number of distinct subspaces `W^{(ε,A)}`.
    pub distinct_terms: u64,
}

impl EtaExplicit {
    pub fn all_distinct(&self) -> bool {
        self.expected_terms == self.distinct_terms
    }
}

/// `(-1)^{C(n,2)} Σ_{ε,A} sgn(ε) W^{(ε,A)}` with
/// `v_i = Σ_{j<i} a_{ij} e_{2j-ε_j} + e_{2i-1} + ε_i(e_{2i} - e_{2i-1})`.
pub fn eta_explicit(n: usize, q: u32, m: u32) -> Result<EtaExplicit> {
    let ring = admissible_ring(q, m)?;
    let field = Field::new(q)?;
    let dim = 2 * n;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let a_count = (q as u64).pow(pairs.len() as u32);
    crate::budget::check("eta terms", (a_count as u128) << n)?;
    let global = ring.sign(n * n.saturating_sub(1) / 2);
    let mut chain = Chain::zero(dim, n, ring);
    let mut seen = std::collections::HashSet::new();
    for eps in 0u32..(1 << n) {
        let e = |i: usize| ((eps >> i) & 1) as usize;
        let sign = ring.mul(global, ring.sign(eps.count_ones() as usize));
        let mut a = vec![0u8; pairs.len()];
        for _ in 0..a_count {
            let rows: Vec<Vec<u8>> = (0..n)
                .map(|i| {
                    let mut v = vec![0u8; dim];
                    for (idx, &(ii, j)) in pairs.iter().enumerate() {
                        if ii == i {
                            // e_{2j-ε_j} with j one-based is coordinate 2j - ε_j - 1
                            let c = 2 * (j + 1) - e(j) - 1;
                            v[c] = field.add(v[c], a[idx]);
                        }
                    }
                    if e(i) == 1 {
                        v[2 * i + 1] = field.add(v[2 * i + 1], 1);
                    } else {
                        v[2 * i] = field.add(v[2 * i], 1);
                    }
                    v
                })
                .collect();
            let w = Subspace::span(&field, dim, &rows);
            debug_assert_eq!(w.dim(), n);
            seen.insert(w.clone());
            chain.add_term(w, sign);
            // next A, odometer over F_q^{C(n,2)}
            for x in a.iter_mut() {
                *x += 1;
                if (*x as u32) < q {
                    break;
                }
                *x = 0;
            }
        }
    }
    Ok(EtaExplicit {
        chain,
        expected_terms: a_count << n,
        distinct_terms: seen.len() as u64,
    })
}

/// `Q(x) = Σ_{i<=j} c_{ij} x_i x_j` on F_q^n.
#[derive(Clone, Debug, Serialize)]
pub struct QuadraticForm {
    #[serde(skip)]
    field: Field,
    n: usize,
    /// Row-major `n × n`; only `i <= j` entries are read.
    coeffs: Vec<u8>,
}

impl QuadraticForm {
    pub fn new(field: &Field, n: usize, coeffs: Vec<u8>) -> Result<Self> {
        if coeffs.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                n * n,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c as u32 >= field.q()) {
            return Err(Error::InvalidVector("coefficient outside the field".into()));
        }
        Ok(QuadraticForm {
            field: field.clone(),
            n,
            coeffs,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, i: usize, j: usize) -> u8 {
        self.coeffs[i * self.n + j]
    }

    pub fn eval(&self, x: &[u8]) -> u8 {
        let f = &self.field;
        let mut acc = 0;
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            for j in i..self.n {
                let c = self.coeff(i, j);
                if c != 0 && x[j] != 0 {
                    acc = f.add(acc, f.mul(c, f.mul(x[i], x[j])));
                }
            }
        }
        acc
    }

    /// `B(u,v) = Q(u+v) - Q(u) - Q(v)`.
    pub fn polar(&self, u: &[u8], v: &[u8]) -> u8 {
        let f = &self.field;
        let s: Vec<u8> = u.iter().zip(v).map(|(&a, &b)| f.add(a, b)).collect();
        f.sub(f.sub(self.eval(&s), self.eval(u)), self.eval(v))
    }

    pub fn gram(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.polar(&unit_vector(self.n, i), &unit_vector(self.n, j)))
                    .collect()
            })
            .collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        let mut g = self.gram();
        echelonize(&self.field, &mut g) == self.n
    }

    /// `Q` vanishes on a basis and on pairwise sums, and basis pairs are
    /// orthogonal; together these force `Q|_W ≡ 0` in every characteristic.
    pub fn is_totally_singular(&self, w: &Subspace) -> Result<bool> {
        if w.ambient_dim() != self.n {
            return Err(Error::AmbientMismatch {
                expected: self.n,
                found: w.ambient_dim(),
            });
        }
        let rows: Vec<&[u8]> = w.rows().collect();
        for (i, u) in rows.iter().enumerate() {
            if self.eval(u) != 0 {
                return Ok(false);
            }
            for v in &rows[i + 1..] {
                if self.polar(u, v) != 0 {
                    return Ok(false);
                }
                let s: Vec<u8> = u.iter().zip(v.iter()).map(|(&a, &b)| self.field.add(a, b)).collect();
                if self.eval(&s) != 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Largest dimension of a totally singular subspace, by exhaustive search.
    pub fn witt_index(&self) -> Result<usize> {
        for d in (0..=self.n / 2).rev() {
            crate::budget::check(
                "subspaces",
                crate::qnum::gaussian_binomial(self.n as u64, d as u64, self.field.q() as u64)
                    .try_into()
                    .unwrap_or(u128::MAX),
            )?;
            let found = enumerate_grassmannian(&self.field, self.n, d)
                .par_iter()
                .any(|w| self.is_totally_singular(w).unwrap_or(false));
            if found {
                return Ok(d);
            }
        }
        Ok(0)
    }
}

/// `Σ_{i=1}^n x_{2i-1} x_{2i}` on F_q^{2n}.
pub fn hyperbolic_form(n: usize, q: u32) -> Result<QuadraticForm> {
    let field = Field::new(q)?;
    let dim = 2 * n;
    let mut c = vec![0u8; dim * dim];
    for i in 0..n {
        c[2 * i * dim + 2 * i + 1] = 1;
    }
    QuadraticForm::new(&field, dim, c)
}

/// `Σ_{i=1}^n (x_{2i-1} x_{2i} - x_{2i}²)`, the form in which each
/// `{e_{2i-1}, e_{2i-1} + e_{2i}}` is a hyperbolic pair and different pairs
/// are orthogonal.
pub fn pairing_form(n: usize, q: u32) -> Result<QuadraticForm> {
    let field = Field::new(q)?;
    let dim = 2 * n;
    let mut c = vec![0u8; dim * dim];
    for i in 0..n {
        c[2 * i * dim + 2 * i + 1] = 1;
        c[(2 * i + 1) * dim + 2 * i + 1] = field.neg(1);
    }
    QuadraticForm::new(&field, dim, c)
}

/// Members of a family signed relative to a reference member `W_1`.
#[derive(Clone, Debug, Serialize)]
pub struct SignedFamily {
    pub reference: Subspace,
    /// `(W, sgn(W))` in canonical order, `sgn(W) = (-1)^{dim W_1/(W_1 ∩ W)}`.
    pub members: Vec<(Subspace, i8)>,
}

fn codim_parity(field: &Field, a: &Subspace, b: &Subspace) -> usize {
    (a.dim() - a.intersect(field, b).expect("same ambient").dim()) % 2
}

impl SignedFamily {
    pub fn new(field: &Field, reference: Subspace, spaces: Vec<Subspace>) -> Self {
        let members = spaces
            .into_iter()
            .map(|w| {
                let s = if codim_parity(field, &reference, &w) == 0 { 1 } else { -1 };
                (w, s)
            })
            .collect();
        SignedFamily { reference, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The parity graph (edges where `dim W/(W ∩ W')` is odd) is bipartite
    /// with parts given by the signs.
    pub fn is_bipartite_consistent(&self, field: &Field) -> bool {
        self.members.par_iter().enumerate().all(|(i, (w, s))| {
            self.members[i + 1..].iter().all(|(w2, s2)| {
                let odd = codim_parity(field, w, w2) == 1;
                odd == (s != s2)
            })
        })
    }

    /// The same family signed against `reference` instead.
    pub fn resigned(&self, field: &Field, reference: Subspace) -> SignedFamily {
        SignedFamily::new(
            field,
            reference,
            self.members.iter().map(|(w, _)| w.clone()).collect(),
        )
    }

    pub fn to_chain(&self, ring: ModRing) -> Chain {
        let n = self.reference.ambient_dim();
        let mut c = Chain::zero(n, self.reference.dim(), ring);
        for (w, s) in &self.members {
            c.add_term(w.clone(), if *s > 0 { 1 } else { ring.neg(1) });
        }
        c
    }
}

/// All maximal totally singular subspaces of `Q` on F_q^{2n}, signed against
/// the first one in canonical order.
pub fn enumerate_mts(form: &QuadraticForm) -> Result<SignedFamily> {
    let dim = form.ambient_dim();
    if !dim.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "form must live on an even-dimensional space, got {dim}"
        )));
    }
    let n = dim / 2;
    let witt = form.witt_index()?;
    if witt != n {
        return Err(Error::WittIndex {
            witt_index: witt,
            expected: n,
        });
    }
    let members: Vec<Subspace> = enumerate_grassmannian(&form.field, dim, n)
        .into_par_iter()
        .filter(|w| form.is_totally_singular(w).unwrap_or(false))
        .collect();
    let reference = members[0].clone();
    Ok(SignedFamily::new(&form.field, reference, members))
}

/// `Π_{i=0}^{n-1} (1 + q^i)`.
pub fn mts_count(n: usize, q: u32) -> u64 {
    (0..n).map(|i| 1 + (q as u64).pow(i as u32)).product()
}

/// Checks that every `(n-1)`-dimensional totally singular space lies in
/// exactly two members of the family, with opposite signs.
pub fn check_two_members(form: &QuadraticForm, family: &SignedFamily) -> Result<bool> {
    let dim = form.ambient_dim();
    let n = dim / 2;
    if n == 0 {
        return Ok(true);
    }
    let field = &form.field;
    let ok = enumerate_grassmannian(field, dim, n - 1)
        .par_iter()
        .filter(|u| form.is_totally_singular(u).unwrap_or(false))
        .all(|u| {
            let hits: Vec<i8> = family
                .members
                .iter()
                .filter(|(w, _)| w.contains_unchecked(field, u))
                .map(|(_, s)| *s)
                .collect();
            hits.len() == 2 && hits[0] != hits[1]
        });
    Ok(ok)
}

/// `ψ_n = Σ_{W ∈ MTS} sgn(W) W` for the hyperbolic form.
pub fn psi(n: usize, q: u32, m: u32) -> Result<Chain> {
    psi_for(&hyperbolic_form(n, q)?, m)
}

pub fn psi_for(form: &QuadraticForm, m: u32) -> Result<Chain> {
    let ring = admissible_ring(form.field.q(), m)?;
    Ok(enumerate_mts(form)?.to_chain(ring))
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingReport {
    pub n: usize,
    pub q: u32,
    pub m: u32,
    /// `⟨ψ_n, η_n⟩` with ψ built from [`pairing_form`].
    pub value: u32,
    pub value_is_unit: bool,
    pub common_support: Vec<Subspace>,
    pub sign_convention: String,
}

impl PairingReport {
    /// A unit pairing with exactly one common support element.
    pub fn passed(&self) -> bool {
        self.value_is_unit && self.common_support.len() == 1
    }

    /// Whether the value is `±1`.
    pub fn is_plus_minus_one(&self) -> bool {
        self.value == 1 % self.m || self.value == self.m - 1
    }
}

pub fn pairing_check(n: usize, q: u32, m: u32) -> Result<PairingReport> {
    let ring = admissible_ring(q, m)?;
    let form = pairing_form(n, q)?;
    let family = enumerate_mts(&form)?;
    let psi = family.to_chain(ring);
    let eta = eta_recursive(n, q, m)?;
    let common: Vec<Subspace> = eta.support().filter(|w| psi.get(w) != 0).cloned().collect();
    let value = bilinear(&psi, &eta)?;
    Ok(PairingReport {
        n,
        q,
        m,
        value,
        value_is_unit: ring.is_unit(value),
        common_support: common,
        sign_convention: format!(
            "sgn relative to the first MTS member in canonical order: {:?}",
            family.reference
        ),
    })
}

/// Boundary checks for η and ψ, used by the CLI and tests.
pub fn is_cycle(field: &Field, c: &Chain) -> bool {
    boundary(field, c).is_empty()
}
