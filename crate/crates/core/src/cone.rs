//! Cones `c_{b,W}` over an ordered basis, the contraction they induce, and
//! the small-generators family for `Ker ∂`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use parking_lot::RwLock;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::Ambient;
use crate::chain::{Chain, Cochain};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::operators::{bilinear, boundary, coboundary_within};
use crate::qnum::q_integer;
use crate::ring::ModRing;
use crate::subspace::{echelonize, Subspace};
use crate::zmod;

/// An ordered list of linearly independent vectors `b_1, b_2, ...` in F_q^n.
///
/// A full basis has `n` vectors; level-`k` cones only read the first `2k+1`,
/// so shorter independent prefixes are accepted too.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrderedBasis {
    n: usize,
    vectors: Vec<Vec<u8>>,
}

impl OrderedBasis {
    pub fn new(field: &Field, n: usize, vectors: Vec<Vec<u8>>) -> Result<Self> {
        for v in &vectors {
            if v.len() != n {
                return Err(Error::AmbientMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if v.iter().any(|&x| x as u32 >= field.q()) {
                return Err(Error::InvalidVector(format!(
                    "entry outside F_{}",
                    field.q()
                )));
            }
        }
        let mut m = vectors.clone();
        if echelonize(field, &mut m) != vectors.len() {
            return Err(Error::DependentBasis);
        }
        Ok(OrderedBasis { n, vectors })
    }

    /// `e_1, ..., e_n`.
    pub fn standard(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| {
                let mut v = vec![0u8; n];
                v[i] = 1;
                v
            })
            .collect();
        OrderedBasis { n, vectors }
    }

    /// A uniformly random ordered basis.
    pub fn random(field: &Field, n: usize, rng: &mut impl Rng) -> Self {
        let mut vectors: Vec<Vec<u8>> = Vec::with_capacity(n);
        while vectors.len() < n {
            let v: Vec<u8> = (0..n).map(|_| rng.gen_range(0..field.q()) as u8).collect();
            let mut m = vectors.clone();
            m.push(v.clone());
            if echelonize(field, &mut m) == vectors.len() + 1 {
                vectors.push(v);
            }
        }
        OrderedBasis { n, vectors }
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<u8>] {
        &self.vectors
    }

    /// The first `len` vectors.
    pub fn prefix(&self, len: usize) -> OrderedBasis {
        OrderedBasis {
            n: self.n,
            vectors: self.vectors[..len.min(self.vectors.len())].to_vec(),
        }
    }
}

/// `W_b`: `W + Span{b_1..b_i}` for the first `i` reaching dimension `2k+1`.
pub fn w_extension(field: &Field, w: &Subspace, b: &OrderedBasis) -> Result<Subspace> {
    let k = w.dim();
    let target = 2 * k + 1;
    if w.ambient_dim() != b.ambient_dim() {
        return Err(Error::AmbientMismatch {
            expected: b.ambient_dim(),
            found: w.ambient_dim(),
        });
    }
    if target > b.ambient_dim() {
        return Err(Error::ConeUndefined {
            level: k,
            available: b.ambient_dim(),
        });
    }
    let mut cur = w.clone();
    for v in b.vectors() {
        if cur.dim() == target {
            break;
        }
        if !cur.contains_vector(field, v) {
            let rows: Vec<&[u8]> = cur.rows().chain(std::iter::once(v.as_slice())).collect();
            cur = Subspace::span(field, w.ambient_dim(), &rows);
        }
    }
    if cur.dim() < target {
        return Err(Error::ConeUndefined {
            level: k,
            available: b.len(),
        });
    }
    Ok(cur)
}

/// Which scalar multiplies the restricted coboundary at level `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeVariant {
    /// `(-1)^k`, valid when `m | q+1`.
    Modular,
    /// `q^{-k}`, valid when `q` is a unit mod `m`.
    General,
}

impl std::str::FromStr for ConeVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modular" => Ok(ConeVariant::Modular),
            "general" => Ok(ConeVariant::General),
            _ => Err(Error::InvalidArgument(format!(
                "unknown cone variant {s:?} (expected modular or general)"
            ))),
        }
    }
}

/// Memoized cones for one basis, ring and variant.
///
/// The cache may be shared across threads; a cone computed concurrently by two
/// threads is identical, so the second insert is harmless.
pub struct ConeEngine {
    field: Field,
    basis: OrderedBasis,
    ring: ModRing,
    variant: ConeVariant,
    q_inv: u32,
    cache: RwLock<HashMap<Subspace, Arc<Chain>>>,
}

impl ConeEngine {
    pub fn new(field: Field, basis: OrderedBasis, ring: ModRing, variant: ConeVariant) -> Result<Self> {
        let q = field.q();
        let q_inv = match variant {
            ConeVariant::Modular => {
                ring.require_divides_q_plus_one(q)?;
                ring.neg(1)
            }
            ConeVariant::General => ring.inv(q % ring.modulus()).ok_or(Error::QNotInvertible {
                q,
                m: ring.modulus(),
            })?,
        };
        Ok(ConeEngine {
            field,
            basis,
            ring,
            variant,
            q_inv,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn basis(&self) -> &OrderedBasis {
        &self.basis
    }

    pub fn ring(&self) -> ModRing {
        self.ring
    }

    pub fn variant(&self) -> ConeVariant {
        self.variant
    }

    /// Number of memoized cones.
    pub fn cached(&self) -> usize {
        self.cache.read().len()
    }

    fn scalar(&self, k: usize) -> u32 {
        match self.variant {
            ConeVariant::Modular => self.ring.sign(k),
            ConeVariant::General => self.ring.pow(self.q_inv, k as u64),
        }
    }

    /// `c_{b,W}`.
    pub fn cone_of(&self, w: &Subspace) -> Result<Arc<Chain>> {
        if let Some(c) = self.cache.read().get(w) {
            return Ok(c.clone());
        }
        let c = Arc::new(self.compute(w)?);
        self.cache.write().entry(w.clone()).or_insert_with(|| c.clone());
        Ok(c)
    }

    fn compute(&self, w: &Subspace) -> Result<Chain> {
        let n = w.ambient_dim();
        let k = w.dim();
        if k == 0 {
            let b1 = self.basis.vectors().first().ok_or(Error::ConeUndefined {
                level: 0,
                available: 0,
            })?;
            let line = Subspace::span(&self.field, n, &[b1]);
            return Ok(Chain::generator(line, 1, self.ring));
        }
        let wb = w_extension(&self.field, w, &self.basis)?;
        let mut x = Chain::generator(w.clone(), 1, self.ring);
        let minus_one = self.ring.neg(1);
        for u in w.codim1_subspaces(&self.field) {
            x.add_scaled(minus_one, &*self.cone_of(&u)?)?;
        }
        Ok(coboundary_within(&self.field, &x, &wb)?.scaled(self.scalar(k)))
    }

    /// `c_{b,x}`, extended linearly from generators.
    pub fn cone(&self, x: &Chain) -> Result<Chain> {
        if x.ring() != self.ring {
            return Err(Error::RingMismatch {
                expected: self.ring.modulus(),
                found: x.ring().modulus(),
            });
        }
        if x.ambient_dim() != self.basis.ambient_dim() {
            return Err(Error::AmbientMismatch {
                expected: self.basis.ambient_dim(),
                found: x.ambient_dim(),
            });
        }
        let k = x.level();
        if 2 * k + 1 > x.ambient_dim() {
            return Err(Error::ConeUndefined {
                level: k,
                available: x.ambient_dim(),
            });
        }
        let mut out = Chain::zero(x.ambient_dim(), k + 1, self.ring);
        for (w, c) in x.iter() {
            out.add_scaled(c, &*self.cone_of(w)?)?;
        }
        Ok(out)
    }

    /// `∂c_{b,x} - (x - c_{b,∂x})`; zero exactly when the cone identity holds.
    pub fn cone_identity_defect(&self, x: &Chain) -> Result<Chain> {
        let lhs = boundary(&self.field, &self.cone(x)?);
        let bx = boundary(&self.field, x);
        let rhs = if x.level() == 0 {
            x.clone()
        } else {
            x.minus(&self.cone(&bx)?)?
        };
        lhs.minus(&rhs)
    }

    /// `(ι_b α)(W) = ⟨α, c_{b,W}⟩` for every `W` one level below `α`.
    pub fn contraction(&self, amb: &Ambient, a: &Cochain) -> Result<Cochain> {
        let k = a.level();
        if k == 0 {
            return Err(Error::InvalidArgument("contraction needs level >= 1".into()));
        }
        let mut out = Chain::zero(a.ambient_dim(), k - 1, self.ring);
        if a.is_empty() {
            return Ok(out);
        }
        for w in amb.level(k - 1)? {
            let v = bilinear(a, &*self.cone_of(w)?)?;
            out.add_term(w.clone(), v);
        }
        Ok(out)
    }
}

/// The recursion `f(0) = 1`, `f(k) = [k+1]_q (1 + [k]_q f(k-1))` bounding
/// `|c_{b,W}|` for `dim W = k`.
pub fn cone_size_bound(k: usize, q: u32) -> BigUint {
    let mut f = BigUint::one();
    for j in 1..=k as u64 {
        f = q_integer(j + 1, q as u64) * (BigUint::one() + q_integer(j, q as u64) * f);
    }
    f
}

/// JSON dump of one cone evaluation.
#[derive(Debug, Serialize)]
pub struct ConeDump {
    pub basis: Vec<Vec<u8>>,
    pub input: Chain,
    pub variant: ConeVariant,
    pub output: Chain,
}

/// The family `{W - c_{b,∂W}}` for a fixed basis, with its three checks.
#[derive(Debug, Serialize)]
pub struct SmallGenerators {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub m: u32,
    pub variant: ConeVariant,
    pub generators: Vec<Chain>,
    /// `log_p |·|` per prime of `m` for `Ker ∂_k`.
    pub kernel_size_exponents: Vec<u32>,
    /// (i): every generator lies in `Ker ∂_k`.
    pub all_cycles: bool,
    /// Largest dimension of the span of a generator's support.
    pub max_support_span: usize,
    /// (ii): every support span has dimension at most `2k`.
    pub supports_small: bool,
    /// `Ker ∂_k` is contained in the span of the family.
    pub kernel_in_span: bool,
    /// (iii): the family spans exactly `Ker ∂_k`.
    pub spans_kernel: bool,
}

impl SmallGenerators {
    pub fn passed(&self) -> bool {
        self.all_cycles && self.supports_small && self.spans_kernel
    }
}

/// Builds `{W - c_{b,∂W} : W ∈ Gr_k(n)}` over the standard basis and certifies
/// it. The modular variant is used when `m | q+1`, the general one otherwise.
pub fn small_generators(n: usize, k: usize, q: u32, m: u32) -> Result<SmallGenerators> {
    if 2 * k >= n {
        return Err(Error::NotBelowMiddle { level: k, n });
    }
    let ring = ModRing::new(m)?;
    let amb = Ambient::with_q(q, n)?;
    let field = amb.field().clone();
    let variant = if ring.kills_q_plus_one(q) {
        ConeVariant::Modular
    } else {
        ConeVariant::General
    };
    let engine = ConeEngine::new(field.clone(), OrderedBasis::standard(n), ring, variant)?;
    let level = amb.level(k)?;
    let mut generators = Vec::with_capacity(level.len());
    for w in level {
        let g = Chain::generator(w.clone(), 1, ring);
        let bw = boundary(&field, &g);
        let gen = if k == 0 { g } else { g.minus(&engine.cone(&bw)?)? };
        generators.push(gen);
    }

    let all_cycles = generators.iter().all(|g| boundary(&field, g).is_empty());
    let max_support_span = generators
        .iter()
        .map(|g| {
            let rows: Vec<Vec<u8>> = g.support().flat_map(|u| u.rows_vec()).collect();
            Subspace::span(&field, n, &rows).dim()
        })
        .max()
        .unwrap_or(0);

    let to_vec = |c: &Chain| -> Vec<u32> { level.iter().map(|u| c.get(u)).collect() };
    let gen_vecs: Vec<Vec<u32>> = generators.iter().map(to_vec).collect();
    let kernel = if k == 0 {
        level.iter().map(|_| vec![1 % m]).collect::<Vec<_>>()
    } else {
        let mat = crate::operators::boundary_matrix(&amb, k, ring)?;
        let dense: Vec<Vec<u32>> = mat
            .to_dense(m as u64)
            .into_iter()
            .map(|r| r.into_iter().map(|x| x as u32).collect())
            .collect();
        zmod::kernel_generators(&dense, level.len(), m)?
    };
    let dim = level.len();
    let span = zmod::span_exponents(&gen_vecs, dim, m)?;
    let kernel_size_exponents = zmod::span_exponents(&kernel, dim, m)?;
    let mut joint_gens = gen_vecs.clone();
    joint_gens.extend(kernel.iter().cloned());
    let joint = zmod::span_exponents(&joint_gens, dim, m)?;
    let kernel_in_span = joint == span;
    let spans_kernel = kernel_in_span && all_cycles;

    Ok(SmallGenerators {
        n,
        k,
        q,
        m,
        variant,
        generators,
        kernel_size_exponents,
        all_cycles,
        max_support_span,
        supports_small: max_support_span <= 2 * k,
        kernel_in_span,
        spans_kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::gauss;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_chain(amb: &Ambient, k: usize, ring: ModRing, rng: &mut impl Rng, size: usize) -> Chain {
        let lvl = amb.level(k).unwrap();
        let mut c = Chain::zero(amb.n(), k, ring);
        for _ in 0..size {
            c.add_term(lvl[rng.gen_range(0..lvl.len())].clone(), rng.gen_range(0..ring.modulus()));
        }
        c
    }

    #[test]
    fn basis_validation() {
        let f = Field::new(2).unwrap();
        assert!(OrderedBasis::new(&f, 2, vec![vec![1, 1], vec![1, 1]]).is_err());
        assert!(OrderedBasis::new(&f, 2, vec![vec![1, 2]]).is_err());
        assert!(OrderedBasis::new(&f, 2, vec![vec![1, 1], vec![0, 1]]).is_ok());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = OrderedBasis::random(&Field::new(3).unwrap(), 4, &mut rng);
        assert_eq!(b.len(), 4);
    }

    #[test]
    fn w_extension_examples() {
        let f = Field::new(2).unwrap();
        let b = OrderedBasis::standard(5);
        let z = w_extension(&f, &Subspace::zero(5), &b).unwrap();
        assert_eq!(z, Subspace::coordinate(5, &[0]));
        let l = Subspace::coordinate(5, &[3]);
        let lb = w_extension(&f, &l, &b).unwrap();
        assert_eq!(lb, Subspace::coordinate(5, &[0, 1, 3]));
        let l1 = Subspace::coordinate(5, &[0]);
        assert_eq!(w_extension(&f, &l1, &b).unwrap(), Subspace::coordinate(5, &[0, 1, 2]));
        assert!(matches!(
            w_extension(&f, &Subspace::coordinate(5, &[0, 1, 2]), &b),
            Err(Error::ConeUndefined { .. })
        ));
        // 2k+1 = n is allowed
        let p = Subspace::coordinate(5, &[3, 4]);
        assert_eq!(w_extension(&f, &p, &b).unwrap(), Subspace::ambient(5));
    }

    #[test]
    fn w_extension_is_monotone() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let f = amb.field();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let planes = amb.level(2).unwrap();
        for _ in 0..500 {
            let b = OrderedBasis::random(f, 5, &mut rng);
            let w = &planes[rng.gen_range(0..planes.len())];
            let subs = w.codim1_subspaces(f);
            let w1 = &subs[rng.gen_range(0..subs.len())];
            let big = w_extension(f, w, &b).unwrap();
            let small = w_extension(f, w1, &b).unwrap();
            assert!(big.contains(f, &small).unwrap());
            assert!(big.contains(f, w).unwrap());
        }
    }

    #[test]
    fn cone_of_zero_space_is_first_line() {
        let f = Field::new(2).unwrap();
        let r = ModRing::new(3).unwrap();
        let b = OrderedBasis::new(&f, 3, vec![vec![0, 1, 1], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        let e = ConeEngine::new(f.clone(), b, r, ConeVariant::Modular).unwrap();
        let c = e.cone(&Chain::generator(Subspace::zero(3), 1, r)).unwrap();
        assert_eq!(c, Chain::generator(Subspace::span(&f, 3, &[[0u8, 1, 1]]), 1, r));
    }

    #[test]
    fn variant_preconditions() {
        let f = Field::new(2).unwrap();
        let b = OrderedBasis::standard(3);
        assert!(matches!(
            ConeEngine::new(f.clone(), b.clone(), ModRing::new(5).unwrap(), ConeVariant::Modular),
            Err(Error::ModulusMustDivide { .. })
        ));
        assert!(matches!(
            ConeEngine::new(f.clone(), b.clone(), ModRing::new(4).unwrap(), ConeVariant::General),
            Err(Error::QNotInvertible { .. })
        ));
        assert!(ConeEngine::new(f, b, ModRing::new(5).unwrap(), ConeVariant::General).is_ok());
    }

    #[test]
    fn cone_identity_random_one_chains() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let r = ModRing::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = OrderedBasis::random(amb.field(), 5, &mut rng);
        let e = ConeEngine::new(amb.field().clone(), b, r, ConeVariant::Modular).unwrap();
        for _ in 0..200 {
            let x = random_chain(&amb, 1, r, &mut rng, 4);
            assert!(e.cone_identity_defect(&x).unwrap().is_empty());
        }
        for w in amb.level(2).unwrap() {
            assert!(e.cone_identity_defect(&Chain::generator(w.clone(), 1, r)).unwrap().is_empty());
        }
    }

    #[test]
    fn general_variant_agrees_with_modular_when_m_divides_q_plus_one() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let r = ModRing::new(3).unwrap();
        let b = OrderedBasis::standard(5);
        let m = ConeEngine::new(amb.field().clone(), b.clone(), r, ConeVariant::Modular).unwrap();
        let g = ConeEngine::new(amb.field().clone(), b, r, ConeVariant::General).unwrap();
        for w in amb.level(2).unwrap() {
            assert_eq!(m.cone_of(w).unwrap(), g.cone_of(w).unwrap());
        }
    }

    #[test]
    fn general_variant_identity_at_level_one() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let r = ModRing::new(5).unwrap();
        let e = ConeEngine::new(amb.field().clone(), OrderedBasis::standard(5), r, ConeVariant::General)
            .unwrap();
        for w in amb.level(1).unwrap() {
            assert!(e.cone_identity_defect(&Chain::generator(w.clone(), 1, r)).unwrap().is_empty());
        }
    }

    #[test]
    fn cycles_are_filled() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let f = amb.field();
        let r = ModRing::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = ConeEngine::new(f.clone(), OrderedBasis::standard(5), r, ConeVariant::Modular).unwrap();
        for _ in 0..20 {
            let tau = boundary(f, &random_chain(&amb, 2, r, &mut rng, 3));
            let c = e.cone(&tau).unwrap();
            assert_eq!(boundary(f, &c), tau);
        }
    }

    #[test]
    fn locality_linearity_and_prefix_dependence() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let f = amb.field();
        let r = ModRing::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let b = OrderedBasis::random(f, 5, &mut rng);
        let e = ConeEngine::new(f.clone(), b.clone(), r, ConeVariant::Modular).unwrap();
        // level 1 cones only read b_1..b_3
        let mut swapped = b.vectors().to_vec();
        swapped.swap(3, 4);
        let b2 = OrderedBasis::new(f, 5, swapped).unwrap();
        let e2 = ConeEngine::new(f.clone(), b2, r, ConeVariant::Modular).unwrap();
        let e3 = ConeEngine::new(f.clone(), b.prefix(3), r, ConeVariant::Modular).unwrap();
        for w in amb.level(1).unwrap() {
            let c = e.cone_of(w).unwrap();
            let wb = w_extension(f, w, &b).unwrap();
            assert!(c.support().all(|u| wb.contains(f, u).unwrap()));
            assert_eq!(c, e2.cone_of(w).unwrap());
            assert_eq!(c, e3.cone_of(w).unwrap());
        }
        for w in amb.level(2).unwrap() {
            let c = e.cone_of(w).unwrap();
            assert!(c.len() as u64 <= 133);
            assert!(c.support().all(|u| u.dim() == 3));
        }
        for _ in 0..50 {
            let x = random_chain(&amb, 1, r, &mut rng, 3);
            let y = random_chain(&amb, 1, r, &mut rng, 3);
            let lhs = e.cone(&x.plus(&y).unwrap()).unwrap();
            let rhs = e.cone(&x).unwrap().plus(&e.cone(&y).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(e.cone(&x.scaled(2)).unwrap(), e.cone(&x).unwrap().scaled(2));
        }
    }

    #[test]
    fn two_cones_of_a_cycle_differ_by_a_cycle() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let f = amb.field();
        let r = ModRing::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let e1 = ConeEngine::new(f.clone(), OrderedBasis::random(f, 5, &mut rng), r, ConeVariant::Modular).unwrap();
            let e2 = ConeEngine::new(f.clone(), OrderedBasis::random(f, 5, &mut rng), r, ConeVariant::Modular).unwrap();
            let alpha = boundary(f, &random_chain(&amb, 2, r, &mut rng, 2));
            let diff = e1.cone(&alpha).unwrap().minus(&e2.cone(&alpha).unwrap()).unwrap();
            assert!(boundary(f, &diff).is_empty());
        }
    }

    #[test]
    fn contraction_identity() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let f = amb.field();
        let r = ModRing::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let e = ConeEngine::new(f.clone(), OrderedBasis::random(f, 5, &mut rng), r, ConeVariant::Modular).unwrap();
        assert!(e.contraction(&amb, &Chain::zero(5, 1, r)).unwrap().is_empty());
        for _ in 0..100 {
            let a = random_chain(&amb, 1, r, &mut rng, 5);
            let da = crate::operators::coboundary(f, &a).unwrap();
            let ia = e.contraction(&amb, &a).unwrap();
            let lhs = e
                .contraction(&amb, &da)
                .unwrap()
                .plus(&crate::operators::coboundary(f, &ia).unwrap())
                .unwrap();
            assert_eq!(lhs, a);
        }
        // ι δ_U (W) = coefficient of U in c_W
        let u = amb.level(1).unwrap()[4].clone();
        let iu = e.contraction(&amb, &Chain::generator(u.clone(), 1, r)).unwrap();
        let z = Subspace::zero(5);
        assert_eq!(iu.get(&z), e.cone_of(&z).unwrap().get(&u));
    }

    #[test]
    fn cone_size_bound_values() {
        assert_eq!(cone_size_bound(0, 2), BigUint::from(1u32));
        assert_eq!(cone_size_bound(1, 2), BigUint::from(6u32));
        assert_eq!(cone_size_bound(2, 2), BigUint::from(133u32));
        // closed form [k+1]_q [k]_q!^2 (1 + Σ 1/[j]_q!^2) at k = 2, q = 3: 13·16·(1+1+1/16) = 429
        assert_eq!(cone_size_bound(2, 3), BigUint::from(429u32));
    }

    #[test]
    fn measured_cone_sizes_respect_bound() {
        let amb = Ambient::with_q(2, 5).unwrap();
        let f = amb.field();
        let r = ModRing::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let bound = cone_size_bound(2, 2);
        for _ in 0..5 {
            let e = ConeEngine::new(f.clone(), OrderedBasis::random(f, 5, &mut rng), r, ConeVariant::Modular).unwrap();
            for w in amb.level(2).unwrap() {
                assert!(BigUint::from(e.cone_of(w).unwrap().len()) <= bound);
            }
        }
    }

    #[test]
    fn small_generators_examples() {
        let s = small_generators(5, 1, 2, 3).unwrap();
        assert_eq!(s.generators.len() as u64, gauss(5, 1, 2));
        assert!(s.passed(), "{s:?}");
        assert!(s.max_support_span <= 2);
        let s = small_generators(5, 2, 2, 3).unwrap();
        assert!(s.passed());
        assert!(s.max_support_span <= 4);
        let s = small_generators(5, 1, 2, 5).unwrap();
        assert_eq!(s.variant, ConeVariant::General);
        assert!(s.passed());
        assert!(matches!(small_generators(4, 2, 2, 3), Err(Error::NotBelowMiddle { .. })));
        // with ∂² ≠ 0 the level-2 family still covers the kernel but is not made of cycles
        let s = small_generators(5, 2, 2, 5).unwrap();
        assert!(s.kernel_in_span && s.supports_small);
        assert!(!s.all_cycles);
        assert!(small_generators(5, 1, 2, 4).is_err());
    }
}
