//! Coboundary expansion of the complete complex at desk scale.
//!
//! Cochains at level `k` are handled densely as vectors over Z/m indexed by
//! the canonical order of `Gr_k`. Exhaustive scans walk that index space in
//! odometer order (coordinate 0 fastest) and keep coboundary sums up to date
//! incrementally.

use std::collections::{BTreeMap, HashSet};

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::ambient::Ambient;
use crate::chain::{Chain, Cochain};
use crate::cone::{cone_size_bound, ConeEngine, ConeVariant, OrderedBasis};
use crate::error::{Error, Result};
use crate::field::{is_prime, Field};
use crate::homology::cohomology_dims;
use crate::operators::coboundary_cached;
use crate::qnum::{gauss, q_factorial, q_int};
use crate::ring::ModRing;
use crate::subspace::{echelonize, Subspace};
use crate::{budget, zmod};

pub type Rational = Ratio<u64>;

pub(crate) fn ser_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub(crate) fn ser_ratio_opt<S: Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Level `k` of the complete complex over Z/m, with the image of `d_{k-1}`
/// materialized so class norms are a minimum over a finite coset.
pub struct CochainSpace<'a> {
    amb: &'a Ambient,
    k: usize,
    ring: ModRing,
    image: Vec<Vec<u32>>,
}

impl<'a> CochainSpace<'a> {
    pub fn new(amb: &'a Ambient, k: usize, ring: ModRing) -> Result<Self> {
        let image = coboundary_image(amb, k, ring)?;
        Ok(CochainSpace { amb, k, ring, image })
    }

    pub fn ambient(&self) -> &Ambient {
        self.amb
    }

    pub fn level(&self) -> usize {
        self.k
    }

    pub fn ring(&self) -> ModRing {
        self.ring
    }

    /// `dim C^k`.
    pub fn dim(&self) -> usize {
        self.amb.level_size(self.k) as usize
    }

    /// `|B^k|`, the number of coboundaries.
    pub fn coboundary_count(&self) -> usize {
        self.image.len()
    }

    pub fn to_dense(&self, a: &Cochain) -> Result<Vec<u32>> {
        self.check(a)?;
        let mut v = vec![0u32; self.dim()];
        for (w, c) in a.iter() {
            v[self.amb.index_of(w)?] = c;
        }
        Ok(v)
    }

    pub fn from_dense(&self, v: &[u32]) -> Result<Cochain> {
        let level = self.amb.level(self.k)?;
        Chain::from_terms(
            self.amb.n(),
            self.k,
            self.ring,
            v.iter()
                .zip(level)
                .filter(|(&c, _)| c != 0)
                .map(|(&c, w)| (w.clone(), c as i64)),
        )
    }

    fn check(&self, a: &Cochain) -> Result<()> {
        if a.ambient_dim() != self.amb.n() {
            return Err(Error::AmbientMismatch {
                expected: self.amb.n(),
                found: a.ambient_dim(),
            });
        }
        if a.level() != self.k {
            return Err(Error::LevelMismatch {
                expected: self.k,
                found: a.level(),
            });
        }
        if a.ring() != self.ring {
            return Err(Error::RingMismatch {
                expected: self.ring.modulus(),
                found: a.ring().modulus(),
            });
        }
        Ok(())
    }

    /// `|d_k α|` for a dense cochain.
    pub fn coboundary_weight(&self, v: &[u32]) -> Result<usize> {
        if self.k >= self.amb.n() {
            return Ok(0);
        }
        let m = self.ring.modulus();
        Ok(self
            .amb
            .faces(self.k + 1)?
            .iter()
            .filter(|f| f.iter().map(|&i| v[i as usize]).fold(0, |s, x| (s + x) % m) != 0)
            .count())
    }

    /// `‖[α]‖` for a dense cochain.
    pub fn class_norm_dense(&self, v: &[u32]) -> usize {
        self.image
            .iter()
            .map(|b| v.iter().zip(b).filter(|(x, y)| x != y).count())
            .min()
            .unwrap_or(0)
    }
}

/// Every element of `im d_{k-1}` as a dense level-`k` vector, sorted.
fn coboundary_image(amb: &Ambient, k: usize, ring: ModRing) -> Result<Vec<Vec<u32>>> {
    let dim = amb.level_size(k) as usize;
    if k == 0 {
        return Ok(vec![vec![0; dim]]);
    }
    let m = ring.modulus();
    let mut gens: Vec<Vec<u32>> = amb
        .cofaces(k - 1)?
        .iter()
        .map(|c| {
            let mut g = vec![0u32; dim];
            for &i in c.iter() {
                g[i as usize] = 1;
            }
            g
        })
        .collect();
    let mut size: u128 = 1;
    for ((p, _), e) in zmod::factor(m).into_iter().zip(zmod::span_exponents(&gens, dim, m)?) {
        size = size.saturating_mul((p as u128).saturating_pow(e));
    }
    budget::check("coboundary coset", size.saturating_mul(dim as u128))?;
    if is_prime(m) {
        let mut basis = crate::sparse::FpBasis::new(m);
        gens.retain(|g| {
            basis.insert(
                g.iter()
                    .enumerate()
                    .filter(|e| *e.1 != 0)
                    .map(|(i, &x)| (i as u32, x))
                    .collect(),
            )
        });
    }
    let zero = vec![0u32; dim];
    let mut seen: HashSet<Vec<u32>> = HashSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y: Vec<u32> = x.iter().zip(g).map(|(&a, &b)| (a + b) % m).collect();
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    let mut out: Vec<Vec<u32>> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// `‖[α]‖ = min_β |α − d_{k-1} β|`, exact by coset enumeration.
pub fn class_norm(amb: &Ambient, a: &Cochain) -> Result<usize> {
    let space = CochainSpace::new(amb, a.level(), a.ring())?;
    let v = space.to_dense(a)?;
    Ok(space.class_norm_dense(&v))
}

/// Odometer over `(Z/m)^len` that tracks `d_k` sums and support sizes.
struct Walker<'a> {
    m: u32,
    cof: &'a [Box<[u32]>],
    vals: Vec<u32>,
    sums: Vec<u32>,
    d_weight: usize,
    support: usize,
}

impl<'a> Walker<'a> {
    fn new(m: u32, cof: &'a [Box<[u32]>], nup: usize, mut index: u64) -> Self {
        let mut w = Walker {
            m,
            cof,
            vals: vec![0; cof.len()],
            sums: vec![0; nup],
            d_weight: 0,
            support: 0,
        };
        for j in 0..cof.len() {
            let d = (index % m as u64) as u32;
            index /= m as u64;
            if d != 0 {
                w.set(j, d);
            }
        }
        w
    }

    fn set(&mut self, j: usize, v: u32) {
        let old = self.vals[j];
        if old == v {
            return;
        }
        let m = self.m;
        let delta = (v + m - old) % m;
        for &u in self.cof[j].iter() {
            let s = &mut self.sums[u as usize];
            let was = *s != 0;
            *s = (*s + delta) % m;
            match (was, *s != 0) {
                (false, true) => self.d_weight += 1,
                (true, false) => self.d_weight -= 1,
                _ => {}
            }
        }
        match (old != 0, v != 0) {
            (false, true) => self.support += 1,
            (true, false) => self.support -= 1,
            _ => {}
        }
        self.vals[j] = v;
    }

    fn step(&mut self) {
        for j in 0..self.vals.len() {
            let v = (self.vals[j] + 1) % self.m;
            self.set(j, v);
            if v != 0 {
                return;
            }
        }
    }

    /// Lowest nonzero coordinate value, if any.
    fn leading(&self) -> Option<u32> {
        self.vals.iter().copied().find(|&x| x != 0)
    }
}

/// Smallest element of each unit orbit `{u·c}` in Z/m.
fn orbit_representatives(ring: ModRing) -> Vec<bool> {
    let m = ring.modulus();
    (0..m)
        .map(|c| {
            (1..m)
                .filter(|&u| ring.is_unit(u))
                .all(|u| ring.mul(u, c) >= c)
        })
        .collect()
}

/// Splits `[0, total)` into contiguous chunks, folds each with a fresh
/// walker, and combines the per-chunk results in index order.
fn par_scan<A, F, C>(
    m: u32,
    cof: &[Box<[u32]>],
    nup: usize,
    total: u64,
    identity: impl Fn() -> A + Sync,
    fold: F,
    combine: C,
) -> A
where
    A: Send,
    F: Fn(&mut A, u64, &Walker) + Sync,
    C: Fn(A, A) -> A,
{
    let chunks = total.clamp(1, 1024);
    let per = total.div_ceil(chunks);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * per;
            let end = ((c + 1) * per).min(total);
            let mut acc = identity();
            if start >= end {
                return acc;
            }
            let mut w = Walker::new(m, cof, nup, start);
            for idx in start..end {
                fold(&mut acc, idx, &w);
                if idx + 1 < end {
                    w.step();
                }
            }
            acc
        })
        .collect();
    parts.into_iter().reduce(combine).unwrap_or_else(identity)
}

fn pow_checked(m: u32, len: usize, what: &'static str) -> Result<u64> {
    let total = (m as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    budget::check(what, total)?;
    Ok(total as u64)
}

type Candidate = Option<(Rational, u64)>;

fn better(a: Candidate, b: Candidate) -> Candidate {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y < x { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Exact `h_k` and its theoretical lower bound.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub m: u32,
    pub examined: u64,
    pub orbit_reduced: bool,
    /// Minimum of `|dα|/‖[α]‖` over `α ∉ B^k`; `None` when `C^k = B^k`.
    #[serde(serialize_with = "ser_ratio_opt")]
    pub h: Option<Rational>,
    pub witness: Option<Cochain>,
    /// The same minimum over `α ∉ Z^k`.
    #[serde(serialize_with = "ser_ratio_opt")]
    pub h_noncocycle: Option<Rational>,
    pub domains_agree: bool,
    /// `[n-k]_q / ([k+1]_q f(k))`, defined when `m | q+1` and `2k+1 <= n`.
    #[serde(serialize_with = "ser_ratio_opt")]
    pub bound: Option<Rational>,
    pub bound_holds: bool,
    /// `H^k = 0` from the cohomology engine, when `m` is a prime dividing `q+1`.
    pub cohomology_vanishes: Option<bool>,
    pub consistent: bool,
    pub verdict: String,
}

/// The cone-derived lower bound on `h_k`, when the cones exist.
pub fn expansion_bound(n: usize, k: usize, q: u32, m: u32) -> Option<Rational> {
    if 2 * k + 1 > n || !(q + 1).is_multiple_of(m) {
        return None;
    }
    let f = cone_size_bound(k, q).to_u64()?;
    Some(Rational::new(q_int(n - k, q), q_int(k + 1, q) * f))
}

/// Exact `h_k` of the complete complex over Z/m by exhausting `C^k`.
///
/// With `orbit` set, only one cochain per unit-scaling orbit is visited; the
/// ratio is invariant under multiplying by a unit.
pub fn expansion_constant(n: usize, k: usize, q: u32, m: u32, orbit: bool) -> Result<ExpansionReport> {
    if k >= n {
        return Err(Error::InvalidArgument(format!("level {k} has no coboundary in dimension {n}")));
    }
    let ring = ModRing::new(m)?;
    let amb = Ambient::with_q(q, n)?;
    let space = CochainSpace::new(&amb, k, ring)?;
    let len = space.dim();
    let total = pow_checked(m, len, "cochains")?;
    let cof = amb.cofaces(k)?;
    let nup = amb.level_size(k + 1) as usize;
    let reps = orbit_representatives(ring);
    let (examined, best_b, best_z) = par_scan(
        m,
        cof,
        nup,
        total,
        || (0u64, None, None),
        |acc: &mut (u64, Candidate, Candidate), idx, w| {
            if orbit {
                if let Some(c) = w.leading() {
                    if !reps[c as usize] {
                        return;
                    }
                }
            }
            acc.0 += 1;
            let norm = space.class_norm_dense(&w.vals);
            if norm == 0 {
                return;
            }
            let r = Some((Rational::new(w.d_weight as u64, norm as u64), idx));
            acc.1 = better(acc.1, r);
            if w.d_weight > 0 {
                acc.2 = better(acc.2, r);
            }
        },
        |a, b| (a.0 + b.0, better(a.1, b.1), better(a.2, b.2)),
    );
    let h = best_b.map(|b| b.0);
    let witness = match best_b {
        Some((_, idx)) => Some(space.from_dense(&Walker::new(m, cof, nup, idx).vals)?),
        None => None,
    };
    let h_noncocycle = best_z.map(|b| b.0);
    let bound = expansion_bound(n, k, q, m);
    let bound_holds = match (h, bound) {
        (Some(h), Some(b)) => h >= b,
        _ => true,
    };
    let cohomology_vanishes = if is_prime(m) && (q + 1).is_multiple_of(m) {
        let rep = cohomology_dims(n, q, m)?;
        Some(rep.levels[k].dim_h == 0)
    } else {
        None
    };
    let positive = h.is_some_and(|h| h > Rational::from_integer(0)) || h.is_none();
    let consistent = cohomology_vanishes.is_none_or(|v| v == positive);
    let domains_agree = h == h_noncocycle;
    let verdict = format!(
        "expansion: {}",
        if bound_holds && consistent { "PASS" } else { "FAIL" }
    );
    Ok(ExpansionReport {
        n,
        k,
        q,
        m,
        examined,
        orbit_reduced: orbit,
        h,
        witness,
        h_noncocycle,
        domains_agree,
        bound,
        bound_holds,
        cohomology_vanishes,
        consistent,
        verdict,
    })
}

/// Outcome of sampling the small-set inequality `|dα| ≥ [n-k]_q|α| − |α|(|α|−1)`.
#[derive(Clone, Debug, Serialize)]
pub struct SmallSetReport {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub m: u32,
    pub trials: usize,
    pub violations: usize,
    /// Samples whose right-hand side is `<= 0`.
    pub vacuous: usize,
    /// Minimum of `|dα| / rhs` over samples with `rhs > 0`.
    #[serde(serialize_with = "ser_ratio_opt")]
    pub tightest: Option<Rational>,
    /// Singletons seen, each required to have `|dα| = [n-k]_q`.
    pub singletons: usize,
    pub singletons_tight: bool,
}

impl SmallSetReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.singletons_tight
    }
}

/// Samples `trials` cochains with support size uniform in `1..=|Gr_k|` and
/// nonzero coefficients, and checks the small-set inequality on each.
pub fn small_set_bound_check(
    n: usize,
    k: usize,
    q: u32,
    m: u32,
    trials: usize,
    seed: u64,
) -> Result<SmallSetReport> {
    if k >= n {
        return Err(Error::InvalidArgument(format!("level {k} has no coboundary in dimension {n}")));
    }
    let ring = ModRing::new(m)?;
    if m < 2 {
        return Err(Error::BadModulus(m));
    }
    let amb = Ambient::with_q(q, n)?;
    let faces = amb.faces(k + 1)?;
    let len = amb.level_size(k) as usize;
    let deg = q_int(n - k, q) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SmallSetReport {
        n,
        k,
        q,
        m,
        trials,
        violations: 0,
        vacuous: 0,
        tightest: None,
        singletons: 0,
        singletons_tight: true,
    };
    let mut v = vec![0u32; len];
    for _ in 0..trials {
        v.iter_mut().for_each(|x| *x = 0);
        let s = rng.gen_range(1..=len);
        for i in sample(&mut rng, len, s) {
            v[i] = rng.gen_range(1..m);
        }
        let dw = faces
            .iter()
            .filter(|f| f.iter().map(|&i| v[i as usize]).fold(0, |a, x| ring.add(a, x)) != 0)
            .count() as i64;
        let s = s as i64;
        let rhs = deg * s - s * (s - 1);
        if s == 1 {
            rep.singletons += 1;
            rep.singletons_tight &= dw == deg;
        }
        if dw < rhs {
            rep.violations += 1;
        }
        if rhs <= 0 {
            rep.vacuous += 1;
        } else {
            let r = Rational::new(dw as u64, rhs as u64);
            rep.tightest = Some(rep.tightest.map_or(r, |t| t.min(r)));
        }
    }
    Ok(rep)
}

/// Best constant `c` in `|d_1 α| ≥ c|α|([n]_q − |α|)`.
#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub n: usize,
    pub q: u32,
    pub m: u32,
    pub exhaustive: bool,
    pub orbit_reduced: bool,
    pub examined: u64,
    #[serde(serialize_with = "ser_ratio_opt")]
    pub c: Option<Rational>,
    pub witness: Option<Cochain>,
    pub positive: bool,
}

/// Minimum of `|d_1 α| / (|α|([n]_q − |α|))` over nonzero line cochains with
/// a positive denominator.
///
/// Exhaustive when `m^{[n]_q}` fits the budget, visiting one cochain per
/// unit-scaling orbit (the ratio is scaling invariant). Otherwise `samples`
/// random cochains are drawn and the result is flagged as sampled.
pub fn restriction_inequality(n: usize, q: u32, m: u32, samples: usize, seed: u64) -> Result<RestrictionReport> {
    if n < 2 {
        return Err(Error::InvalidArgument("restriction inequality needs n >= 2".into()));
    }
    let ring = ModRing::new(m)?;
    let amb = Ambient::with_q(q, n)?;
    let space = CochainSpace { amb: &amb, k: 1, ring, image: Vec::new() };
    let len = space.dim();
    let cof = amb.cofaces(1)?;
    let nup = amb.level_size(2) as usize;
    let ratio = |d: usize, s: usize| -> Option<Rational> {
        (s > 0 && s < len).then(|| Rational::new(d as u64, (s * (len - s)) as u64))
    };
    let (exhaustive, examined, best, witness_vals) = match pow_checked(m, len, "cochains") {
        Ok(total) => {
            let reps = orbit_representatives(ring);
            let (examined, best) = par_scan(
                m,
                cof,
                nup,
                total,
                || (0u64, None),
                |acc: &mut (u64, Candidate), idx, w| {
                    match w.leading() {
                        Some(c) if reps[c as usize] => {}
                        _ => return,
                    }
                    acc.0 += 1;
                    acc.1 = better(acc.1, ratio(w.d_weight, w.support).map(|r| (r, idx)));
                },
                |a, b| (a.0 + b.0, better(a.1, b.1)),
            );
            let vals = best.map(|(_, idx)| Walker::new(m, cof, nup, idx).vals);
            (true, examined, best.map(|b| b.0), vals)
        }
        Err(e) if e.is_budget() => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<(Rational, Vec<u32>)> = None;
            for _ in 0..samples {
                let s = rng.gen_range(1..len);
                let mut v = vec![0u32; len];
                for i in sample(&mut rng, len, s) {
                    v[i] = rng.gen_range(1..m);
                }
                let r = ratio(space.coboundary_weight(&v)?, s).expect("0 < s < len");
                if best.as_ref().is_none_or(|b| r < b.0) {
                    best = Some((r, v));
                }
            }
            let (c, v) = best.unzip();
            (false, samples as u64, c, v)
        }
        Err(e) => return Err(e),
    };
    let witness = witness_vals.map(|v| space.from_dense(&v)).transpose()?;
    Ok(RestrictionReport {
        n,
        q,
        m,
        exhaustive,
        orbit_reduced: exhaustive,
        examined,
        c: best,
        witness,
        positive: best.is_some_and(|c| c > Rational::from_integer(0)),
    })
}

/// `G_α`: the support of a cochain, with edges between members meeting in
/// codimension one.
#[derive(Clone, Debug, Serialize)]
pub struct SupportGraph {
    pub vertices: Vec<Subspace>,
    pub edges: Vec<(usize, usize)>,
}

impl SupportGraph {
    pub fn new(field: &Field, a: &Cochain) -> Self {
        Self::from_vertices(field, a.support().cloned().collect())
    }

    pub fn from_vertices(field: &Field, vertices: Vec<Subspace>) -> Self {
        let mut edges = Vec::new();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                let (u, w) = (&vertices[i], &vertices[j]);
                let meet = u.intersect(field, w).expect("same ambient");
                if u.dim() == w.dim() && meet.dim() + 1 == u.dim() {
                    edges.push((i, j));
                }
            }
        }
        SupportGraph { vertices, edges }
    }

    /// Connected components as sorted vertex index lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.vertices.len() {
            let r = root(&mut parent, v);
            comps.entry(r).or_default().push(v);
        }
        comps.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

/// One bucket of `g_n(m', θ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GBucket {
    pub m: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub theta: Rational,
    pub count: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GTable {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub m: u32,
    pub max_size: usize,
    pub buckets: Vec<GBucket>,
    /// `1 − 1/([k]_q!² (1 + Σ_{j=1..k} 1/[j]_q!²))`.
    #[serde(serialize_with = "ser_ratio")]
    pub theta_display: Rational,
    /// `1 − 1/([k+1]_q f(k))`, the threshold implied by the cone bound on `h_k`.
    #[serde(serialize_with = "ser_ratio_opt")]
    pub theta_expansion: Option<Rational>,
    pub display_vanishing: bool,
    pub expansion_vanishing: Option<bool>,
    pub verdict: String,
}

impl GTable {
    /// Buckets with `θ` strictly above `threshold`.
    pub fn above(&self, threshold: Rational) -> Vec<&GBucket> {
        self.buckets.iter().filter(|b| b.theta > threshold).collect()
    }
}

/// `θ_k` as displayed: `1 − 1/([k]_q!² (1 + Σ_{j=1..k} 1/[j]_q!²))`.
pub fn theta_display(k: usize, q: u32) -> Result<Rational> {
    let fact = |j: usize| -> Result<u64> {
        let f = q_factorial(j as u64, q as u64);
        f.to_u64()
            .and_then(|f| f.checked_mul(f))
            .ok_or_else(|| Error::InvalidArgument("q-factorial overflows".into()))
    };
    let mut s = Rational::from_integer(1);
    for j in 1..=k {
        s += Rational::new(1, fact(j)?);
    }
    let denom = s * Rational::from_integer(fact(k)?);
    Ok(Rational::from_integer(1) - denom.recip())
}

/// `1 − 1/([k+1]_q f(k))`; requires `m | q+1`.
pub fn theta_expansion(n: usize, k: usize, q: u32, m: u32) -> Option<Rational> {
    expansion_bound(n, k, q, m).map(|_| {
        let f = cone_size_bound(k, q).to_u64().expect("small k");
        Rational::from_integer(1) - Rational::new(1, q_int(k + 1, q) * f)
    })
}

/// Exhaustive table of `g_n(m', θ)`: cochains with `|φ| = ‖[φ]‖ = m' <=
/// max_size` and connected support graph, bucketed by
/// `θ = 1 − |dφ| / (m' [n-k]_q)`.
pub fn enumerate_minimal_connected(n: usize, k: usize, q: u32, m: u32, max_size: usize) -> Result<GTable> {
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("level {k} outside 1..{n}")));
    }
    let ring = ModRing::new(m)?;
    let amb = Ambient::with_q(q, n)?;
    let space = CochainSpace::new(&amb, k, ring)?;
    let len = space.dim();
    let mut total: u128 = 0;
    for s in 1..=max_size.min(len) {
        total = total.saturating_add(
            num_integer::binomial(len as u128, s as u128).saturating_mul((m as u128 - 1).saturating_pow(s as u32)),
        );
    }
    budget::check("minimal cochains", total)?;
    let field = amb.field();
    let level = amb.level(k)?;
    let deg = q_int(n - k, q);
    let mut adjacent = vec![vec![false; len]; len];
    for i in 0..len {
        for j in i + 1..len {
            let meet = level[i].intersect(field, &level[j])?;
            adjacent[i][j] = meet.dim() + 1 == k;
            adjacent[j][i] = adjacent[i][j];
        }
    }
    let connected = |s: &[usize]| {
        let mut seen = vec![false; s.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..s.len() {
                if !seen[b] && adjacent[s[a]][s[b]] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|x| x)
    };
    let mut counts: BTreeMap<(usize, Rational), u64> = BTreeMap::new();
    for s in 1..=max_size.min(len) {
        let supports: Vec<Vec<usize>> = combinations(len, s).filter(|c| connected(c)).collect();
        let part: Vec<BTreeMap<(usize, Rational), u64>> = supports
            .par_iter()
            .map(|supp| {
                let mut local = BTreeMap::new();
                let mut coeffs = vec![1u32; s];
                let mut v = vec![0u32; len];
                loop {
                    for (&i, &c) in supp.iter().zip(&coeffs) {
                        v[i] = c;
                    }
                    if space.class_norm_dense(&v) == s {
                        let dw = space.coboundary_weight(&v).expect("level below n") as u64;
                        let full = s as u64 * deg;
                        *local.entry((s, Rational::new(full - dw, full))).or_insert(0) += 1;
                    }
                    let mut j = 0;
                    while j < s {
                        coeffs[j] += 1;
                        if coeffs[j] < m {
                            break;
                        }
                        coeffs[j] = 1;
                        j += 1;
                    }
                    if j == s {
                        break;
                    }
                }
                local
            })
            .collect();
        for local in part {
            for (key, c) in local {
                *counts.entry(key).or_insert(0) += c;
            }
        }
    }
    let buckets: Vec<GBucket> = counts
        .into_iter()
        .map(|((m, theta), count)| GBucket { m, theta, count })
        .collect();
    let theta_display = theta_display(k, q)?;
    let theta_expansion = theta_expansion(n, k, q, m);
    let display_vanishing = buckets.iter().all(|b| b.theta <= theta_display);
    let expansion_vanishing = theta_expansion.map(|t| buckets.iter().all(|b| b.theta <= t));
    let verdict = format!(
        "gtable-vanishing: {}",
        if display_vanishing { "PASS" } else { "FAIL" }
    );
    Ok(GTable {
        n,
        k,
        q,
        m,
        max_size,
        buckets,
        theta_display,
        theta_expansion,
        display_vanishing,
        expansion_vanishing,
        verdict,
    })
}

/// Lexicographic `s`-subsets of `0..len`.
fn combinations(len: usize, s: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (s <= len).then(|| (0..s).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().expect("checked");
        let mut i = s;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < len - s + i {
                c[i] += 1;
                for j in i + 1..s {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// One tested cochain in the averaged contraction check.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionRow {
    pub support: usize,
    pub coboundary_weight: usize,
    /// Mean of `|α − d ι_s α|` over all bases `s`.
    #[serde(serialize_with = "ser_ratio")]
    pub mean_residual: Rational,
    /// `|Gr_k| f(k) |dα| / |Gr_{k+1}|`.
    #[serde(serialize_with = "ser_ratio")]
    pub bound: Rational,
    pub holds: bool,
    /// Smallest residual seen; never below `‖[α]‖`.
    pub min_residual: usize,
    pub class_norm: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractionReport {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub m: u32,
    pub bases: u64,
    pub rows: Vec<ContractionRow>,
}

impl ContractionReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.holds && r.min_residual >= r.class_norm)
    }
}

/// Every ordered independent tuple of `len` vectors in F_q^n.
fn ordered_prefixes(field: &Field, n: usize, len: usize) -> Result<Vec<Vec<Vec<u8>>>> {
    let q = field.q() as u128;
    let count: u128 = (0..len as u32).map(|i| q.pow(n as u32) - q.pow(i)).product();
    budget::check("ordered bases", count.saturating_mul(len as u128))?;
    let all: Vec<Vec<u8>> = Subspace::ambient(n).vectors(field);
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for pre in &out {
            for v in &all {
                let mut m: Vec<Vec<u8>> = pre.clone();
                m.push(v.clone());
                if echelonize(field, &mut m) == pre.len() + 1 {
                    let mut p = pre.clone();
                    p.push(v.clone());
                    next.push(p);
                }
            }
        }
        out = next;
    }
    Ok(out)
}

/// Checks `E_s |α − d ι_s α| ≤ |Gr_k| f(k) |dα| / |Gr_{k+1}|`, averaging over
/// every ordered independent `(2k+1)`-tuple `s`.
pub fn averaged_contraction_check(n: usize, k: usize, q: u32, m: u32, alphas: &[Cochain]) -> Result<ContractionReport> {
    if k == 0 || 2 * k + 1 > n {
        return Err(Error::ConeUndefined { level: k, available: n });
    }
    let ring = ModRing::new(m)?;
    ring.require_divides_q_plus_one(q)?;
    let amb = Ambient::with_q(q, n)?;
    let space = CochainSpace::new(&amb, k, ring)?;
    let field = amb.field().clone();
    let prefixes = ordered_prefixes(&field, n, 2 * k + 1)?;
    let dense: Vec<Vec<u32>> = alphas.iter().map(|a| space.to_dense(a)).collect::<Result<_>>()?;
    let residuals: Vec<Vec<usize>> = prefixes
        .par_iter()
        .map(|p| -> Result<Vec<usize>> {
            let basis = OrderedBasis::new(&field, n, p.clone())?;
            let engine = ConeEngine::new(field.clone(), basis, ring, ConeVariant::Modular)?;
            alphas
                .iter()
                .map(|a| {
                    let iota = engine.contraction(&amb, a)?;
                    Ok(a.minus(&coboundary_cached(&amb, &iota)?)?.len())
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let count = prefixes.len() as u64;
    let b = cone_size_bound(k, q).to_u64().expect("small k");
    let (gk, gk1) = (gauss(n, k, q), gauss(n, k + 1, q));
    let rows = dense
        .iter()
        .enumerate()
        .map(|(i, v)| -> Result<ContractionRow> {
            let sum: u64 = residuals.iter().map(|r| r[i] as u64).sum();
            let dw = space.coboundary_weight(v)?;
            let mean = Rational::new(sum, count);
            let bound = Rational::new(gk * b * dw as u64, gk1);
            Ok(ContractionRow {
                support: v.iter().filter(|&&x| x != 0).count(),
                coboundary_weight: dw,
                mean_residual: mean,
                bound,
                holds: mean <= bound,
                min_residual: residuals.iter().map(|r| r[i]).min().unwrap_or(0),
                class_norm: space.class_norm_dense(v),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ContractionReport {
        n,
        k,
        q,
        m,
        bases: count,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: u64, b: u64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn class_norm_of_a_line() {
        let amb = Ambient::with_q(2, 3).unwrap();
        let ring = ModRing::new(3).unwrap();
        let line = amb.level(1).unwrap()[0].clone();
        let a = Chain::generator(line, 1, ring);
        assert_eq!(class_norm(&amb, &a).unwrap(), 1);
        // the all-ones cochain is d of the zero-space generator
        let all = Chain::from_terms(3, 1, ring, amb.level(1).unwrap().iter().map(|l| (l.clone(), 2))).unwrap();
        assert_eq!(class_norm(&amb, &all).unwrap(), 0);
        // six lines at coefficient 1 sit one coboundary away from a singleton
        let six = all.minus(&Chain::generator(amb.level(1).unwrap()[3].clone(), 2, ring)).unwrap();
        assert_eq!(six.len(), 6);
        assert_eq!(class_norm(&amb, &six).unwrap(), 1);
    }

    #[test]
    fn exact_expansion_at_small_scale() {
        let rep = expansion_constant(3, 1, 2, 3, false).unwrap();
        assert_eq!(rep.examined, 3u64.pow(7));
        assert_eq!(rep.h, Some(r(1, 2)));
        assert_eq!(rep.h_noncocycle, Some(r(1, 2)));
        assert_eq!(rep.bound, Some(r(1, 6)));
        assert!(rep.bound_holds && rep.domains_agree);
        assert_eq!(rep.cohomology_vanishes, Some(true));
        assert!(rep.consistent);
        let w = rep.witness.unwrap();
        let amb = Ambient::with_q(2, 3).unwrap();
        let space = CochainSpace::new(&amb, 1, ModRing::new(3).unwrap()).unwrap();
        let v = space.to_dense(&w).unwrap();
        assert_eq!(r(space.coboundary_weight(&v).unwrap() as u64, space.class_norm_dense(&v) as u64), r(1, 2));

        let reduced = expansion_constant(3, 1, 2, 3, true).unwrap();
        assert_eq!(reduced.h, rep.h);
        assert!(reduced.examined < rep.examined);
    }

    #[test]
    fn small_set_inequality_holds() {
        let rep = small_set_bound_check(4, 1, 2, 3, 1000, 11).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.singletons > 0 && rep.singletons_tight);
        assert!(rep.vacuous > 0);
    }

    #[test]
    fn restriction_constant_matches_oracle() {
        let rep = restriction_inequality(3, 2, 3, 0, 0).unwrap();
        assert!(rep.exhaustive);
        assert_eq!(rep.c, Some(r(1, 6)));
        assert!(rep.positive);
        let w = rep.witness.unwrap();
        assert!(!w.is_empty() && w.len() < 7);
    }

    #[test]
    fn support_graph_adjacency() {
        let f = Field::new(2).unwrap();
        let ring = ModRing::new(3).unwrap();
        // planes of F_2^4 meeting only in 0 are not adjacent
        let p1 = Subspace::coordinate(4, &[0, 1]);
        let p2 = Subspace::coordinate(4, &[2, 3]);
        let p3 = Subspace::coordinate(4, &[1, 2]);
        let a = Chain::from_terms(4, 2, ring, [(p1.clone(), 1), (p2.clone(), 1)]).unwrap();
        let g = SupportGraph::new(&f, &a);
        assert!(g.edges.is_empty() && !g.is_connected());
        let b = Chain::from_terms(4, 2, ring, [(p1, 1), (p2, 1), (p3, 2)]).unwrap();
        let g = SupportGraph::new(&f, &b);
        assert_eq!(g.edges.len(), 2);
        assert!(g.is_connected());
        // distinct lines always meet in the zero space
        let l = Chain::from_terms(
            3,
            1,
            ring,
            [(Subspace::coordinate(3, &[0]), 1), (Subspace::coordinate(3, &[1]), 1)],
        )
        .unwrap();
        assert!(SupportGraph::new(&f, &l).is_connected());
    }

    #[test]
    fn gtable_matches_oracle() {
        let t = enumerate_minimal_connected(3, 1, 2, 3, 4).unwrap();
        let got: Vec<(usize, Rational, u64)> = t.buckets.iter().map(|b| (b.m, b.theta, b.count)).collect();
        let want = vec![
            (1, r(0, 1), 14),
            (2, r(1, 6), 42),
            (2, r(1, 3), 42),
            (3, r(2, 9), 42),
            (3, r(1, 3), 70),
            (3, r(5, 9), 168),
            (4, r(1, 2), 168),
            (4, r(7, 12), 168),
            (4, r(3, 4), 112),
            (4, r(5, 6), 42),
        ];
        assert_eq!(got, want);
        assert_eq!(t.theta_display, r(1, 2));
        assert_eq!(t.theta_expansion, Some(r(17, 18)));
        assert!(!t.display_vanishing);
        assert_eq!(t.expansion_vanishing, Some(true));
    }

    #[test]
    fn theta_display_values() {
        assert_eq!(theta_display(1, 2).unwrap(), r(1, 2));
        // [2]_2! = 3: 1 - 1/(9 (1 + 1 + 1/9)) = 1 - 1/19
        assert_eq!(theta_display(2, 2).unwrap(), r(18, 19));
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        assert_eq!(combinations(5, 2).count(), 10);
        assert_eq!(combinations(4, 4).collect::<Vec<_>>(), vec![vec![0, 1, 2, 3]]);
        assert_eq!(combinations(3, 4).count(), 0);
    }

    #[test]
    fn averaged_contraction_inequality() {
        let amb = Ambient::with_q(2, 3).unwrap();
        let ring = ModRing::new(3).unwrap();
        let lines = amb.level(1).unwrap();
        let alphas: Vec<Cochain> = vec![
            Chain::generator(lines[0].clone(), 1, ring),
            Chain::from_terms(3, 1, ring, [(lines[0].clone(), 1), (lines[4].clone(), 2)]).unwrap(),
            Chain::from_terms(3, 1, ring, [(lines[1].clone(), 1), (lines[2].clone(), 1), (lines[6].clone(), 1)])
                .unwrap(),
        ];
        let rep = averaged_contraction_check(3, 1, 2, 3, &alphas).unwrap();
        assert_eq!(rep.bases, 7 * 6 * 4);
        assert!(rep.passed(), "{rep:?}");
    }
}
