//! The independence complex `G_n` of the complete q-complex: simplicial faces
//! are sets of independent lines of F_q^n.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::ambient::Ambient;
use crate::cone::OrderedBasis;
use crate::error::{Error, Result};
use crate::expansion::{ser_ratio, Rational};
use crate::field::Field;
use crate::subspace::{echelonize, Subspace};

/// A face: sorted indices into the line level of the ambient.
pub type Face = Vec<u32>;

/// A simplicial chain over F_2.
pub type F2Chain = BTreeSet<Face>;

#[derive(Debug)]
pub struct IndependenceComplex {
    amb: Ambient,
    /// `faces[s]` lists the faces with `s` lines; `faces[0] = [∅]`.
    faces: Vec<Vec<Face>>,
}

/// `Π_{i<k} (q^n − q^i) / (q−1)^k`, the number of ordered independent
/// `k`-tuples of lines.
pub fn ordered_face_count(n: usize, k: usize, q: u32) -> BigUint {
    let q = BigUint::from(q);
    let qn = q.pow(n as u32);
    let mut num = BigUint::one();
    for i in 0..k as u32 {
        num *= &qn - q.pow(i);
    }
    num / (q - 1u32).pow(k as u32)
}

impl IndependenceComplex {
    /// Faces with up to `k_max` lines.
    pub fn new(n: usize, k_max: usize, q: u32) -> Result<Self> {
        let amb = Ambient::with_q(q, n)?;
        let field = amb.field().clone();
        let lines: Vec<Vec<u8>> = amb.level(1)?.iter().map(|l| l.row(0).to_vec()).collect();
        let mut faces: Vec<Vec<Face>> = vec![vec![Vec::new()]];
        for s in 1..=k_max.min(n) {
            let mut next = Vec::new();
            for f in &faces[s - 1] {
                let start = f.last().map_or(0, |&l| l as usize + 1);
                for l in start..lines.len() {
                    let mut rows: Vec<Vec<u8>> = f.iter().map(|&i| lines[i as usize].clone()).collect();
                    rows.push(lines[l].clone());
                    if echelonize(&field, &mut rows) == s {
                        let mut g = f.clone();
                        g.push(l as u32);
                        next.push(g);
                    }
                }
            }
            crate::budget::check("independent faces", next.len() as u128)?;
            faces.push(next);
        }
        Ok(IndependenceComplex { amb, faces })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.amb
    }

    pub fn n(&self) -> usize {
        self.amb.n()
    }

    pub fn k_max(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn faces(&self, s: usize) -> &[Face] {
        self.faces.get(s).map_or(&[], Vec::as_slice)
    }

    /// Number of faces with `s` lines, as sets.
    pub fn face_count(&self, s: usize) -> usize {
        self.faces(s).len()
    }

    /// Number of faces with `s` lines counted as ordered tuples.
    pub fn ordered_count(&self, s: usize) -> BigUint {
        (1..=s as u64).fold(BigUint::from(self.face_count(s)), |a, i| a * i)
    }

    /// Whether the lines of `f` are independent.
    pub fn is_face(&self, f: &[u32]) -> Result<bool> {
        let lines = self.amb.level(1)?;
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(f.len());
        for &i in f {
            rows.push(lines.get(i as usize).ok_or_else(|| bad_line(i))?.row(0).to_vec());
        }
        let set: BTreeSet<u32> = f.iter().copied().collect();
        Ok(set.len() == f.len() && echelonize(self.amb.field(), &mut rows) == f.len())
    }

    /// Span of every line appearing in `faces`.
    fn span_of<'a>(&self, faces: impl Iterator<Item = &'a Face>) -> Result<Subspace> {
        let lines = self.amb.level(1)?;
        let rows: Vec<Vec<u8>> = faces
            .flatten()
            .map(|&i| lines[i as usize].row(0).to_vec())
            .collect();
        Ok(Subspace::span(self.amb.field(), self.n(), &rows))
    }
}

fn bad_line(i: u32) -> Error {
    Error::InvalidArgument(format!("line index {i} out of range"))
}

/// Simplicial boundary over F_2, augmented: the boundary of a vertex is `∅`.
pub fn simplicial_boundary(x: &F2Chain) -> F2Chain {
    let mut out = F2Chain::new();
    for f in x {
        for i in 0..f.len() {
            let mut g = f.clone();
            g.remove(i);
            toggle(&mut out, g);
        }
    }
    out
}

fn toggle(c: &mut F2Chain, f: Face) {
    if !c.remove(&f) {
        c.insert(f);
    }
}

/// `Cone_v(τ)`: `v ∪ τ` when `v ∉ τ`, zero otherwise, extended over F_2.
pub fn cone_vertex(v: u32, x: &F2Chain) -> F2Chain {
    let mut out = F2Chain::new();
    for f in x {
        if let Err(pos) = f.binary_search(&v) {
            let mut g = f.clone();
            g.insert(pos, v);
            toggle(&mut out, g);
        }
    }
    out
}

/// The cone `c'_{b,·}` over F_2 on faces of `G_n` with fewer than `n/2`
/// lines.
pub struct SimplicialCone<'a> {
    complex: &'a IndependenceComplex,
    basis_lines: Vec<u32>,
    basis: Vec<Vec<u8>>,
}

impl<'a> SimplicialCone<'a> {
    pub fn new(complex: &'a IndependenceComplex, basis: &OrderedBasis) -> Result<Self> {
        let amb = complex.ambient();
        if basis.ambient_dim() != amb.n() {
            return Err(Error::AmbientMismatch {
                expected: amb.n(),
                found: basis.ambient_dim(),
            });
        }
        let basis_lines = basis
            .vectors()
            .iter()
            .map(|v| amb.index_of(&Subspace::span(amb.field(), amb.n(), &[v])).map(|i| i as u32))
            .collect::<Result<_>>()?;
        Ok(SimplicialCone {
            complex,
            basis_lines,
            basis: basis.vectors().to_vec(),
        })
    }

    /// `c'_{b,σ}`.
    pub fn cone_of(&self, sigma: &[u32]) -> Result<F2Chain> {
        let n = self.complex.n();
        if 2 * sigma.len() >= n {
            return Err(Error::NotBelowMiddle {
                level: sigma.len(),
                n,
            });
        }
        if !self.complex.is_face(sigma)? {
            return Err(Error::InvalidArgument("not a face of the independence complex".into()));
        }
        let mut face: Face = sigma.to_vec();
        face.sort_unstable();
        self.compute(&face)
    }

    fn compute(&self, sigma: &Face) -> Result<F2Chain> {
        if sigma.is_empty() {
            let b1 = *self.basis_lines.first().ok_or(Error::ConeUndefined {
                level: 0,
                available: 0,
            })?;
            return Ok(F2Chain::from([vec![b1]]));
        }
        let below = self.cone(&simplicial_boundary(&F2Chain::from([sigma.clone()])))?;
        let mut x = below;
        toggle(&mut x, sigma.clone());
        let span = self.complex.span_of(x.iter().chain(std::iter::once(sigma)))?;
        let field: &Field = self.complex.ambient().field();
        let i = self
            .basis
            .iter()
            .position(|b| !span.contains_vector(field, b))
            .ok_or(Error::ConeUndefined {
                level: sigma.len(),
                available: self.basis.len(),
            })?;
        Ok(cone_vertex(self.basis_lines[i], &x))
    }

    /// `c'_{b,x}`, extended linearly.
    pub fn cone(&self, x: &F2Chain) -> Result<F2Chain> {
        let mut out = F2Chain::new();
        for f in x {
            for g in self.compute(f)? {
                toggle(&mut out, g);
            }
        }
        Ok(out)
    }

    /// `∂c'_σ + σ + c'_{∂σ}` over F_2; empty exactly when the identity holds.
    pub fn identity_defect(&self, sigma: &[u32]) -> Result<F2Chain> {
        let c = self.cone_of(sigma)?;
        let mut face: Face = sigma.to_vec();
        face.sort_unstable();
        let mut d = simplicial_boundary(&c);
        toggle(&mut d, face.clone());
        if !face.is_empty() {
            for g in self.cone(&simplicial_boundary(&F2Chain::from([face])))? {
                toggle(&mut d, g);
            }
        }
        Ok(d)
    }
}

/// `f(0) = 1`, `f(i) = 1 + i f(i−1)`.
pub fn simplicial_cone_bound(i: usize) -> u64 {
    (1..=i as u64).fold(1, |f, j| 1 + j * f)
}

/// Result of checking simplicial cones on every small face.
#[derive(Clone, Debug, Serialize)]
pub struct SimplicialConeReport {
    pub n: usize,
    pub q: u32,
    /// Per face size: faces checked, identity failures, largest cone, bound.
    pub levels: Vec<SimplicialConeLevel>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplicialConeLevel {
    pub size: usize,
    pub faces: usize,
    pub failures: usize,
    pub max_cone: usize,
    pub bound: u64,
}

impl SimplicialConeReport {
    pub fn passed(&self) -> bool {
        self.levels.iter().all(|l| l.failures == 0 && l.max_cone as u64 <= l.bound)
    }
}

/// Checks the cone identity and size bound on all faces with fewer than
/// `n/2` lines, for the given basis.
pub fn check_simplicial_cones(n: usize, q: u32, basis: &OrderedBasis) -> Result<SimplicialConeReport> {
    let top = (n - 1) / 2;
    let complex = IndependenceComplex::new(n, top, q)?;
    let cone = SimplicialCone::new(&complex, basis)?;
    let mut levels = Vec::new();
    for s in 0..=top {
        let mut lvl = SimplicialConeLevel {
            size: s,
            faces: 0,
            failures: 0,
            max_cone: 0,
            bound: simplicial_cone_bound(s),
        };
        for f in complex.faces(s) {
            lvl.faces += 1;
            lvl.max_cone = lvl.max_cone.max(cone.cone_of(f)?.len());
            if !cone.identity_defect(f)?.is_empty() {
                lvl.failures += 1;
            }
        }
        levels.push(lvl);
    }
    Ok(SimplicialConeReport { n, q, levels })
}

/// Local sparsity of `G_n` at face size `k`.
#[derive(Clone, Debug, Serialize)]
pub struct SparsityReport {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    /// `|G_n(k)|` as sets of lines.
    pub faces: usize,
    /// The same count as ordered tuples; equals the closed-form product.
    pub ordered_faces: String,
    pub formula_matches: bool,
    /// Largest `|{τ : τ ∩ σ ≠ ∅}|` over faces `σ`.
    pub max_intersecting: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub fraction: Rational,
    /// `k |G_n(1)|^{k−1}`.
    pub union_bound: u64,
    pub bound_holds: bool,
}

/// Maximum over `σ ∈ G_n(k)` of the number of faces sharing a line with `σ`.
pub fn local_sparsity(n: usize, k: usize, q: u32) -> Result<SparsityReport> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("face size {k} outside 1..={n}")));
    }
    let complex = IndependenceComplex::new(n, k, q)?;
    let faces = complex.faces(k);
    let lines = complex.face_count(1);
    let max_intersecting = faces
        .iter()
        .map(|s| faces.iter().filter(|t| t.iter().any(|l| s.binary_search(l).is_ok())).count())
        .max()
        .unwrap_or(0);
    let union_bound = k as u64 * (lines as u64).pow(k as u32 - 1);
    let ordered = complex.ordered_count(k);
    Ok(SparsityReport {
        n,
        k,
        q,
        faces: faces.len(),
        ordered_faces: ordered.to_string(),
        formula_matches: ordered == ordered_face_count(n, k, q),
        max_intersecting,
        fraction: Rational::new(max_intersecting as u64, faces.len().max(1) as u64),
        union_bound,
        bound_holds: max_intersecting as u64 <= union_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_counts_match_formula() {
        let c = IndependenceComplex::new(3, 3, 2).unwrap();
        assert_eq!(c.face_count(1), 7);
        assert_eq!(c.face_count(2), 21);
        assert_eq!(c.ordered_count(2), BigUint::from(42u32));
        assert_eq!(ordered_face_count(3, 2, 2), BigUint::from(42u32));
        for s in 0..=3 {
            assert_eq!(c.ordered_count(s), ordered_face_count(3, s, 2));
            for f in c.faces(s) {
                assert!(c.is_face(f).unwrap());
            }
        }
        let c = IndependenceComplex::new(3, 2, 3).unwrap();
        assert_eq!(c.ordered_count(2), ordered_face_count(3, 2, 3));
    }

    #[test]
    fn empty_face_cone_is_first_basis_line() {
        let c = IndependenceComplex::new(4, 1, 2).unwrap();
        let b = OrderedBasis::standard(4);
        let cone = SimplicialCone::new(&c, &b).unwrap();
        let e1 = c.ambient().index_of(&Subspace::coordinate(4, &[0])).unwrap() as u32;
        assert_eq!(cone.cone_of(&[]).unwrap(), F2Chain::from([vec![e1]]));
    }

    #[test]
    fn cone_identity_on_small_faces() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [3, 4, 5] {
            let f = Field::new(2).unwrap();
            for basis in [OrderedBasis::standard(n), OrderedBasis::random(&f, n, &mut rng)] {
                let rep = check_simplicial_cones(n, 2, &basis).unwrap();
                assert!(rep.passed(), "{rep:?}");
            }
        }
    }

    #[test]
    fn cone_rejects_large_faces() {
        let c = IndependenceComplex::new(4, 2, 2).unwrap();
        let cone = SimplicialCone::new(&c, &OrderedBasis::standard(4)).unwrap();
        let f = c.faces(2)[0].clone();
        assert!(matches!(cone.cone_of(&f), Err(Error::NotBelowMiddle { .. })));
    }

    #[test]
    fn sparsity_matches_enumeration() {
        let r1 = local_sparsity(3, 1, 2).unwrap();
        assert_eq!(r1.fraction, Rational::new(1, 7));
        let r3 = local_sparsity(3, 2, 2).unwrap();
        assert_eq!((r3.faces, r3.max_intersecting, r3.union_bound), (21, 11, 14));
        assert!(r3.bound_holds && r3.formula_matches);
        let r4 = local_sparsity(4, 2, 2).unwrap();
        assert_eq!((r4.faces, r4.max_intersecting), (105, 27));
        assert!(r4.fraction < r3.fraction);
    }
}
