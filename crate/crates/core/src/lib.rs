//! Chains, cones, homology and expansion on complete q-complexes.
//!
//! The complete q-complex on F_q^n has the subspaces of F_q^n as faces, graded
//! by dimension. Chains carry coefficients in Z/m, and the boundary of a
//! `k`-space is the sum of its codimension-one subspaces.

#![allow(clippy::needless_range_loop)]

pub mod ambient;
pub mod budget;
pub mod chain;
pub mod cone;
pub mod error;
pub mod expansion;
pub mod field;
pub mod homology;
pub mod independence;
pub mod operators;
pub mod qnum;
pub mod random;
pub mod repro;
pub mod ring;
pub mod sparse;
pub mod special;
pub mod subspace;
pub mod zmod;

pub use ambient::Ambient;
pub use chain::{Chain, Cochain};
pub use error::{Error, Result};
pub use field::Field;
pub use ring::ModRing;
pub use subspace::Subspace;
