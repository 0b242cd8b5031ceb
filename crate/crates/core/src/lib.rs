//! Exact verification toolkit for Nielsen automorphisms of free groups and
//! the Euclidean geometry of their translation actions.
//!
//! * [`freeword`]: reduced words in `F_n`.
//! * [`autgroup`]: automorphisms as products of elementary generators, relation checking.
//! * [`glrep`]: the index-two cover of `F_3`, Reidemeister–Schreier rewriting and the
//!   2×2 integer representation on the Galois `(-1)`-eigenspace.
//! * [`latgeom`]: rational lattices, Voronoi cells and polytope classification.
//! * [`flatact`]: translation actions, affine isometries, induced actions and the flat model
//!   of the Nielsen `Z^4`.

pub mod autgroup;
pub mod flatact;
pub mod freeword;
pub mod glrep;
pub mod intmat;
pub mod latgeom;
pub mod report;

pub use freeword::{Letter, Word, WordError};
pub use report::{Check, Report};
