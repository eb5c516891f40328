//! Khovanov and Bar-Natan homology of links, together with the chain maps
//! and homology maps induced by link cobordisms presented as movies.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//!   diagram  ->  complex  ->  homology
//!      |            ^
//!      v            |
//!    movie  ->  chain maps -> induced maps on homology
//! ```
//!
//! with two independent back ends: the direct cube-of-resolutions
//! construction ([`complex`]) and the formal cobordism-category route
//! ([`formal`]) that applies a TQFT only at the very end.

pub mod ring;
pub mod linalg;
pub mod poly;
pub mod diagram;
pub mod algebra;
pub mod complex;
pub mod formal;
pub mod movie;
pub mod invariants;

pub use ring::{Ring, EucRing, Int, F2, F2Poly};
pub use diagram::{LinkDiagram, Smoothing, EdgeData, EdgeKind};
pub use algebra::{Theory, TheoryKind, Label};
pub use complex::{Gen, Chain, GradedComplex, HomologyModule};
pub use movie::{Movie, MovieMap};
