//! Totally symmetric colored graphs over finite fields.
//!
//! Finite-field tables, the colored Cayley graph families, one-dimensional
//! semilinear groups in Foulser standard form, symmetry and isomorphism
//! checks, exhaustive search over `GL_r(p)` for color-permuting matrices,
//! and the classification replay that ties them together.

pub mod error;
pub mod field;
pub mod graphs;
pub mod iso;
pub mod linalg;
pub mod perm;
pub mod search;
pub mod semilinear;
pub mod symmetry;
mod poly;
pub mod report;

pub use error::{Error, Result};
pub use field::{build_field, build_field_with_root, is_irreducible, Elem, FieldTable};
pub use graphs::ColoredCayleyGraph;
pub use linalg::LinearMap;
pub use perm::{ColorPermutation, GroupSummary};
pub use semilinear::{FoulserTriple, GammaElem, GammaL1};
