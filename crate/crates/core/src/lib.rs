//! Exact certification that the quadratic ideal of a Veronese embedding, or
//! of a high-degree re-embedding of a projective scheme, is spanned by
//! quadrics of rank 3.
//!
//! The heavy lifting is generic over [`field::Field`]; [`field::FieldSpec`]
//! selects a concrete field at run time.

pub mod certify;
pub mod cli;
pub mod document;
pub mod error;
pub mod field;
pub mod idealfile;
pub mod multiindex;
pub mod par;
pub mod poly;
pub mod qmap;
pub mod quadform;
pub mod reembed;
pub mod span;
pub mod text;

pub use error::{Error, Result};
pub use field::{Field, FieldElement, FieldSpec, PrimeField, Rationals};
pub use multiindex::{CoordinateBasis, MultiIndex};
pub use poly::Poly;
pub use quadform::{LinearForm, QuadraticForm};
pub use span::{SpanBasis, SparseVector};
