//! Exact arithmetic: finite fields, polynomials, rational functions, W2 and
//! small matrices.

pub mod factor;
pub mod field;
pub mod mat;
pub mod poly;
pub mod ratfunc;
pub mod w2;

pub use factor::{poly_factor, roots};
pub use field::{Field, FieldElem};
pub use mat::{kernel, rank, solve, Mat};
pub use poly::Poly;
pub use ratfunc::{Laurent, RatFunc};
pub use w2::{W2Elem, W2};

use crate::error::Result;

/// Builds F_{p^s} with a modulus chosen deterministically from `seed`.
pub fn ext_field_make(p: u32, s: u32, seed: u64) -> Result<Field> {
    Field::new(p, s, seed)
}
