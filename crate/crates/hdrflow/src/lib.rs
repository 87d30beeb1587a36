//! Parabolic Higgs bundles on a marked projective line over finite fields:
//! the mod-p inverse Cartier transform, grading, and the induced selfmap on
//! moduli components, with tools for finding periodic points.

pub mod algebra;
pub mod cartier;
pub mod connections;
pub mod error;
pub mod flow;
pub mod oracle;
pub mod parabolic;

pub use error::{Error, Result};
