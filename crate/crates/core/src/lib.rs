//! Exact computation of cross-ratio expander images, their energies, and
//! the dual point/plane geometry of projective transformations.

pub mod dual_geometry;
pub mod energy;
pub mod error;
pub mod exact_arith;
pub mod expander_sets;
pub mod experiments;
mod kernel;
pub mod projective;

pub use error::{Error, Result};
pub use exact_arith::{make_rational, ExtRational};
pub use expander_sets::{image, image_count, Expander, ImageCaps, ImageValue, InputSet, ValueSet};
pub use kernel::falling;
pub use projective::{cross_ratio, quadruple_related, solve_triple, Mobius};
