//! Filtered spaces, well-filled charts and simplicial approximation.

#![allow(clippy::needless_range_loop)]

pub mod approximation;
pub mod convexity;
pub mod direct_limits;
pub mod error;
pub mod filling;
pub mod filtered;
pub mod geometry;
pub mod invariants;
pub mod lp;
pub mod plmap;
pub mod region;
pub mod scalar;
pub mod simplicial;

pub use error::{Error, Result};
pub use geometry::{Norm, Point, Simplex};
pub use plmap::{MapEval, PLMap};
pub use scalar::{Rational, Scalar};
pub use simplicial::{SimplicialComplex, SubcomplexCarrier};

pub type ExactPoint = Point<Rational>;
pub type FloatPoint = Point<f64>;
pub type ExactSimplex = Simplex<Rational>;
pub type FloatSimplex = Simplex<f64>;
pub type ExactComplex = SimplicialComplex<Rational>;
pub type FloatComplex = SimplicialComplex<f64>;
