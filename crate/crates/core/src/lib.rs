//! Isophote curves on parametric surfaces.

// `!(x > eps)` is used on purpose so that NaN counts as degenerate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canal;
pub mod catalog;
pub mod curve;
pub mod error;
pub mod io;
pub mod isophote;
pub mod numeric;
pub mod surface;
pub mod tolerance;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Vec2 = nalgebra::Vector2<f64>;

pub use error::{GeomError, Result};
pub use tolerance::Tolerances;
