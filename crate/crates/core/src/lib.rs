//! Compactly supported deformations of the hyperbolic disk.
//!
//! Metrics live on the Poincaré unit-disk chart as `g = g₀ + h` with `h`
//! compactly supported. The crate computes geodesics, distances and boundary
//! quantities of such metrics, the integrated Schwarzian of `g` relative to
//! `g₀`, geodesic ray transforms of symmetric 2-tensors with the solenoidal
//! decomposition on a disk, and the first-variation identities along
//! one-parameter families.
//!
//! Pointwise geometry (chart types, closed-form hyperbolic formulas, built-in
//! fields) is generic over [`scalar::Real`]; integrators and solvers work in
//! `f64`.

#![allow(clippy::needless_range_loop)]

pub mod boundary;
pub mod chart;
pub mod error;
pub mod family;
pub mod fields;
pub mod geodesic;
pub mod hyperbolic;
pub mod metric;
pub mod ode;
pub mod operators;
pub mod quadrature;
pub mod raytransform;
pub mod sampling;
pub mod scalar;
pub mod schwarzian;
pub mod variation;

pub use error::{GeomError, Result};
pub use family::MetricFamily;
pub use fields::{OneFormField, SymTensorField};
pub use hyperbolic::IdealPoint;
pub use metric::MetricField;

/// Chart point in double precision.
pub type ChartPoint = chart::Point<f64>;
/// Chart point in single precision.
pub type ChartPoint32 = chart::Point<f32>;
/// Symmetric 2-tensor value in double precision.
pub type Sym2f = chart::Sym2<f64>;
/// Symmetric 2-tensor value in single precision.
pub type Sym2f32 = chart::Sym2<f32>;
/// Covector value in double precision.
pub type Covectorf = chart::Covector<f64>;
