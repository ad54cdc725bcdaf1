//! Numerical workbench for directional fractional calculus and operator-theoretic
//! diagnostics at matrix scale.
//!
//! The crate is organised around five subsystems:
//!
//! * [`frac1d`] — one-dimensional fractional integrals and Marchaud-type
//!   derivatives on an interval, plus the generalized fractional time derivative.
//! * [`kipriyanov`] — directional fractional calculus on a convex n-dimensional
//!   domain discretized along rays from a boundary point.
//! * [`opcalc`] — matrix-level operator calculus: accretivity audits,
//!   Balakrishnan fractional powers, shift-semigroup generators and
//!   elliptic/perturbed operator assemblies.
//! * [`spectral`] — Jordan-system construction, operator functions and the
//!   block-series solver for fractional-order abstract Cauchy problems.
//! * Supporting numerics: [`scalar`] (generic scalar trait, gamma functions),
//!   [`quad`] (Gauss rules, adaptive quadrature), [`grid`]/[`mesh`]
//!   (discretizations), [`linalg`] (weighted-metric dense matrices),
//!   [`series`] (truncated Taylor arithmetic).
//!
//! All core math is generic over the scalar type through [`scalar::Scalar`];
//! concrete `f64` aliases are exported at the crate root.

pub mod error;
pub mod frac1d;
pub mod grid;
pub mod kipriyanov;
pub mod linalg;
pub mod mesh;
pub mod opcalc;
pub(crate) mod prodint;
pub mod quad;
pub mod scalar;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};

/// Default-precision interval grid.
pub type IntervalGrid64 = grid::IntervalGrid<f64>;
/// Default-precision sampled function on an interval grid.
pub type GridFn64 = grid::GridFn<f64>;
/// Default-precision ray mesh.
pub type RayMesh64 = mesh::RayMesh<f64>;
/// Default-precision sampled function on a ray mesh.
pub type RayFn64 = mesh::RayFn<f64>;
/// Default-precision weighted-metric dense operator matrix.
pub type OpMatrix64 = linalg::OpMatrix<f64>;
/// Default-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
