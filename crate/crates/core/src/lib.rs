//! Directional distribution of nodal lines for Laplace eigenfunctions on the
//! flat torus `R²/Z²`.
//!
//! The crate counts the points on a nodal line whose normal is parallel to a
//! given direction `ζ`, both numerically (contour tracing plus Newton
//! polishing) and in expectation for arithmetic random waves (closed-form
//! Kac–Rice density). It also carries the separable reference cases of the
//! disk and the irrational rectangle, and a small Monte Carlo harness that
//! ties the numerical and closed-form sides together.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to one of the two. Tolerances quoted in
//! the docs assume `f64`.

pub mod contour;
pub mod direction_count;
pub mod eigenfunction;
pub mod error;
pub mod harness;
pub mod kac_rice;
pub mod lattice_circle;
pub mod num;
pub mod separable;

pub use direction_count::{
    bezout_bound, count_directional_points, detect_geodesics, geodesic_bound, CountOptions,
    CountTolerances, Direction, DirectionalCountReport, DirectionalPoint, Geodesic,
};
pub use eigenfunction::{sample_arithmetic_wave, Fixture, JetAtPoint, ToralEigenfunction};
pub use error::{Error, Result};
pub use kac_rice::{
    conditional_jacobian_expectation, conditioned_expected_count, conditioned_jacobian_expectation,
    density_factor_phi0, derivative_covariance_matrix,
    expected_count, kac_rice_breakdown, monte_carlo_jexp_oracle, KacRiceBreakdown,
};
pub use lattice_circle::{enumerate_circle, LatticeCircle, LatticePoint, MeasureClass, SpectralMeasure};
pub use num::Real;
pub use separable::{
    bessel_j, bessel_zero, disk_bound_check, DiskEigenfunction, RectangleSpec, SeparableCount,
};

/// Eigenfunction with `f64` coefficients.
pub type Eigenfunction64 = ToralEigenfunction<f64>;
/// Eigenfunction with `f32` coefficients.
pub type Eigenfunction32 = ToralEigenfunction<f32>;
pub type Jet64 = JetAtPoint<f64>;
pub type Jet32 = JetAtPoint<f32>;
pub type Direction64 = Direction<f64>;
pub type Direction32 = Direction<f32>;
pub type CountReport64 = DirectionalCountReport<f64>;
pub type CountReport32 = DirectionalCountReport<f32>;
pub type Breakdown64 = KacRiceBreakdown<f64>;
pub type DiskEigenfunction64 = DiskEigenfunction<f64>;
pub type RectangleSpec64 = RectangleSpec<f64>;
