//! Holomorphic data on the torus: degree-`d` line bundles with their
//! constant-curvature metrics, theta-function sections, unitary connections,
//! the covariant `∂̄_A`, and divisors extracted from winding numbers.
//!
//! On an elliptic curve the zeros of a degree-`d` section are constrained
//! (their sum is fixed in the Jacobian), so divisors are never an input:
//! sections are specified by theta coefficients and divisors are extracted.

mod bundle;
mod connection;
mod divisor;
mod section;
mod theta;

pub use bundle::{LineBundle, DEFAULT_OFFSET};
pub use connection::{
    background_connection, background_connection_for, covariant_derivative, dbar_a, dbar_a_with, degree,
    UnitaryConnection, DEGREE_TOL,
};
pub use divisor::{
    common_windings, divisor_extract, divisor_extract_with, divisor_from_common, plaquette_windings, Divisor,
    EDGE_TOL,
};
pub use section::{gram_matrix, ComplexSection};
pub use theta::{
    quasi_periodicity_defect, theta_basis, theta_basis_for, theta_combination, theta_combination_value,
    theta_section, theta_value,
};

use thiserror::Error;

use crate::torus::TorusError;

#[derive(Debug, Error)]
pub enum SectionError {
    #[error("line bundles must have positive degree")]
    ZeroDegree,
    #[error("theta offset must be finite")]
    InvalidOffset,
    #[error("objects live on different grids")]
    GridMismatch,
    #[error("section and connection belong to different bundles")]
    BundleMismatch,
    #[error("expected {expected} theta coefficients, got {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("section vanishes identically")]
    ZeroSection,
    #[error("curvature integrates to {0} x 2π, which is not an integer")]
    NonIntegralDegree(f64),
    #[error("a zero sits on the boundary of plaquette ({ix}, {iy}); resample on an offset grid")]
    EdgeZero { ix: usize, iy: usize },
    #[error("plaquette ({ix}, {iy}) has winding {winding}; section is not holomorphic")]
    NegativeWinding { ix: usize, iy: usize, winding: i32 },
    #[error("windings total {total} but the bundle has degree {degree}")]
    WindingMismatch { total: i64, degree: u32 },
    #[error(transparent)]
    Torus(#[from] TorusError),
}
