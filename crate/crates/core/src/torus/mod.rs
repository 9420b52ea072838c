//! Discrete geometry of the flat torus: grids, sampled fields, quadrature,
//! the positive Laplacian, Poisson inversion and the ∂/∂̄ splitting.

mod fft;
mod field;
mod grid;
mod ops;
mod random;

pub mod cvf;

pub use field::{ComplexField, RealField};
pub use grid::{Backend, TorusGrid};
pub use ops::{
    dbar, dbar_with, derivative, derivative_complex, integrate, integrate_complex, laplacian,
    laplacian_with, pdel, pdel_with, poisson_solve, poisson_solve_with, shifted_inverse, Axis,
};

pub use random::random_smooth;


use thiserror::Error;

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field has {found} samples, grid expects {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite sample at flat index {0}")]
    NonFinite(usize),
    #[error("right-hand side has mean {mean:e}, exceeding solvability tolerance {tol:e}")]
    NonZeroMean { mean: f64, tol: f64 },
    #[error("malformed CVF1 data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
