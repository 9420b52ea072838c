use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SectionError;
use crate::torus::{RealField, TorusGrid};

/// Default offset of the theta normalization, as fractions of the periods.
/// Generic values keep theta zeros away from grid lines at every power-of-two
/// resolution.
pub const DEFAULT_OFFSET: (f64, f64) = (0.0413, 0.0287);

/// Degree-`d` holomorphic line bundle on the torus with its constant-curvature
/// hermitian metric.
///
/// Sections are stored in the unitary frame over the strip `y ∈ [0, ly)`.
/// They are periodic in `x` and satisfy
/// `ψ(x, y + ly) = exp(−2πi d (x − x₀)/lx) ψ(x, y)`.
/// The holomorphic frame differs by the metric weight
/// `φ(y) = −2π d (y − y₀)² / vol`: `s = ψ e^{−φ/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineBundle {
    degree: u32,
    grid: TorusGrid,
    offset: (f64, f64),
}

impl LineBundle {
    pub fn new(degree: u32, grid: TorusGrid) -> Result<Self, SectionError> {
        Self::with_offset(degree, grid, DEFAULT_OFFSET)
    }

    /// `offset` is the translation `(x₀/lx, y₀/ly)` of the theta normalization;
    /// it selects the point of the Picard variety.
    pub fn with_offset(degree: u32, grid: TorusGrid, offset: (f64, f64)) -> Result<Self, SectionError> {
        if degree == 0 {
            return Err(SectionError::ZeroDegree);
        }
        if !(offset.0.is_finite() && offset.1.is_finite()) {
            return Err(SectionError::InvalidOffset);
        }
        Ok(LineBundle { degree, grid, offset })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn offset(&self) -> (f64, f64) {
        self.offset
    }

    /// `(x₀, y₀)` in physical units.
    pub fn origin(&self) -> (f64, f64) {
        (self.offset.0 * self.grid.lx(), self.offset.1 * self.grid.ly())
    }

    /// Constant curvature scalar `2π d / vol` of the Chern connection.
    pub fn curvature_density(&self) -> f64 {
        2.0 * PI * self.degree as f64 / self.grid.vol()
    }

    /// `φ(y) = −2π d (y − y₀)² / vol` sampled on the grid.
    pub fn metric_weight(&self) -> RealField {
        let d = self.degree as f64;
        let (_, y0) = self.origin();
        let vol = self.grid.vol();
        RealField::from_fn(self.grid, move |_, y| -2.0 * PI * d * (y - y0).powi(2) / vol)
    }

    /// Transition factor `g(x)` with `ψ(x, y + ly) = g(x) ψ(x, y)`.
    pub fn transition(&self, x: f64) -> Complex64 {
        let (x0, _) = self.origin();
        Complex64::from_polar(1.0, -2.0 * PI * self.degree as f64 * (x - x0) / self.grid.lx())
    }

    /// Phase `θ(x, y)` such that `e^{iθ} ψ` is periodic in `y`.
    pub(crate) fn y_periodizing_phase(&self, x: f64, y: f64) -> f64 {
        let (x0, _) = self.origin();
        2.0 * PI * self.degree as f64 * (x - x0) * y / self.grid.vol()
    }

    /// Background potential `a_x = 2π d (y − y₀)/vol` of the Chern connection
    /// in the unitary frame (`a_y = 0`).
    pub(crate) fn background_ax(&self, y: f64) -> f64 {
        let (_, y0) = self.origin();
        self.curvature_density() * (y - y0)
    }

    /// The bundle of degree `d₁ + d₂` carrying products of sections.
    pub fn tensor(&self, other: &LineBundle) -> Result<LineBundle, SectionError> {
        if self.grid != other.grid || self.offset != other.offset {
            return Err(SectionError::BundleMismatch);
        }
        LineBundle::with_offset(self.degree + other.degree, self.grid, self.offset)
    }
}
