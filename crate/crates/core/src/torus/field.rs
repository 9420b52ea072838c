use num_complex::Complex64;

use super::{TorusError, TorusGrid};
use crate::exec;

/// Doubly periodic real function sampled on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: TorusGrid,
    values: Vec<f64>,
}

/// Doubly periodic complex function sampled on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: TorusGrid,
    values: Vec<Complex64>,
}

impl RealField {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self, TorusError> {
        if values.len() != grid.len() {
            return Err(TorusError::ShapeMismatch { expected: grid.len(), found: values.len() });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(TorusError::NonFinite(k));
        }
        Ok(RealField { grid, values })
    }

    /// Skips the finiteness scan; callers guarantee the shape.
    pub(crate) fn from_raw(grid: TorusGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        RealField { grid, values }
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        RealField { grid, values: vec![c; grid.len()] }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn<F>(grid: TorusGrid, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync,
    {
        let values = exec::collect_indexed(grid.len(), |k| {
            let (x, y) = grid.point(k);
            f(x, y)
        });
        RealField { grid, values }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn map<F>(&self, f: F) -> RealField
    where
        F: Fn(f64) -> f64 + Send + Sync,
    {
        let values = exec::collect_indexed(self.values.len(), |k| f(self.values[k]));
        RealField { grid: self.grid, values }
    }

    /// Pointwise combination; panics if the grids differ.
    pub fn zip_map<F>(&self, other: &RealField, f: F) -> RealField
    where
        F: Fn(f64, f64) -> f64 + Send + Sync,
    {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = exec::collect_indexed(self.values.len(), |k| f(self.values[k], other.values[k]));
        RealField { grid: self.grid, values }
    }

    pub fn add(&self, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> RealField {
        self.map(|a| a * c)
    }

    pub fn shift(&self, c: f64) -> RealField {
        self.map(|a| a + c)
    }

    pub fn sup_norm(&self) -> f64 {
        exec::max_indexed(self.values.len(), |k| self.values[k].abs()).max(0.0)
    }

    pub fn sup_distance(&self, other: &RealField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        exec::max_indexed(self.values.len(), |k| (self.values[k] - other.values[k]).abs()).max(0.0)
    }

    pub fn min(&self) -> f64 {
        -exec::max_indexed(self.values.len(), |k| -self.values[k])
    }

    pub fn max(&self) -> f64 {
        exec::max_indexed(self.values.len(), |k| self.values[k])
    }

    /// Arithmetic mean of the samples (equals `integrate / vol`).
    pub fn mean(&self) -> f64 {
        exec::sum_indexed(self.values.len(), |k| self.values[k]) / self.values.len() as f64
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField::from_raw(
            self.grid,
            self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }
}

impl ComplexField {
    pub fn new(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self, TorusError> {
        if values.len() != grid.len() {
            return Err(TorusError::ShapeMismatch { expected: grid.len(), found: values.len() });
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(TorusError::NonFinite(k));
        }
        Ok(ComplexField { grid, values })
    }

    pub(crate) fn from_raw(grid: TorusGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ComplexField { grid, values }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        ComplexField { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn<F>(grid: TorusGrid, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync,
    {
        let values = exec::collect_indexed(grid.len(), |k| {
            let (x, y) = grid.point(k);
            f(x, y)
        });
        ComplexField { grid, values }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn map<F>(&self, f: F) -> ComplexField
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync,
    {
        let values = exec::collect_indexed(self.values.len(), |k| f(self.values[k]));
        ComplexField { grid: self.grid, values }
    }

    pub fn re(&self) -> RealField {
        RealField::from_raw(self.grid, self.values.iter().map(|z| z.re).collect())
    }

    pub fn im(&self) -> RealField {
        RealField::from_raw(self.grid, self.values.iter().map(|z| z.im).collect())
    }

    pub fn norm_sqr(&self) -> RealField {
        RealField::from_raw(self.grid, self.values.iter().map(|z| z.norm_sqr()).collect())
    }

    pub fn sup_norm(&self) -> f64 {
        exec::max_indexed(self.values.len(), |k| self.values[k].norm()).max(0.0)
    }

    pub fn sup_distance(&self, other: &ComplexField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        exec::max_indexed(self.values.len(), |k| (self.values[k] - other.values[k]).norm()).max(0.0)
    }
}
