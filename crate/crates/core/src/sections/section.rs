use num_complex::Complex64;

use super::{LineBundle, SectionError};
use crate::exec;
use crate::torus::{integrate_complex, ComplexField, RealField};

/// Grid samples of a section of a [`LineBundle`], in the unitary frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSection {
    bundle: LineBundle,
    values: ComplexField,
}

impl ComplexSection {
    pub fn new(bundle: LineBundle, values: ComplexField) -> Result<Self, SectionError> {
        if values.grid() != bundle.grid() {
            return Err(SectionError::GridMismatch);
        }
        Ok(ComplexSection { bundle, values })
    }

    pub fn zero(bundle: LineBundle) -> Self {
        ComplexSection { bundle, values: ComplexField::zeros(*bundle.grid()) }
    }

    pub fn bundle(&self) -> &LineBundle {
        &self.bundle
    }

    /// Unitary-frame samples `ψ`.
    pub fn values(&self) -> &ComplexField {
        &self.values
    }

    /// Samples in the holomorphic frame, `s = ψ e^{−φ/2}`.
    pub fn holomorphic_frame_values(&self) -> ComplexField {
        let weight = self.bundle.metric_weight();
        let values = exec::collect_indexed(self.values.grid().len(), |k| {
            self.values.values()[k] * (-0.5 * weight.values()[k]).exp()
        });
        ComplexField::new(*self.values.grid(), values).expect("finite holomorphic-frame values")
    }

    /// `|s|²_h`, a doubly periodic function.
    pub fn pointwise_norm_sq(&self) -> RealField {
        self.values.norm_sqr()
    }

    pub fn scale(&self, c: Complex64) -> ComplexSection {
        ComplexSection { bundle: self.bundle, values: self.values.map(|z| z * c) }
    }

    /// Pointwise multiplication by a real function (e.g. `e^f`).
    pub fn multiply_real(&self, factor: &RealField) -> Result<ComplexSection, SectionError> {
        if factor.grid() != self.values.grid() {
            return Err(SectionError::GridMismatch);
        }
        let values = exec::collect_indexed(factor.grid().len(), |k| self.values.values()[k] * factor.values()[k]);
        Ok(ComplexSection { bundle: self.bundle, values: ComplexField::new(*factor.grid(), values)? })
    }

    /// Linear combination `Σ c_k s_k` of sections of one bundle.
    pub fn combine(terms: &[(Complex64, &ComplexSection)]) -> Result<ComplexSection, SectionError> {
        let (_, first) = terms.first().ok_or(SectionError::ZeroSection)?;
        let bundle = first.bundle;
        if terms.iter().any(|(_, s)| s.bundle != bundle) {
            return Err(SectionError::BundleMismatch);
        }
        let values = exec::collect_indexed(bundle.grid().len(), |k| {
            terms.iter().map(|(c, s)| c * s.values.values()[k]).sum()
        });
        Ok(ComplexSection { bundle, values: ComplexField::new(*bundle.grid(), values)? })
    }

    /// Tensor product, a section of the degree `d₁ + d₂` bundle.
    pub fn product(&self, other: &ComplexSection) -> Result<ComplexSection, SectionError> {
        let bundle = self.bundle.tensor(&other.bundle)?;
        let values = exec::collect_indexed(bundle.grid().len(), |k| {
            self.values.values()[k] * other.values.values()[k]
        });
        Ok(ComplexSection { bundle, values: ComplexField::new(*bundle.grid(), values)? })
    }

    /// Value at grid corner `(ix, iy)` with `ix ≤ nx`, `iy ≤ ny`, using the
    /// transition law on the ghost layers.
    pub fn corner_value(&self, ix: usize, iy: usize) -> Complex64 {
        let grid = self.bundle.grid();
        let base = self.values.at(ix % grid.nx(), iy % grid.ny());
        if iy == grid.ny() {
            self.bundle.transition(grid.x(ix)) * base
        } else {
            base
        }
    }
}

/// `G_ij = ∫ conj(ψ_i) ψ_j` with the hermitian metric.
pub fn gram_matrix(sections: &[ComplexSection]) -> Vec<Vec<Complex64>> {
    sections
        .iter()
        .map(|a| {
            sections
                .iter()
                .map(|b| {
                    let grid = *a.values.grid();
                    let prod = exec::collect_indexed(grid.len(), |k| a.values.values()[k].conj() * b.values.values()[k]);
                    integrate_complex(&ComplexField::new(grid, prod).expect("finite"))
                })
                .collect()
        })
        .collect()
}
