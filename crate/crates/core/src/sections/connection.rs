use num_complex::Complex64;

use super::{ComplexSection, LineBundle, SectionError};
use crate::exec;
use crate::torus::{derivative, derivative_complex, integrate, Axis, Backend, ComplexField, RealField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Distance from an integer beyond which a curvature integral is rejected.
pub const DEGREE_TOL: f64 = 1e-6;

/// Unitary connection `i a_x dx + i a_y dy` on a [`LineBundle`], in the
/// unitary frame.
///
/// Stored as the Chern connection of the bundle metric
/// (`a_x = 2πd(y − y₀)/vol`, `a_y = 0`) plus a periodic 1-form `(b_x, b_y)`.
/// The curvature scalar is `iΛF_A = 2πd/vol + ∂ᵧb_x − ∂ₓb_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryConnection {
    bundle: LineBundle,
    bx: RealField,
    by: RealField,
}

impl UnitaryConnection {
    /// Chern connection plus the periodic part `(bx, by)`.
    pub fn new(bundle: LineBundle, bx: RealField, by: RealField) -> Result<Self, SectionError> {
        if bx.grid() != bundle.grid() || by.grid() != bundle.grid() {
            return Err(SectionError::GridMismatch);
        }
        Ok(UnitaryConnection { bundle, bx, by })
    }

    /// Rebuilds a connection from its total potentials `(a_x, a_y)`.
    pub fn from_potentials(bundle: LineBundle, ax: RealField, ay: RealField) -> Result<Self, SectionError> {
        let background = background_connection_for(&bundle);
        let bx = ax.sub(&background.ax());
        Self::new(bundle, bx, ay)
    }

    pub fn bundle(&self) -> &LineBundle {
        &self.bundle
    }

    /// Periodic part of `a_x`.
    pub fn bx(&self) -> &RealField {
        &self.bx
    }

    /// Periodic part of `a_y` (equal to `a_y`).
    pub fn by(&self) -> &RealField {
        &self.by
    }

    /// Total `a_x` on the strip `y ∈ [0, ly)`.
    pub fn ax(&self) -> RealField {
        let b = self.bundle;
        let bg = RealField::from_fn(*b.grid(), move |_, y| b.background_ax(y));
        bg.add(&self.bx)
    }

    pub fn ay(&self) -> RealField {
        self.by.clone()
    }

    /// `iΛF_A` with the spectral backend.
    pub fn curvature(&self) -> RealField {
        self.curvature_with(Backend::Spectral)
    }

    pub fn curvature_with(&self, backend: Backend) -> RealField {
        let dy_bx = derivative(&self.bx, Axis::Y, backend);
        let dx_by = derivative(&self.by, Axis::X, backend);
        let c = self.bundle.curvature_density();
        dy_bx.zip_map(&dx_by, move |a, b| c + a - b)
    }

    /// Adds the exact form `dχ`; the curvature is unchanged.
    pub fn add_exact(&self, chi: &RealField) -> Result<Self, SectionError> {
        let cx = derivative(chi, Axis::X, Backend::Spectral);
        let cy = derivative(chi, Axis::Y, Backend::Spectral);
        Self::new(self.bundle, self.bx.add(&cx), self.by.add(&cy))
    }

    /// Adds `(−∂ᵧg, ∂ₓg)`, which changes the curvature scalar by `Δg`.
    pub fn add_coexact(&self, g: &RealField, backend: Backend) -> Result<Self, SectionError> {
        if g.grid() != self.bundle.grid() {
            return Err(SectionError::GridMismatch);
        }
        let gx = derivative(g, Axis::X, backend);
        let gy = derivative(g, Axis::Y, backend);
        Self::new(self.bundle, self.bx.sub(&gy), self.by.add(&gx))
    }
}

/// Chern connection of the degree-`d` bundle: constant curvature `2πd/vol`.
pub fn background_connection(d: u32, grid: crate::torus::TorusGrid) -> Result<UnitaryConnection, SectionError> {
    Ok(background_connection_for(&LineBundle::new(d, grid)?))
}

pub fn background_connection_for(bundle: &LineBundle) -> UnitaryConnection {
    let zero = RealField::zeros(*bundle.grid());
    UnitaryConnection { bundle: *bundle, bx: zero.clone(), by: zero }
}

/// `round((1/2π) ∫ iΛF_A)`.
pub fn degree(a: &UnitaryConnection) -> Result<i64, SectionError> {
    let raw = integrate(&a.curvature()) / (2.0 * std::f64::consts::PI);
    let rounded = raw.round();
    if (raw - rounded).abs() > DEGREE_TOL {
        return Err(SectionError::NonIntegralDegree(raw));
    }
    Ok(rounded as i64)
}

fn check_bundle(s: &ComplexSection, a: &UnitaryConnection) -> Result<(), SectionError> {
    if s.bundle() != a.bundle() {
        return Err(SectionError::BundleMismatch);
    }
    Ok(())
}

/// `∂ᵧψ` of a section that is quasi-periodic in `y`: differentiate the
/// periodic field `e^{iθ}ψ` and undo the phase.
fn d_dy_section(s: &ComplexSection, backend: Backend) -> ComplexField {
    let bundle = *s.bundle();
    let grid = *bundle.grid();
    let psi = s.values();
    let phase = |k: usize| {
        let (x, y) = grid.point(k);
        bundle.y_periodizing_phase(x, y)
    };
    let chi = ComplexField::new(
        grid,
        exec::collect_indexed(grid.len(), |k| psi.values()[k] * Complex64::from_polar(1.0, phase(k))),
    )
    .expect("finite");
    let dchi = derivative_complex(&chi, Axis::Y, backend);
    let (x0, _) = bundle.origin();
    let rate = 2.0 * std::f64::consts::PI * bundle.degree() as f64 / grid.vol();
    let values = exec::collect_indexed(grid.len(), |k| {
        let (x, _) = grid.point(k);
        dchi.values()[k] * Complex64::from_polar(1.0, -phase(k)) - I * rate * (x - x0) * psi.values()[k]
    });
    ComplexField::new(grid, values).expect("finite")
}

/// Covariant derivative components `(D_xψ, D_yψ) = (∂ₓψ + i a_x ψ, ∂ᵧψ + i a_y ψ)`.
pub fn covariant_derivative(
    s: &ComplexSection,
    a: &UnitaryConnection,
    backend: Backend,
) -> Result<(ComplexField, ComplexField), SectionError> {
    check_bundle(s, a)?;
    let grid = *s.bundle().grid();
    let dx = derivative_complex(s.values(), Axis::X, backend);
    let dy = d_dy_section(s, backend);
    let (ax, ay) = (a.ax(), a.ay());
    let psi = s.values().values();
    let dxv = exec::collect_indexed(grid.len(), |k| dx.values()[k] + I * ax.values()[k] * psi[k]);
    let dyv = exec::collect_indexed(grid.len(), |k| dy.values()[k] + I * ay.values()[k] * psi[k]);
    Ok((ComplexField::new(grid, dxv)?, ComplexField::new(grid, dyv)?))
}

/// The dz̄-component `½(D_x + i D_y)ψ` of the covariant derivative.
pub fn dbar_a(s: &ComplexSection, a: &UnitaryConnection) -> Result<ComplexField, SectionError> {
    dbar_a_with(s, a, Backend::Spectral)
}

pub fn dbar_a_with(s: &ComplexSection, a: &UnitaryConnection, backend: Backend) -> Result<ComplexField, SectionError> {
    let (dx, dy) = covariant_derivative(s, a, backend)?;
    let grid = *dx.grid();
    let values = exec::collect_indexed(grid.len(), |k| 0.5 * (dx.values()[k] + I * dy.values()[k]));
    Ok(ComplexField::new(grid, values)?)
}
