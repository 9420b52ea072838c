//! Theta-function bases of holomorphic sections.
//!
//! With `ζ = (x − x₀ + i(y − y₀))/lx` and `t = ly/lx`, the level-`d` theta
//! functions `θ_j(ζ) = Σₙ exp(πi d (it) m² + 2πi d m ζ)`, `m = n + j/d`,
//! are a basis of holomorphic sections. Multiplying by the unitary factor
//! `e^{φ/2}` folds the series into Gaussians:
//! `ψ_j = Σₙ exp(−(πd/t)(t m + η)²) e^{2πi d m ξ}` with `ξ + iη = ζ`,
//! which is what we sum (no overflow for any `y`).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ComplexSection, LineBundle, SectionError};
use crate::torus::{ComplexField, TorusGrid};

/// Relative size below which series terms are dropped.
const TRUNCATION: f64 = 1e-17;

/// Unitary-frame value of basis section `j` at `(x, y)`.
pub fn theta_value(bundle: &LineBundle, j: u32, x: f64, y: f64) -> Complex64 {
    let d = bundle.degree() as f64;
    let grid = bundle.grid();
    let t = grid.ly() / grid.lx();
    let (x0, y0) = bundle.origin();
    let xi = (x - x0) / grid.lx();
    let eta = (y - y0) / grid.lx();
    let jd = j as f64 / d;
    let centre = (-eta / t - jd).round() as i64;

    let term = |n: i64| -> (f64, Complex64) {
        let m = n as f64 + jd;
        let gauss = (-(PI * d / t) * (t * m + eta).powi(2)).exp();
        // d m = d n + j is an integer
        let dm = (bundle.degree() as i64 * n + j as i64) as f64;
        (gauss, Complex64::from_polar(gauss, 2.0 * PI * dm * xi))
    };

    let (g0, mut sum) = term(centre);
    let mut mass = g0;
    for k in 1.. {
        let (ga, va) = term(centre + k);
        let (gb, vb) = term(centre - k);
        sum += va + vb;
        mass += ga + gb;
        if ga.max(gb) < TRUNCATION * mass {
            break;
        }
        debug_assert!(k < 200, "theta series failed to converge");
    }
    sum
}

/// The basis section `ψ_j` sampled on the bundle's grid.
pub fn theta_section(bundle: &LineBundle, j: u32) -> ComplexSection {
    assert!(j < bundle.degree(), "basis index out of range");
    let b = *bundle;
    let values = ComplexField::from_fn(*bundle.grid(), move |x, y| theta_value(&b, j, x, y));
    ComplexSection::new(*bundle, values).expect("grid matches bundle")
}

/// `d` linearly independent holomorphic sections of the degree-`d` bundle
/// (default offset).
pub fn theta_basis(d: u32, grid: TorusGrid) -> Result<Vec<ComplexSection>, SectionError> {
    let bundle = LineBundle::new(d, grid)?;
    Ok(theta_basis_for(&bundle))
}

pub fn theta_basis_for(bundle: &LineBundle) -> Vec<ComplexSection> {
    (0..bundle.degree()).map(|j| theta_section(bundle, j)).collect()
}

/// `Σ c_j ψ_j` evaluated pointwise from the series.
pub fn theta_combination_value(bundle: &LineBundle, coeffs: &[Complex64], x: f64, y: f64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * theta_value(bundle, j as u32, x, y))
        .sum()
}

/// `Σ c_j ψ_j` on the grid.
pub fn theta_combination(bundle: &LineBundle, coeffs: &[Complex64]) -> Result<ComplexSection, SectionError> {
    if coeffs.len() != bundle.degree() as usize {
        return Err(SectionError::CoefficientCount { expected: bundle.degree() as usize, found: coeffs.len() });
    }
    if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(SectionError::ZeroSection);
    }
    let b = *bundle;
    let coeffs = coeffs.to_vec();
    let values = ComplexField::from_fn(*bundle.grid(), move |x, y| theta_combination_value(&b, &coeffs, x, y));
    ComplexSection::new(*bundle, values)
}

/// Relative sup-norm defect of the transition laws on the ghost layers
/// `x = lx` (periodic) and `y = ly` (factor of automorphy), evaluated from
/// the series.
pub fn quasi_periodicity_defect(bundle: &LineBundle, coeffs: &[Complex64]) -> f64 {
    let grid = bundle.grid();
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for ix in 0..grid.nx() {
        let x = grid.x(ix);
        let base = theta_combination_value(bundle, coeffs, x, 0.0);
        let ghost = theta_combination_value(bundle, coeffs, x, grid.ly());
        defect = defect.max((ghost - bundle.transition(x) * base).norm());
        scale = scale.max(base.norm());
    }
    for iy in 0..grid.ny() {
        let y = grid.y(iy);
        let base = theta_combination_value(bundle, coeffs, 0.0, y);
        let ghost = theta_combination_value(bundle, coeffs, grid.lx(), y);
        defect = defect.max((ghost - base).norm());
        scale = scale.max(base.norm());
    }
    defect / scale.max(f64::MIN_POSITIVE)
}
