//! Differential operators and quadrature on the torus.
//!
//! The Laplacian is positive semi-definite: `Δ = -(∂²/∂x² + ∂²/∂y²)`, so the
//! Fourier mode `exp(2πi(kx/lx + my/ly))` is multiplied by
//! `4π²(k²/lx² + m²/ly²)`. Kazdan and Warner use the opposite sign.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft::apply_symbol;
use super::{Backend, ComplexField, RealField, TorusError, TorusGrid};
use crate::exec;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Rectangle rule `hx hy Σ f`, spectrally accurate for smooth periodic `f`.
pub fn integrate(f: &RealField) -> f64 {
    let g = f.grid();
    g.hx() * g.hy() * exec::sum_indexed(g.len(), |k| f.values()[k])
}

/// Complex-valued rectangle rule.
pub fn integrate_complex(f: &ComplexField) -> Complex64 {
    let g = f.grid();
    let w = g.hx() * g.hy();
    let re = exec::sum_indexed(g.len(), |k| f.values()[k].re);
    let im = exec::sum_indexed(g.len(), |k| f.values()[k].im);
    Complex64::new(re, im) * w
}

fn wavenumbers(grid: &TorusGrid) -> (f64, f64) {
    (2.0 * PI / grid.lx(), 2.0 * PI / grid.ly())
}

/// Fourier symbol of the Laplacian for the given backend.
pub(crate) fn laplacian_symbol(grid: &TorusGrid, backend: Backend, fx: i64, fy: i64) -> f64 {
    match backend {
        Backend::Spectral => {
            let (kx, ky) = wavenumbers(grid);
            let (a, b) = (kx * fx as f64, ky * fy as f64);
            a * a + b * b
        }
        Backend::Stencil => {
            let sx = (PI * fx as f64 / grid.nx() as f64).sin() * 2.0 / grid.hx();
            let sy = (PI * fy as f64 / grid.ny() as f64).sin() * 2.0 / grid.hy();
            sx * sx + sy * sy
        }
    }
}

/// Positive-definite Laplacian with the spectral backend.
pub fn laplacian(f: &RealField) -> RealField {
    laplacian_with(f, Backend::Spectral)
}

/// Positive-definite Laplacian. The stencil backend evaluates the 5-point
/// formula directly in real space.
pub fn laplacian_with(f: &RealField, backend: Backend) -> RealField {
    let grid = *f.grid();
    match backend {
        Backend::Spectral => {
            let out = apply_symbol(&grid, f.to_complex().into_values(), |fx, fy| {
                Complex64::new(laplacian_symbol(&grid, backend, fx, fy), 0.0)
            });
            RealField::from_raw(grid, out.into_iter().map(|z| z.re).collect())
        }
        Backend::Stencil => {
            let (nx, ny) = (grid.nx(), grid.ny());
            let (cx, cy) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
            let v = f.values();
            let mut out = vec![0.0; grid.len()];
            exec::for_each_row(&mut out, nx, |iy, row| {
                let up = (iy + 1) % ny;
                let dn = (iy + ny - 1) % ny;
                for (ix, o) in row.iter_mut().enumerate() {
                    let c = v[iy * nx + ix];
                    let e = v[iy * nx + (ix + 1) % nx];
                    let w = v[iy * nx + (ix + nx - 1) % nx];
                    let n = v[up * nx + ix];
                    let s = v[dn * nx + ix];
                    *o = -(cx * (e - 2.0 * c + w) + cy * (n - 2.0 * c + s));
                }
            });
            RealField::from_raw(grid, out)
        }
    }
}

/// Unique zero-mean `g` with `Δg = rhs` (spectral backend).
pub fn poisson_solve(rhs: &RealField, feas_tol: f64) -> Result<RealField, TorusError> {
    poisson_solve_with(rhs, feas_tol, Backend::Spectral)
}

/// Unique zero-mean `g` with `Δg = rhs`, dividing by the backend's symbol.
pub fn poisson_solve_with(
    rhs: &RealField,
    feas_tol: f64,
    backend: Backend,
) -> Result<RealField, TorusError> {
    let mean = rhs.mean();
    if mean.abs() > feas_tol {
        return Err(TorusError::NonZeroMean { mean, tol: feas_tol });
    }
    Ok(shifted_inverse(rhs, 0.0, backend))
}

/// Solves `(Δ + c) g = rhs` for `c ≥ 0`. With `c = 0` the constant mode of
/// the result is set to zero.
pub fn shifted_inverse(rhs: &RealField, c: f64, backend: Backend) -> RealField {
    let grid = *rhs.grid();
    let out = apply_symbol(&grid, rhs.to_complex().into_values(), |fx, fy| {
        let s = laplacian_symbol(&grid, backend, fx, fy) + c;
        if s == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / s, 0.0)
        }
    });
    RealField::from_raw(grid, out.into_iter().map(|z| z.re).collect())
}

/// Which coordinate direction to differentiate along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// First derivative of a periodic complex field. The spectral version
/// zeroes the Nyquist bin; the stencil version is the central difference.
pub fn derivative_complex(f: &ComplexField, axis: Axis, backend: Backend) -> ComplexField {
    let grid = *f.grid();
    match backend {
        Backend::Spectral => {
            let (kx, ky) = wavenumbers(&grid);
            let (nx, ny) = (grid.nx() as i64, grid.ny() as i64);
            let out = apply_symbol(&grid, f.values().to_vec(), |fx, fy| match axis {
                Axis::X if fx != -nx / 2 => I * (kx * fx as f64),
                Axis::Y if fy != -ny / 2 => I * (ky * fy as f64),
                _ => Complex64::new(0.0, 0.0),
            });
            ComplexField::from_raw(grid, out)
        }
        Backend::Stencil => {
            let (nx, ny) = (grid.nx(), grid.ny());
            let v = f.values();
            let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
            exec::for_each_row(&mut out, nx, |iy, row| {
                for (ix, o) in row.iter_mut().enumerate() {
                    *o = match axis {
                        Axis::X => {
                            (v[iy * nx + (ix + 1) % nx] - v[iy * nx + (ix + nx - 1) % nx])
                                / (2.0 * grid.hx())
                        }
                        Axis::Y => {
                            (v[((iy + 1) % ny) * nx + ix] - v[((iy + ny - 1) % ny) * nx + ix])
                                / (2.0 * grid.hy())
                        }
                    };
                }
            });
            ComplexField::from_raw(grid, out)
        }
    }
}

/// First derivative of a periodic real field.
pub fn derivative(f: &RealField, axis: Axis, backend: Backend) -> RealField {
    derivative_complex(&f.to_complex(), axis, backend).re()
}

/// The dz̄-component `½(f_x + i f_y)`, spectral.
pub fn dbar(f: &ComplexField) -> ComplexField {
    dbar_with(f, Backend::Spectral)
}

/// The dz-component `½(f_x - i f_y)`, spectral.
pub fn pdel(f: &ComplexField) -> ComplexField {
    pdel_with(f, Backend::Spectral)
}

pub fn dbar_with(f: &ComplexField, backend: Backend) -> ComplexField {
    combine_xy(f, backend, 1.0)
}

pub fn pdel_with(f: &ComplexField, backend: Backend) -> ComplexField {
    combine_xy(f, backend, -1.0)
}

fn combine_xy(f: &ComplexField, backend: Backend, sign: f64) -> ComplexField {
    let fx = derivative_complex(f, Axis::X, backend);
    let fy = derivative_complex(f, Axis::Y, backend);
    let values = exec::collect_indexed(f.grid().len(), |k| {
        0.5 * (fx.values()[k] + I * sign * fy.values()[k])
    });
    ComplexField::from_raw(*f.grid(), values)
}
