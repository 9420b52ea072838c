//! Zeros of sections via plaquette winding numbers.
//!
//! Around each grid plaquette we add the principal-value phase increments of
//! `ψ` along the four edges (counterclockwise). Plaquettes in the top row use
//! the transition law for their upper corners, so the windings over the whole
//! torus sum to the bundle degree.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ComplexSection, SectionError};
use crate::exec;
use crate::torus::RealField;

/// Corner samples with `|ψ|` below this fraction of `sup |ψ|` count as a
/// zero on the plaquette boundary.
pub const EDGE_TOL: f64 = 1e-12;

/// Phase increments this close to `π` are ambiguous.
const PHASE_MARGIN: f64 = 1e-6;

/// Effective divisor: points with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divisor {
    pub points: Vec<[f64; 2]>,
    pub multiplicities: Vec<u32>,
    pub degree: u32,
}

impl Divisor {
    pub fn empty() -> Self {
        Divisor { points: Vec::new(), multiplicities: Vec::new(), degree: 0 }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Winding number of every plaquette, indexed like grid samples (plaquette
/// `(ix, iy)` has lower-left corner `(ix, iy)`).
pub fn plaquette_windings(s: &ComplexSection) -> Result<Vec<i32>, SectionError> {
    let grid = *s.bundle().grid();
    let floor = EDGE_TOL * s.values().sup_norm();
    if floor == 0.0 {
        return Err(SectionError::ZeroSection);
    }
    let windings = exec::collect_indexed(grid.len(), |k| {
        let (ix, iy) = grid.coords(k);
        let corners = [
            s.corner_value(ix, iy),
            s.corner_value(ix + 1, iy),
            s.corner_value(ix + 1, iy + 1),
            s.corner_value(ix, iy + 1),
        ];
        if corners.iter().any(|c| c.norm() <= floor) {
            return Err(SectionError::EdgeZero { ix, iy });
        }
        let mut total = 0.0;
        for e in 0..4 {
            let step = (corners[(e + 1) % 4] * corners[e].conj()).arg();
            if step.abs() >= PI - PHASE_MARGIN {
                return Err(SectionError::EdgeZero { ix, iy });
            }
            total += step;
        }
        Ok((total / (2.0 * PI)).round() as i32)
    });
    windings.into_iter().collect()
}

/// Divisor of a section: nonzero plaquette windings located by a paraboloid
/// fit of `|ψ|²` around the plaquette.
pub fn divisor_extract(s: &ComplexSection) -> Result<Divisor, SectionError> {
    let modulus = s.pointwise_norm_sq();
    divisor_from_windings(s, &plaquette_windings(s)?, &modulus)
}

/// As [`divisor_extract`], refining locations on a given periodic modulus
/// field (anything vanishing quadratically at the zeros).
pub fn divisor_extract_with(s: &ComplexSection, modulus: &RealField) -> Result<Divisor, SectionError> {
    divisor_from_windings(s, &plaquette_windings(s)?, modulus)
}

pub(crate) fn divisor_from_windings(
    s: &ComplexSection,
    windings: &[i32],
    modulus: &RealField,
) -> Result<Divisor, SectionError> {
    let grid = *s.bundle().grid();
    if modulus.grid() != &grid {
        return Err(SectionError::GridMismatch);
    }
    let mut divisor = Divisor::empty();
    let mut total: i64 = 0;
    for (k, &w) in windings.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let (ix, iy) = grid.coords(k);
        if w < 0 {
            return Err(SectionError::NegativeWinding { ix, iy, winding: w });
        }
        total += w as i64;
        let (u, v) = refine(modulus, ix, iy);
        let x = ((ix as f64 + u) * grid.hx()).rem_euclid(grid.lx());
        let y = ((iy as f64 + v) * grid.hy()).rem_euclid(grid.ly());
        divisor.points.push([x, y]);
        divisor.multiplicities.push(w as u32);
    }
    let degree = s.bundle().degree();
    if total != degree as i64 {
        return Err(SectionError::WindingMismatch { total, degree });
    }
    divisor.degree = degree;
    Ok(divisor)
}

/// Least-squares fit of `k|p − p₀|² + c` to the 4x4 samples around the
/// plaquette; returns `p₀` in plaquette units, or the centre if the fit is
/// not a clean minimum nearby.
fn refine(modulus: &RealField, ix: usize, iy: usize) -> (f64, f64) {
    let grid = modulus.grid();
    let (nx, ny) = (grid.nx() as i64, grid.ny() as i64);
    // unknowns (k, p, r, c) in q = k(u² + v²) + p u + r v + c
    let mut ata = [[0.0f64; 4]; 4];
    let mut atb = [0.0f64; 4];
    for dv in -1i64..=2 {
        for du in -1i64..=2 {
            let sx = (ix as i64 + du).rem_euclid(nx) as usize;
            let sy = (iy as i64 + dv).rem_euclid(ny) as usize;
            let q = modulus.at(sx, sy);
            let (u, v) = (du as f64, dv as f64);
            let row = [u * u + v * v, u, v, 1.0];
            for i in 0..4 {
                atb[i] += row[i] * q;
                for j in 0..4 {
                    ata[i][j] += row[i] * row[j];
                }
            }
        }
    }
    let centre = (0.5, 0.5);
    let Some([k, p, r, _]) = solve4(ata, atb) else {
        return centre;
    };
    if k <= 0.0 {
        return centre;
    }
    let (u0, v0) = (-p / (2.0 * k), -r / (2.0 * k));
    if (-0.5..=1.5).contains(&u0) && (-0.5..=1.5).contains(&v0) {
        (u0, v0)
    } else {
        centre
    }
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for j in col..4 {
                a[row][j] -= f * a[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for i in (0..4).rev() {
        let s: f64 = (i + 1..4).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Common zeros of several sections of one bundle: plaquettes where every
/// nonvanishing component winds, with multiplicity the minimum winding.
pub fn common_windings(sections: &[&ComplexSection]) -> Result<Vec<i32>, SectionError> {
    let active: Vec<&&ComplexSection> = sections.iter().filter(|s| s.values().sup_norm() > 0.0).collect();
    let Some(first) = active.first() else {
        return Err(SectionError::ZeroSection);
    };
    let mut common = plaquette_windings(first)?;
    for s in &active[1..] {
        if s.bundle() != first.bundle() {
            return Err(SectionError::BundleMismatch);
        }
        let w = plaquette_windings(s)?;
        for (c, wk) in common.iter_mut().zip(w) {
            *c = if *c > 0 && wk > 0 { (*c).min(wk) } else { 0 };
        }
    }
    Ok(common)
}

/// Divisor from a precomputed winding map without the degree check (used
/// for common zeros, whose total may fall short of the degree).
pub fn divisor_from_common(
    s: &ComplexSection,
    windings: &[i32],
    modulus: &RealField,
) -> Divisor {
    let grid = *s.bundle().grid();
    let mut divisor = Divisor::empty();
    for (k, &w) in windings.iter().enumerate() {
        if w <= 0 {
            continue;
        }
        let (ix, iy) = grid.coords(k);
        let (u, v) = refine(modulus, ix, iy);
        divisor.points.push([
            ((ix as f64 + u) * grid.hx()).rem_euclid(grid.lx()),
            ((iy as f64 + v) * grid.hy()).rem_euclid(grid.ly()),
        ]);
        divisor.multiplicities.push(w as u32);
    }
    divisor.degree = divisor.multiplicities.iter().sum();
    divisor
}

