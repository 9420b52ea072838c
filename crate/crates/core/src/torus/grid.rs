use serde::{Deserialize, Serialize};

use super::TorusError;

/// Discretization of derivatives on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// FFT-based, exact on band-limited fields.
    #[default]
    Spectral,
    /// Second-order finite differences (5-point Laplacian, central first derivatives).
    Stencil,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectral" => Ok(Backend::Spectral),
            "stencil" => Ok(Backend::Stencil),
            other => Err(format!("unknown backend `{other}` (expected spectral|stencil)")),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Spectral => "spectral",
            Backend::Stencil => "stencil",
        })
    }
}

/// Uniform grid on the flat rectangular torus `[0, lx) x [0, ly)`.
///
/// Sample `(ix, iy)` sits at `(ix * hx, iy * hy)` and is stored at
/// `iy * nx + ix`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct TorusGrid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    nx: usize,
    ny: usize,
    #[serde(default = "one")]
    lx: f64,
    #[serde(default = "one")]
    ly: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawGrid> for TorusGrid {
    type Error = TorusError;

    fn try_from(raw: RawGrid) -> Result<Self, Self::Error> {
        TorusGrid::new(raw.nx, raw.ny, raw.lx, raw.ly)
    }
}

impl From<TorusGrid> for RawGrid {
    fn from(g: TorusGrid) -> Self {
        RawGrid { nx: g.nx, ny: g.ny, lx: g.lx, ly: g.ly }
    }
}

impl TorusGrid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, TorusError> {
        for n in [nx, ny] {
            if n < 8 || n % 2 != 0 {
                return Err(TorusError::InvalidGrid(format!(
                    "resolution {n} must be even and at least 8"
                )));
            }
        }
        if !(lx.is_finite() && ly.is_finite() && lx > 0.0 && ly > 0.0) {
            return Err(TorusError::InvalidGrid(format!(
                "periods must be positive and finite, got ({lx}, {ly})"
            )));
        }
        Ok(TorusGrid { nx, ny, lx, ly })
    }

    /// `n x n` grid on the unit square torus.
    pub fn unit(n: usize) -> Result<Self, TorusError> {
        Self::new(n, n, 1.0, 1.0)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn vol(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 * self.hx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        iy as f64 * self.hy()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// `(ix, iy)` of a flat index.
    #[inline]
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    /// Physical position of a flat index.
    #[inline]
    pub fn point(&self, k: usize) -> (f64, f64) {
        let (ix, iy) = self.coords(k);
        (self.x(ix), self.y(iy))
    }
}
