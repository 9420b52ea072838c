//! The target geometry: `ℂⁿ∖{0}` as the Kähler cone over the round sphere
//! `S^{2n-1}`, with a weighted circle action `z_k ↦ e^{i w_k t} z_k`.
//!
//! With `r = |z|` and `s = z / r`, the Kähler potential is `ρ₀ = r²/2`, the
//! Sasakian moment map is `γ(s) = Σ w_k |s_k|²` (the contact form evaluated
//! on the fundamental field) and the cone moment map is
//! `μ = ρ₀ γ = ½ Σ w_k |z_k|²`.
//!
//! The moment map is normalized against the flat form `ω₀ = Σ dx_k ∧ dy_k`:
//! `dμ(v) = ω₀(v, K)` for the fundamental field `K = (i w_k z_k)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative gap below which `μ(e^f z) = e^{2f} μ(z)` is considered to hold.
pub const HOMOGENEITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ConeError {
    #[error("a circle action needs at least one weight")]
    NoWeights,
    #[error("weight {0} is zero")]
    ZeroWeight(usize),
    #[error("cone point must have at least one component")]
    Empty,
    #[error("the apex z = 0 is not on the cone")]
    Apex,
    #[error("point has {point} components but the action has {action} weights")]
    DimensionMismatch { point: usize, action: usize },
}

/// Weighted circle action on `ℂⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct WeightedCircleAction {
    weights: Vec<i32>,
}

impl TryFrom<Vec<i32>> for WeightedCircleAction {
    type Error = ConeError;

    fn try_from(weights: Vec<i32>) -> Result<Self, Self::Error> {
        Self::new(weights)
    }
}

impl From<WeightedCircleAction> for Vec<i32> {
    fn from(a: WeightedCircleAction) -> Self {
        a.weights
    }
}

impl WeightedCircleAction {
    pub fn new(weights: Vec<i32>) -> Result<Self, ConeError> {
        if weights.is_empty() {
            return Err(ConeError::NoWeights);
        }
        if let Some(k) = weights.iter().position(|&w| w == 0) {
            return Err(ConeError::ZeroWeight(k));
        }
        Ok(WeightedCircleAction { weights })
    }

    /// The diagonal weight-1 action, whose orbits are Reeb orbits.
    pub fn reeb(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        WeightedCircleAction { weights: vec![1; n] }
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn is_reeb(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    fn check(&self, p: &ConePoint) -> Result<(), ConeError> {
        if p.dim() != self.dim() {
            return Err(ConeError::DimensionMismatch { point: p.dim(), action: self.dim() });
        }
        Ok(())
    }

    /// `e^{i w_k t} z_k`.
    pub fn act(&self, t: f64, p: &ConePoint) -> Result<ConePoint, ConeError> {
        self.check(p)?;
        let z = p
            .z
            .iter()
            .zip(&self.weights)
            .map(|(z, &w)| z * Complex64::from_polar(1.0, w as f64 * t))
            .collect();
        Ok(ConePoint { z })
    }

    /// Whether `μ(e^f z) = e^{2f} μ(z)` holds, probed on a fixed sample set.
    /// This is the precondition for the Kazdan–Warner reduction.
    pub fn supports_kw_reduction(&self) -> bool {
        let n = self.dim();
        let samples: Vec<(f64, ConePoint)> = [-1.5, -0.25, 0.5, 2.0]
            .iter()
            .enumerate()
            .map(|(j, &f)| {
                let z = (0..n)
                    .map(|k| Complex64::new(1.0 + 0.1 * k as f64, 0.3 * (j + k) as f64 - 0.4))
                    .collect();
                (f, ConePoint { z })
            })
            .collect();
        homogeneity_check(self, &samples).map(|r| r.passed()).unwrap_or(false)
    }
}

/// A point `z ∈ ℂⁿ∖{0}` of the cone, with radius `r = |z|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    z: Vec<Complex64>,
}

impl ConePoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self, ConeError> {
        if z.is_empty() {
            return Err(ConeError::Empty);
        }
        if z.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(ConeError::Apex);
        }
        Ok(ConePoint { z })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn radius(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `s = z / r` on the unit sphere.
    pub fn sphere_point(&self) -> Vec<Complex64> {
        let r = self.radius();
        self.z.iter().map(|c| c / r).collect()
    }

    /// Real scaling `λ z`.
    pub fn scaled(&self, lambda: f64) -> ConePoint {
        ConePoint { z: self.z.iter().map(|c| c * lambda).collect() }
    }
}

/// Reeb field of the round sphere at the sphere point of `p`: `ξ = -i s`.
pub fn reeb_field(p: &ConePoint) -> Vec<Complex64> {
    p.sphere_point().into_iter().map(|s| -Complex64::i() * s).collect()
}

/// `γ(s) = Σ w_k |s_k|²`.
pub fn sasakian_moment(action: &WeightedCircleAction, p: &ConePoint) -> Result<f64, ConeError> {
    action.check(p)?;
    Ok(p.sphere_point()
        .iter()
        .zip(action.weights())
        .map(|(s, &w)| w as f64 * s.norm_sqr())
        .sum())
}

/// `ρ₀ = |z|² / 2`.
pub fn kahler_potential(p: &ConePoint) -> f64 {
    0.5 * p.z.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// `μ = ρ₀ γ = ½ Σ w_k |z_k|²`.
pub fn cone_moment(action: &WeightedCircleAction, p: &ConePoint) -> Result<f64, ConeError> {
    action.check(p)?;
    Ok(0.5
        * p.z
            .iter()
            .zip(action.weights())
            .map(|(z, &w)| w as f64 * z.norm_sqr())
            .sum::<f64>())
}

/// Fundamental vector field `K = d/dt (e^{i w t} z)|₀ = (i w_k z_k)`.
pub fn fundamental_field(action: &WeightedCircleAction, p: &ConePoint) -> Result<Vec<Complex64>, ConeError> {
    action.check(p)?;
    Ok(p.z
        .iter()
        .zip(action.weights())
        .map(|(z, &w)| Complex64::i() * w as f64 * z)
        .collect())
}

/// Flat Kähler form `ω₀(u, v) = Σ Im(conj(u_k) v_k)`.
pub fn flat_kahler_form(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a.conj() * b).im).sum()
}

/// Flow of the complexified action for real time `f`: `z_k ↦ e^{w_k f} z_k`.
pub fn complex_gauge_flow(
    action: &WeightedCircleAction,
    f: f64,
    p: &ConePoint,
) -> Result<ConePoint, ConeError> {
    action.check(p)?;
    let z = p
        .z
        .iter()
        .zip(action.weights())
        .map(|(z, &w)| z * (w as f64 * f).exp())
        .collect();
    Ok(ConePoint { z })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of [`homogeneity_check`]; serializes as
/// `{n, weights, max_gap, verdict}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub n: usize,
    pub weights: Vec<i32>,
    pub max_gap: f64,
    pub verdict: Verdict,
}

impl HomogeneityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Largest relative gap `|μ(e^f p) − e^{2f} μ(p)| / max(1, e^{2f} μ(p))`
/// over the samples.
pub fn homogeneity_check(
    action: &WeightedCircleAction,
    samples: &[(f64, ConePoint)],
) -> Result<HomogeneityReport, ConeError> {
    let mut max_gap: f64 = 0.0;
    for (f, p) in samples {
        let expected = (2.0 * f).exp() * cone_moment(action, p)?;
        let actual = cone_moment(action, &complex_gauge_flow(action, *f, p)?)?;
        max_gap = max_gap.max((actual - expected).abs() / expected.abs().max(1.0));
    }
    Ok(HomogeneityReport {
        n: action.dim(),
        weights: action.weights().to_vec(),
        max_gap,
        verdict: if max_gap <= HOMOGENEITY_TOL { Verdict::Pass } else { Verdict::Fail },
    })
}
