//! Experiment configurations. Each subcommand reads one JSON object; unknown
//! keys and out-of-range values are rejected before any computation.

use std::path::{Path, PathBuf};

use conevortex::kazdan_warner::SolverKind;
use conevortex::torus::{Backend, TorusGrid};
use conevortex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Largest target dimension accepted by `sv-gaugefix`.
pub const MAX_TARGET_DIM: usize = 16;

/// A scalar field given as a constant or as a CVF1 file (relative paths are
/// resolved against the config file's directory).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSource {
    Constant(f64),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KwSolveConfig {
    #[serde(default)]
    pub grid: Option<TorusGrid>,
    pub b: FieldSource,
    pub w: FieldSource,
    #[serde(default = "newton")]
    pub solver: SolverKind,
    #[serde(default = "kw_tol")]
    pub tol: f64,
    #[serde(default = "max_iter")]
    pub max_iter: usize,
    #[serde(default = "one")]
    pub picard_damping: f64,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexConfig {
    pub grid: TorusGrid,
    pub degree: u32,
    pub tau: f64,
    /// Coefficients `[re, im]` in the theta basis; drawn from the seed when absent.
    #[serde(default)]
    pub coeffs: Option<Vec<[f64; 2]>>,
    #[serde(default = "gauge_tol")]
    pub tol: f64,
    #[serde(default = "max_iter")]
    pub max_iter: usize,
    #[serde(default = "holo_tol")]
    pub holo_tol: f64,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeFixConfig {
    pub grid: TorusGrid,
    pub degree: u32,
    pub tau: f64,
    pub n: usize,
    /// Circle action weights; the Kazdan–Warner reduction needs all ones.
    #[serde(default)]
    pub weights: Option<Vec<i32>>,
    /// Per component, coefficients in the theta basis.
    #[serde(default)]
    pub components: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default = "gauge_tol")]
    pub tol: f64,
    #[serde(default = "max_iter")]
    pub max_iter: usize,
    #[serde(default = "holo_tol")]
    pub holo_tol: f64,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiMapConfig {
    /// Directory holding `solution.json` from `vortex-make` or `sv-gaugefix`.
    pub solution: PathBuf,
    /// Largest accepted residual of the input solution.
    #[serde(default = "certify_tol")]
    pub certify_tol: f64,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub grid: TorusGrid,
    pub degree: u32,
    pub tau_list: Vec<f64>,
    #[serde(default)]
    pub coeffs: Option<Vec<[f64; 2]>>,
    #[serde(default = "gauge_tol")]
    pub tol: f64,
    #[serde(default = "max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

fn newton() -> SolverKind {
    SolverKind::Newton
}

fn kw_tol() -> f64 {
    1e-10
}

fn gauge_tol() -> f64 {
    conevortex::vortex::GAUGE_FIX_KW_TOL
}

fn max_iter() -> usize {
    50
}

fn one() -> f64 {
    1.0
}

fn holo_tol() -> f64 {
    1e-6
}

fn certify_tol() -> f64 {
    1e-8
}

/// Settings shared by every subcommand after command-line overrides.
pub trait Common {
    fn backend_mut(&mut self) -> &mut Option<Backend>;
    fn seed_mut(&mut self) -> &mut Option<u64>;
    fn out_dir(&self) -> Option<&Path>;
    fn validate(&self) -> Result<(), String>;
}

macro_rules! common {
    ($($t:ty),*) => {$(
        impl Common for $t {
            fn backend_mut(&mut self) -> &mut Option<Backend> {
                &mut self.backend
            }
            fn seed_mut(&mut self) -> &mut Option<u64> {
                &mut self.seed
            }
            fn out_dir(&self) -> Option<&Path> {
                self.out_dir.as_deref()
            }
            fn validate(&self) -> Result<(), String> {
                self.check()
            }
        }
    )*};
}

common!(KwSolveConfig, VortexConfig, GaugeFixConfig, PiMapConfig, ScanConfig);

fn positive(name: &str, v: f64) -> Result<(), String> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(format!("`{name}` must be a positive finite number, got {v}"))
    }
}

fn iterations(v: usize) -> Result<(), String> {
    if v == 0 {
        return Err("`max_iter` must be at least 1".into());
    }
    Ok(())
}

fn degree(d: u32) -> Result<(), String> {
    if d == 0 {
        return Err("`degree` must be at least 1".into());
    }
    Ok(())
}

fn coefficients(name: &str, c: &[[f64; 2]], d: u32) -> Result<(), String> {
    if c.len() != d as usize {
        return Err(format!("`{name}` has {} entries; degree {d} needs {d}", c.len()));
    }
    if c.iter().flatten().any(|v| !v.is_finite()) {
        return Err(format!("`{name}` contains a non-finite value"));
    }
    if c.iter().flatten().all(|&v| v == 0.0) {
        return Err(format!("`{name}` is identically zero"));
    }
    Ok(())
}

fn finite_tau(tau: f64) -> Result<(), String> {
    if tau.is_finite() {
        Ok(())
    } else {
        Err(format!("`tau` must be finite, got {tau}"))
    }
}

impl KwSolveConfig {
    fn check(&self) -> Result<(), String> {
        positive("tol", self.tol)?;
        iterations(self.max_iter)?;
        if !(self.picard_damping > 0.0 && self.picard_damping <= 1.0) {
            return Err(format!("`picard_damping` must lie in (0, 1], got {}", self.picard_damping));
        }
        for (name, src) in [("b", &self.b), ("w", &self.w)] {
            if let FieldSource::Constant(v) = src {
                if !v.is_finite() {
                    return Err(format!("`{name}` must be finite"));
                }
            }
        }
        let constants_only = matches!((&self.b, &self.w), (FieldSource::Constant(_), FieldSource::Constant(_)));
        if constants_only && self.grid.is_none() {
            return Err("`grid` is required when `b` and `w` are both constants".into());
        }
        Ok(())
    }
}

impl VortexConfig {
    fn check(&self) -> Result<(), String> {
        degree(self.degree)?;
        finite_tau(self.tau)?;
        positive("tol", self.tol)?;
        positive("holo_tol", self.holo_tol)?;
        iterations(self.max_iter)?;
        if let Some(c) = &self.coeffs {
            coefficients("coeffs", c, self.degree)?;
        }
        Ok(())
    }
}

impl GaugeFixConfig {
    fn check(&self) -> Result<(), String> {
        degree(self.degree)?;
        finite_tau(self.tau)?;
        positive("tol", self.tol)?;
        positive("holo_tol", self.holo_tol)?;
        iterations(self.max_iter)?;
        if self.n == 0 || self.n > MAX_TARGET_DIM {
            return Err(format!("`n` must lie in 1..={MAX_TARGET_DIM}, got {}", self.n));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.n {
                return Err(format!("`weights` has {} entries; n = {}", w.len(), self.n));
            }
        }
        if let Some(comps) = &self.components {
            if comps.len() != self.n {
                return Err(format!("`components` has {} entries; n = {}", comps.len(), self.n));
            }
            for (k, c) in comps.iter().enumerate() {
                if c.len() != self.degree as usize || c.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(format!("`components[{k}]` must hold {} finite pairs", self.degree));
                }
            }
            if comps.iter().flatten().flatten().all(|&v| v == 0.0) {
                return Err("`components` are identically zero".into());
            }
        }
        Ok(())
    }
}

impl PiMapConfig {
    fn check(&self) -> Result<(), String> {
        positive("certify_tol", self.certify_tol)
    }
}

impl ScanConfig {
    fn check(&self) -> Result<(), String> {
        degree(self.degree)?;
        positive("tol", self.tol)?;
        iterations(self.max_iter)?;
        if self.tau_list.is_empty() {
            return Err("`tau_list` is empty".into());
        }
        for &t in &self.tau_list {
            finite_tau(t)?;
        }
        if let Some(c) = &self.coeffs {
            coefficients("coeffs", c, self.degree)?;
        }
        Ok(())
    }
}

/// Parses and validates a config, applying `--seed` and `--backend`.
pub fn load<C: DeserializeOwned + Common>(
    path: &Path,
    seed: Option<u64>,
    backend: Option<Backend>,
) -> Result<C, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg: C = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))?;
    cfg.validate().map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))?;
    if let Some(s) = seed {
        *cfg.seed_mut() = Some(s);
    }
    if let Some(b) = backend {
        *cfg.backend_mut() = Some(b);
    }
    if cfg.seed_mut().is_none() {
        *cfg.seed_mut() = Some(0);
    }
    if cfg.backend_mut().is_none() {
        *cfg.backend_mut() = Some(Backend::Spectral);
    }
    Ok(cfg)
}

pub fn to_complex(c: &[[f64; 2]]) -> Vec<Complex64> {
    c.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

/// `count` coefficients uniform in the square `[-1, 1]²`.
pub fn random_coeffs(rng: &mut ChaCha8Rng, count: usize) -> Vec<Complex64> {
    loop {
        let c: Vec<Complex64> =
            (0..count).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        if c.iter().any(|z| z.norm() > 0.0) {
            return c;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
