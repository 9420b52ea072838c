//! Symplectic vortices `(u, A)` with target the cone `ℂⁿ` under the diagonal
//! weight-1 circle action, and their relation to τ-vortices `(φ, A)`.
//!
//! With the master sign convention `iΛF_A = τ − μ∘u`, a holomorphic pair
//! `(u₀, A₀)` is moved along its complex gauge orbit by `e^f` where `f`
//! solves the Kazdan–Warner equation with `B = μ∘u₀` and
//! `w = τ − iΛF_{A₀}`. Solutions exist iff `τ > 2πd/Vol`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::WeightedCircleAction;
use crate::exec;
use crate::kazdan_warner::{kw_solve_with, KwError, KwOptions, KwProblem, KwSolution};
use crate::sections::{
    common_windings, covariant_derivative, dbar_a_with, degree, divisor_extract_with, divisor_from_common,
    theta_combination, background_connection_for, ComplexSection, Divisor, LineBundle, SectionError,
    UnitaryConnection,
};
use crate::torus::{derivative, integrate, Axis, Backend, RealField, TorusError, TorusGrid};
use crate::Complex64;

/// Relative margin required above the threshold `2πd/Vol`.
pub const THRESHOLD_MARGIN: f64 = 1e-8;

/// Default Kazdan–Warner tolerance for gauge fixing. The residual floor of
/// `Δf + B e^{2f} − w` grows with the grid and with `τ`; at `256²` and
/// `τ = 20` it sits near `3e-10`.
pub const GAUGE_FIX_KW_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum VortexError {
    #[error("configuration has no components")]
    Empty,
    #[error("tau must be finite")]
    NonFiniteTau,
    #[error("circle action does not admit the Kazdan-Warner reduction")]
    NonReebAction,
    #[error("tau = {tau} is not above the threshold {threshold} (margin {margin:e})")]
    BelowThreshold { tau: f64, threshold: f64, margin: f64 },
    #[error("initial map vanishes identically")]
    Unstable,
    #[error("input is not holomorphic: dbar residual {residual:e} exceeds {tol:e}")]
    NotHolomorphic { residual: f64, tol: f64 },
    #[error("configurations do not share a connection")]
    ConnectionMismatch,
    #[error(transparent)]
    Kw(#[from] KwError),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

/// A map `u = (u₁, …, uₙ)` into the cone, a connection `A` and the level `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    u: Vec<ComplexSection>,
    a: UnitaryConnection,
    tau: f64,
}

impl Configuration {
    pub fn new(u: Vec<ComplexSection>, a: UnitaryConnection, tau: f64) -> Result<Self, VortexError> {
        if u.is_empty() {
            return Err(VortexError::Empty);
        }
        if !tau.is_finite() {
            return Err(VortexError::NonFiniteTau);
        }
        if u.iter().any(|s| s.bundle() != a.bundle()) {
            return Err(SectionError::BundleMismatch.into());
        }
        Ok(Configuration { u, a, tau })
    }

    pub fn u(&self) -> &[ComplexSection] {
        &self.u
    }

    pub fn a(&self) -> &UnitaryConnection {
        &self.a
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn bundle(&self) -> &LineBundle {
        self.a.bundle()
    }

    pub fn grid(&self) -> &TorusGrid {
        self.a.bundle().grid()
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self, VortexError> {
        Configuration::new(self.u.clone(), self.a.clone(), tau)
    }

    /// Multiplies every component by the same constant.
    pub fn scale_u(&self, c: Complex64) -> Self {
        Configuration { u: self.u.iter().map(|s| s.scale(c)).collect(), a: self.a.clone(), tau: self.tau }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvResidual {
    /// `max_k sup |∂̄_A u_k|`.
    pub dbar_sup: f64,
    /// `sup |iΛF_A − τ + μ∘u|`.
    pub moment_sup: f64,
    /// `F^{0,2}` vanishes on a curve; kept for completeness.
    pub f02_sup: f64,
}

/// Solution certificate attached to every output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub dbar_sup: f64,
    pub moment_sup: f64,
    pub f02_sup: f64,
    pub kw_iterations: usize,
    /// `τ − 2πd/Vol`.
    pub threshold_margin: f64,
}

/// `2πd/Vol`.
pub fn threshold(bundle: &LineBundle) -> f64 {
    bundle.curvature_density()
}

/// `μ∘u = ½ Σ |u_k|²` for the standard action.
pub fn mu_of(u: &[ComplexSection]) -> Result<RealField, VortexError> {
    mu_of_action(&WeightedCircleAction::reeb(u.len()), u)
}

/// `μ∘u = ½ Σ w_k |u_k|²`; only weight-1 actions are accepted.
pub fn mu_of_action(action: &WeightedCircleAction, u: &[ComplexSection]) -> Result<RealField, VortexError> {
    let first = u.first().ok_or(VortexError::Empty)?;
    if action.dim() != u.len() || !action.supports_kw_reduction() {
        return Err(VortexError::NonReebAction);
    }
    if u.iter().any(|s| s.bundle() != first.bundle()) {
        return Err(SectionError::BundleMismatch.into());
    }
    let grid = *first.bundle().grid();
    let weights = action.weights();
    let values = exec::collect_indexed(grid.len(), |k| {
        0.5 * u.iter().zip(weights).map(|(s, &w)| w as f64 * s.values().values()[k].norm_sqr()).sum::<f64>()
    });
    Ok(RealField::new(grid, values)?)
}

pub fn sv_residual(cfg: &Configuration) -> SvResidual {
    sv_residual_with(cfg, Backend::Spectral)
}

/// Residuals with derivatives taken by `backend`.
pub fn sv_residual_with(cfg: &Configuration, backend: Backend) -> SvResidual {
    let dbar_sup = cfg
        .u
        .iter()
        .map(|s| dbar_a_with(s, &cfg.a, backend).expect("bundle checked").sup_norm())
        .fold(0.0, f64::max);
    let mu = mu_of(&cfg.u).expect("weight-1 action");
    let tau = cfg.tau;
    let moment = cfg.a.curvature_with(backend).zip_map(&mu, move |c, m| c - tau + m);
    SvResidual { dbar_sup, moment_sup: moment.sup_norm(), f02_sup: 0.0 }
}

pub fn apply_complex_gauge(f: &RealField, cfg: &Configuration) -> Result<Configuration, VortexError> {
    apply_complex_gauge_with(f, cfg, Backend::Spectral)
}

/// `(u, A) ↦ (e^f u, A + (−∂ᵧf, ∂ₓf))`; the curvature scalar gains `Δf`.
pub fn apply_complex_gauge_with(
    f: &RealField,
    cfg: &Configuration,
    backend: Backend,
) -> Result<Configuration, VortexError> {
    let a = cfg.a.add_coexact(f, backend)?;
    let ef = f.map(f64::exp);
    let u = cfg.u.iter().map(|s| s.multiply_real(&ef)).collect::<Result<Vec<_>, _>>()?;
    Configuration::new(u, a, cfg.tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeFixOptions {
    pub kw: KwOptions,
    /// Accepted `sup|∂̄_A u₀|` relative to `max(1, sup|u₀|)`.
    pub holo_tol: f64,
}

impl Default for GaugeFixOptions {
    fn default() -> Self {
        GaugeFixOptions { kw: KwOptions::new(GAUGE_FIX_KW_TOL, 50), holo_tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct GaugeFixed {
    pub config: Configuration,
    pub f: RealField,
    pub kw: KwSolution,
    pub certificate: Certificate,
    /// Residual of the holomorphic input with the solver's backend.
    pub input_dbar_sup: f64,
}

/// `τ − 2πd/Vol`, or `BelowThreshold` when it is within the margin.
pub fn check_threshold(tau: f64, d: f64, vol: f64) -> Result<f64, VortexError> {
    let threshold = 2.0 * std::f64::consts::PI * d / vol;
    let margin = tau - threshold;
    if margin.is_nan() || margin < THRESHOLD_MARGIN * tau.abs().max(1.0) {
        return Err(VortexError::BelowThreshold { tau, threshold, margin });
    }
    Ok(margin)
}

/// Moves a holomorphic pair `(u₀, A₀)` to a solution of the vortex equations
/// by one Kazdan–Warner solve.
pub fn hk_gauge_fix(
    u0: Vec<ComplexSection>,
    a0: UnitaryConnection,
    tau: f64,
    opts: &GaugeFixOptions,
) -> Result<GaugeFixed, VortexError> {
    let start = Configuration::new(u0, a0, tau)?;
    let backend = opts.kw.backend;
    // holomorphy of the input is judged spectrally whatever the backend
    let spectral_dbar = sv_residual_with(&start, Backend::Spectral).dbar_sup;
    let scale = start.u.iter().map(|s| s.values().sup_norm()).fold(1.0, f64::max);
    let holo = opts.holo_tol * scale;
    if spectral_dbar > holo {
        return Err(VortexError::NotHolomorphic { residual: spectral_dbar, tol: holo });
    }
    let input_dbar_sup = match backend {
        Backend::Spectral => spectral_dbar,
        Backend::Stencil => sv_residual_with(&start, backend).dbar_sup,
    };
    let grid = *start.grid();
    let d = degree(&start.a)?;
    let margin = check_threshold(tau, d as f64, grid.vol())?;
    let b = mu_of(&start.u)?;
    if b.max().is_nan() || b.max() <= 0.0 {
        return Err(VortexError::Unstable);
    }
    let w = start.a.curvature_with(backend).map(|c| tau - c);
    let problem = KwProblem::new(b, w)?;
    let kw = kw_solve_with(&problem, &opts.kw, None)?;
    let config = apply_complex_gauge_with(&kw.f, &start, backend)?;
    let res = sv_residual_with(&config, backend);
    let certificate = Certificate {
        dbar_sup: res.dbar_sup,
        moment_sup: res.moment_sup,
        f02_sup: res.f02_sup,
        kw_iterations: kw.iterations,
        threshold_margin: margin,
    };
    Ok(GaugeFixed { config, f: kw.f.clone(), kw, certificate, input_dbar_sup })
}

/// The τ-vortex through `φ₀ = Σ c_j s_j` with the background connection of
/// degree `d`: the `n = 1` case of [`hk_gauge_fix`] with `B = ½|φ₀|²`.
pub fn tau_vortex_solve(coeffs: &[Complex64], d: u32, tau: f64, grid: TorusGrid) -> Result<GaugeFixed, VortexError> {
    tau_vortex_solve_with(coeffs, LineBundle::new(d, grid)?, tau, &GaugeFixOptions::default())
}

pub fn tau_vortex_solve_with(
    coeffs: &[Complex64],
    bundle: LineBundle,
    tau: f64,
    opts: &GaugeFixOptions,
) -> Result<GaugeFixed, VortexError> {
    check_threshold(tau, bundle.degree() as f64, bundle.grid().vol())?;
    let phi0 = theta_combination(&bundle, coeffs)?;
    hk_gauge_fix(vec![phi0], background_connection_for(&bundle), tau, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    /// `sup |μ∘u − ½|φ|²|`.
    pub mu_vs_phi: f64,
    /// `sup_j sup |∂_j(μ∘u) − Re(φ̄ D_jφ)|`.
    pub d_mu_identity: f64,
    /// `sup |φ̄ ∂̄_Aφ|`, which bounds `⟨φ, ∂̄_Aφ⟩_ℝ`.
    pub phi_dbar: f64,
    /// `sup |μ∘u − (τ − iΛF_A)|`.
    pub mu_vs_curvature: f64,
}

/// Compares a symplectic vortex `cfg` with a τ-vortex `(φ, A)` on the same
/// connection.
pub fn correspondence_check(
    cfg: &Configuration,
    phi: &ComplexSection,
    a_phi: &UnitaryConnection,
) -> Result<CorrespondenceReport, VortexError> {
    let scale = cfg.a.bx().sup_norm().max(cfg.a.by().sup_norm()).max(1.0);
    if cfg.a.bundle() != a_phi.bundle()
        || phi.bundle() != a_phi.bundle()
        || cfg.a.bx().sup_distance(a_phi.bx()) > 1e-12 * scale
        || cfg.a.by().sup_distance(a_phi.by()) > 1e-12 * scale
    {
        return Err(VortexError::ConnectionMismatch);
    }
    let mu = mu_of(&cfg.u)?;
    let half_phi = phi.pointwise_norm_sq().scale(0.5);
    let mu_vs_phi = mu.sup_distance(&half_phi);
    let (dx, dy) = covariant_derivative(phi, a_phi, Backend::Spectral)?;
    let psi = phi.values().values();
    let mut d_mu_identity: f64 = 0.0;
    for (axis, dphi) in [(Axis::X, &dx), (Axis::Y, &dy)] {
        let dmu = derivative(&mu, axis, Backend::Spectral);
        let gap = exec::max_indexed(psi.len(), |k| (dmu.values()[k] - (psi[k].conj() * dphi.values()[k]).re).abs());
        d_mu_identity = d_mu_identity.max(gap);
    }
    let dbar = dbar_a_with(phi, a_phi, Backend::Spectral)?;
    let phi_dbar = exec::max_indexed(psi.len(), |k| (psi[k].conj() * dbar.values()[k]).norm());
    let tau = cfg.tau;
    let level = cfg.a.curvature().map(|c| tau - c);
    Ok(CorrespondenceReport { mu_vs_phi, d_mu_identity, phi_dbar, mu_vs_curvature: mu.sup_distance(&level) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PiOutcome {
    Divisor(Divisor),
    /// `μ∘u` has no zero of full degree, so no holomorphic `φ` with
    /// `½|φ|² = μ∘u` exists.
    NoDivisor {
        min_mu: f64,
        /// Total multiplicity of common zeros found.
        common_degree: u32,
        degree: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiImage {
    /// `2(τ − iΛF_A)`, which equals `2μ∘u = |φ|²` on a solution.
    pub modulus_sq: RealField,
    pub outcome: PiOutcome,
}

/// The map `[(u, A)] ↦ [(φ, A)]`, represented by the divisor of `φ`.
pub fn pi_map(cfg: &Configuration) -> Result<PiImage, VortexError> {
    let tau = cfg.tau;
    let modulus_sq = cfg.a.curvature().map(|c| 2.0 * (tau - c));
    let d = cfg.bundle().degree();
    let outcome = if cfg.n() == 1 {
        PiOutcome::Divisor(divisor_extract_with(&cfg.u[0], &modulus_sq)?)
    } else {
        let refs: Vec<&ComplexSection> = cfg.u.iter().collect();
        let windings = common_windings(&refs)?;
        let total: i64 = windings.iter().map(|&w| w as i64).sum();
        if total == d as i64 {
            let lead = refs
                .iter()
                .max_by(|a, b| a.values().sup_norm().total_cmp(&b.values().sup_norm()))
                .expect("nonempty");
            PiOutcome::Divisor(divisor_from_common(lead, &windings, &modulus_sq))
        } else {
            PiOutcome::NoDivisor { min_mu: mu_of(&cfg.u)?.min(), common_degree: total as u32, degree: d }
        }
    };
    Ok(PiImage { modulus_sq, outcome })
}

#[derive(Debug, Clone)]
pub struct FiberSample {
    /// Unit vector `a ∈ ℂⁿ`.
    pub coeffs: Vec<Complex64>,
    pub config: Configuration,
    pub residual: SvResidual,
}

/// Configurations `u = (a₁φ, …, aₙφ)` with `Σ|a_k|² = 1`, all mapped by Π to
/// the class of `(φ, A)`.
pub fn fiber_sample(
    phi: &ComplexSection,
    a: &UnitaryConnection,
    tau: f64,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<FiberSample>, VortexError> {
    if n == 0 {
        return Err(VortexError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let raw: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let coeffs: Vec<Complex64> = raw.iter().map(|c| c / norm).collect();
            fiber_point(phi, a, tau, &coeffs)
        })
        .collect()
}

/// The configuration `(a₁φ, …, aₙφ)` for given coefficients.
pub fn fiber_point(
    phi: &ComplexSection,
    a: &UnitaryConnection,
    tau: f64,
    coeffs: &[Complex64],
) -> Result<FiberSample, VortexError> {
    let u = coeffs.iter().map(|&c| phi.scale(c)).collect();
    let config = Configuration::new(u, a.clone(), tau)?;
    let residual = sv_residual(&config);
    Ok(FiberSample { coeffs: coeffs.to_vec(), config, residual })
}

/// Whether `v = c·u` for a constant unit `c`: the only real gauge
/// transformations fixing a connection on a connected base are constants.
pub fn real_gauge_related(u: &[ComplexSection], v: &[ComplexSection], tol: f64) -> bool {
    if u.len() != v.len() {
        return false;
    }
    let mut inner = Complex64::new(0.0, 0.0);
    let mut norm = 0.0;
    for (s, t) in u.iter().zip(v) {
        for (p, q) in s.values().values().iter().zip(t.values().values()) {
            inner += p.conj() * q;
            norm += p.norm_sqr();
        }
    }
    if norm == 0.0 {
        return v.iter().all(|t| t.values().sup_norm() == 0.0);
    }
    let c = inner / norm;
    if (c.norm() - 1.0).abs() > tol {
        return false;
    }
    let scale = v.iter().map(|t| t.values().sup_norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    u.iter().zip(v).all(|(s, t)| {
        s.values().values().iter().zip(t.values().values()).all(|(p, q)| (q - c * p).norm() <= tol * scale)
    })
}

/// `∫ 2μ∘u`, which equals `2(τ·Vol − 2πd)` on a solution.
pub fn integral_two_mu(cfg: &Configuration) -> Result<f64, VortexError> {
    Ok(2.0 * integrate(&mu_of(&cfg.u)?))
}

/// `2(τ·Vol − 2πd)`.
pub fn predicted_integral(tau: f64, d: u32, vol: f64) -> f64 {
    2.0 * (tau * vol - 2.0 * std::f64::consts::PI * d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sections::{background_connection, divisor_extract, theta_basis};
    use crate::torus::random_smooth;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::unit(n).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mu_scales_quadratically() {
        let s = theta_basis(1, grid(16)).unwrap().remove(0);
        let m1 = mu_of(std::slice::from_ref(&s)).unwrap();
        let m3 = mu_of(&[s.scale(c(3.0, 0.0))]).unwrap();
        assert!(m3.sup_distance(&m1.scale(9.0)) <= 1e-12 * m3.sup_norm());
        let rot = mu_of(&[s.clone(), s.scale(Complex64::from_polar(1.0, PI / 3.0))]).unwrap();
        assert!(rot.sup_distance(&m1.scale(2.0)) <= 1e-13 * rot.sup_norm());
    }

    #[test]
    fn weighted_action_is_refused() {
        let s = theta_basis(1, grid(16)).unwrap().remove(0);
        let action = WeightedCircleAction::new(vec![1, 2]).unwrap();
        assert!(matches!(mu_of_action(&action, &[s.clone(), s]), Err(VortexError::NonReebAction)));
    }

    #[test]
    fn threshold_is_strict() {
        let g = grid(32);
        let one = [c(1.0, 0.0)];
        for tau in [6.0, 2.0 * PI] {
            assert!(matches!(tau_vortex_solve(&one, 1, tau, g), Err(VortexError::BelowThreshold { .. })));
        }
        assert!(tau_vortex_solve(&one, 1, 2.0 * PI + 0.5, g).is_ok());
    }

    #[test]
    fn zero_coefficients_are_rejected() {
        let r = tau_vortex_solve(&[c(0.0, 0.0)], 1, 10.0, grid(16));
        assert!(matches!(r, Err(VortexError::Section(SectionError::ZeroSection))));
    }

    #[test]
    fn tau_vortex_is_certified_and_keeps_its_divisor() {
        let g = grid(64);
        let coeffs = [c(0.7, -0.2), c(0.1, 0.9)];
        let sol = tau_vortex_solve(&coeffs, 2, 20.0, g).unwrap();
        assert!(sol.certificate.moment_sup <= 1e-8);
        assert!(sol.certificate.dbar_sup <= 1e-8);
        let phi0 = theta_combination(&LineBundle::new(2, g).unwrap(), &coeffs).unwrap();
        let before = crate::sections::plaquette_windings(&phi0).unwrap();
        let after = crate::sections::plaquette_windings(&sol.config.u()[0]).unwrap();
        assert_eq!(before, after);
        assert_eq!(divisor_extract(&sol.config.u()[0]).unwrap().degree, 2);
    }

    #[test]
    fn shifted_tau_gives_unit_moment_residual() {
        let sol = tau_vortex_solve(&[c(1.0, 0.0)], 1, 10.0, grid(32)).unwrap();
        let shifted = sol.config.with_tau(11.0).unwrap();
        assert!((sv_residual(&shifted).moment_sup - 1.0).abs() < 1e-8);
        assert_eq!(sv_residual(&shifted).f02_sup, 0.0);
    }

    #[test]
    fn complex_gauge_adds_laplacian_to_curvature() {
        let g = grid(32);
        let b = LineBundle::new(1, g).unwrap();
        let cfg = Configuration::new(theta_basis(1, g).unwrap(), background_connection_for(&b), 10.0).unwrap();
        let same = apply_complex_gauge(&RealField::zeros(g), &cfg).unwrap();
        assert_eq!(same, cfg);
        let k = apply_complex_gauge(&RealField::constant(g, 0.4), &cfg).unwrap();
        assert_eq!(k.a(), cfg.a());
        let ratio = mu_of(k.u()).unwrap().sup_norm() / mu_of(cfg.u()).unwrap().sup_norm();
        assert!((ratio - 0.8f64.exp()).abs() < 1e-12);
        let f = random_smooth(g, 4, 0.5, 3);
        let moved = apply_complex_gauge(&f, &cfg).unwrap();
        let gap = moved.a().curvature().sub(&cfg.a().curvature());
        assert!(gap.sup_distance(&crate::torus::laplacian(&f)) <= 1e-10);
    }

    #[test]
    fn non_holomorphic_input_is_refused() {
        let g = grid(32);
        let b = LineBundle::new(1, g).unwrap();
        let bent = theta_basis(1, g).unwrap()[0]
            .multiply_real(&RealField::from_fn(g, |x, _| 1.5 + (2.0 * PI * x).cos()))
            .unwrap();
        let r = hk_gauge_fix(vec![bent], background_connection_for(&b), 10.0, &GaugeFixOptions::default());
        assert!(matches!(r, Err(VortexError::NotHolomorphic { .. })));
    }

    #[test]
    fn vanishing_input_is_unstable() {
        let g = grid(16);
        let b = LineBundle::new(1, g).unwrap();
        let r = hk_gauge_fix(vec![ComplexSection::zero(b)], background_connection_for(&b), 10.0, &GaugeFixOptions::default());
        assert!(matches!(r, Err(VortexError::Unstable)));
    }

    #[test]
    fn connection_mismatch_is_detected() {
        let g = grid(32);
        let sol = tau_vortex_solve(&[c(1.0, 0.0)], 1, 10.0, g).unwrap();
        let other = background_connection(1, g).unwrap();
        let r = correspondence_check(&sol.config, &sol.config.u()[0], &other);
        assert!(matches!(r, Err(VortexError::ConnectionMismatch)));
    }

    #[test]
    fn fiber_samples_are_unit_and_distinct() {
        let g = grid(32);
        let sol = tau_vortex_solve(&[c(1.0, 0.0)], 1, 10.0, g).unwrap();
        let phi = &sol.config.u()[0];
        let samples = fiber_sample(phi, sol.config.a(), 10.0, 3, 2, 42).unwrap();
        for s in &samples {
            let norm: f64 = s.coeffs.iter().map(|c| c.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
        assert!(!real_gauge_related(samples[0].config.u(), samples[1].config.u(), 1e-8));
        let turned = samples[0].config.scale_u(Complex64::from_polar(1.0, 1.1));
        assert!(real_gauge_related(samples[0].config.u(), turned.u(), 1e-12));
        let again = fiber_sample(phi, sol.config.a(), 10.0, 3, 2, 42).unwrap();
        assert_eq!(again[1].coeffs, samples[1].coeffs);
    }
}
