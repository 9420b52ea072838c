//! The Kazdan–Warner equation `Δf + B e^{2f} = w` on the torus.
//!
//! Solutions are the critical points of the convex energy
//! `E(f) = ∫ ½|∇f|² + ½ B e^{2f} − w f`, whose gradient is the residual
//! `Δf + B e^{2f} − w` and whose Hessian `Δ + 2B e^{2f}` is positive definite
//! once `B ≥ 0` is nonzero somewhere. A solution exists (and is unique) iff
//! `∫w > 0`; integrating the equation gives `∫ B e^{2f} = ∫ w`.
//!
//! [`kw_solve`] is a damped Newton method (PCG inner solves, Armijo line
//! search on `E`). [`kw_solve_picard`] is an independent fixed-point
//! iteration used to cross-check it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::torus::{integrate, laplacian_with, shifted_inverse, Backend, RealField, TorusGrid};

/// Negative values of `B` above this are treated as roundoff and clamped.
pub const NEGATIVE_B_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KwError {
    #[error("B and w are sampled on different grids")]
    GridMismatch,
    #[error("coefficient B has minimum {0:e}; it must be nonnegative")]
    NegativeCoefficient(f64),
    #[error("problem is infeasible: {0}")]
    InfeasibleProblem(InfeasibleReason),
    #[error("no convergence after {iterations} iterations (best residual {best_residual:e})")]
    MaxIterationsExceeded { iterations: usize, best_residual: f64 },
    #[error("line search stalled at residual {0:e}")]
    LineSearchStalled(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfeasibleReason {
    /// `∫w ≤ 0`.
    NonPositiveMeanW,
    /// `B` vanishes on every grid cell.
    DegenerateB,
}

impl std::fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InfeasibleReason::NonPositiveMeanW => "NonPositiveMeanW",
            InfeasibleReason::DegenerateB => "DegenerateB",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible(InfeasibleReason),
}

/// Coefficient `B ≥ 0` and right-hand side `w` on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KwProblem {
    b: RealField,
    w: RealField,
}

impl KwProblem {
    /// Validates the grids and clamps roundoff-negative `B` to zero.
    pub fn new(b: RealField, w: RealField) -> Result<Self, KwError> {
        if b.grid() != w.grid() {
            return Err(KwError::GridMismatch);
        }
        let min = b.min();
        if min < -NEGATIVE_B_TOL {
            return Err(KwError::NegativeCoefficient(min));
        }
        let b = if min < 0.0 { b.map(|v| v.max(0.0)) } else { b };
        Ok(KwProblem { b, w })
    }

    pub fn b(&self) -> &RealField {
        &self.b
    }

    pub fn w(&self) -> &RealField {
        &self.w
    }

    pub fn grid(&self) -> &TorusGrid {
        self.b.grid()
    }

    /// Same problem with `B` replaced by `c B`.
    pub fn with_scaled_b(&self, c: f64) -> Result<Self, KwError> {
        KwProblem::new(self.b.scale(c), self.w.clone())
    }
}

/// Solvability test: `∫w > 0` and `B` positive on at least one cell.
pub fn kw_feasibility(p: &KwProblem) -> Feasibility {
    if integrate(&p.w) <= 0.0 {
        return Feasibility::Infeasible(InfeasibleReason::NonPositiveMeanW);
    }
    let pos_tol = 1e-12 * p.w.sup_norm().max(1.0);
    if p.b.max() <= pos_tol {
        return Feasibility::Infeasible(InfeasibleReason::DegenerateB);
    }
    Feasibility::Feasible
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Newton,
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KwOptions {
    /// Sup-norm tolerance on the residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Discretization of `Δ`.
    pub backend: Backend,
    /// Damping `θ ∈ (0, 1]` of the fixed-point iteration.
    pub picard_damping: f64,
}

impl Default for KwOptions {
    fn default() -> Self {
        KwOptions { tol: 1e-10, max_iter: 50, backend: Backend::Spectral, picard_damping: 1.0 }
    }
}

impl KwOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        KwOptions { tol, max_iter, ..Default::default() }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KwSolution {
    pub f: RealField,
    /// `sup |Δf + B e^{2f} − w|` with the solver's backend.
    pub residual_sup: f64,
    /// Same residual re-evaluated with the other backend.
    pub cross_residual_sup: f64,
    pub iterations: usize,
    pub solver: SolverKind,
    pub backend: Backend,
    /// `E(f_k)` for every iterate, starting with the initial guess.
    pub energy_trace: Vec<f64>,
}

/// `Δf + B e^{2f} − w`.
pub fn kw_residual(f: &RealField, p: &KwProblem, backend: Backend) -> RealField {
    let lap = laplacian_with(f, backend);
    let values = exec::collect_indexed(f.grid().len(), |k| {
        lap.values()[k] + p.b.values()[k] * (2.0 * f.values()[k]).exp() - p.w.values()[k]
    });
    RealField::new(*f.grid(), values).unwrap_or_else(|_| RealField::constant(*f.grid(), f64::INFINITY))
}

/// `E(f) = ∫ ½|∇f|² + ½ B e^{2f} − w f` (spectral backend).
pub fn kw_energy(f: &RealField, p: &KwProblem) -> f64 {
    kw_energy_with(f, p, Backend::Spectral)
}

/// Energy with the Dirichlet term evaluated as `½ ∫ f Δf`, which is the
/// form whose exact gradient is [`kw_residual`] for either backend.
pub fn kw_energy_with(f: &RealField, p: &KwProblem, backend: Backend) -> f64 {
    let lap = laplacian_with(f, backend);
    let g = f.grid();
    let dens = exec::sum_indexed(g.len(), |k| {
        let fk = f.values()[k];
        0.5 * fk * lap.values()[k] + 0.5 * p.b.values()[k] * (2.0 * fk).exp() - p.w.values()[k] * fk
    });
    dens * g.hx() * g.hy()
}

/// Constant guess `½ log(mean w / mean B)`, or zero if `mean B = 0`.
pub fn initial_guess(p: &KwProblem) -> RealField {
    let (mb, mw) = (p.b.mean(), p.w.mean());
    let c = if mb > 0.0 && mw > 0.0 { 0.5 * (mw / mb).ln() } else { 0.0 };
    RealField::constant(*p.grid(), c)
}

fn other(backend: Backend) -> Backend {
    match backend {
        Backend::Spectral => Backend::Stencil,
        Backend::Stencil => Backend::Spectral,
    }
}

fn require_feasible(p: &KwProblem) -> Result<(), KwError> {
    match kw_feasibility(p) {
        Feasibility::Feasible => Ok(()),
        Feasibility::Infeasible(r) => Err(KwError::InfeasibleProblem(r)),
    }
}

/// Damped Newton from the constant initial guess.
pub fn kw_solve(p: &KwProblem, tol: f64, max_iter: usize) -> Result<KwSolution, KwError> {
    kw_solve_with(p, &KwOptions::new(tol, max_iter), None)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    exec::sum_indexed(a.len(), |k| a[k] * b[k])
}

/// Preconditioned CG for `(Δ + q) x = rhs`, preconditioned by `(Δ + c)⁻¹`.
fn pcg(rhs: &RealField, q: &RealField, c: f64, backend: Backend, rel_tol: f64, max_iter: usize) -> RealField {
    let grid = *rhs.grid();
    let apply = |v: &RealField| laplacian_with(v, backend).add(&q.mul(v));
    let precond = |v: &RealField| shifted_inverse(v, c, backend);

    let mut x = RealField::zeros(grid);
    let mut r = rhs.clone();
    let mut z = precond(&r);
    let mut d = z.clone();
    let mut rz = dot(r.values(), z.values());
    let target = rel_tol * dot(rhs.values(), rhs.values()).sqrt();
    for _ in 0..max_iter {
        if dot(r.values(), r.values()).sqrt() <= target {
            break;
        }
        let ad = apply(&d);
        let alpha = rz / dot(d.values(), ad.values());
        x = x.zip_map(&d, |a, b| a + alpha * b);
        r = r.zip_map(&ad, |a, b| a - alpha * b);
        z = precond(&r);
        let rz_new = dot(r.values(), z.values());
        let beta = rz_new / rz;
        rz = rz_new;
        d = z.zip_map(&d, |a, b| a + beta * b);
    }
    x
}

/// Damped Newton on the energy, optionally from a given initial guess.
pub fn kw_solve_with(
    p: &KwProblem,
    opts: &KwOptions,
    initial: Option<&RealField>,
) -> Result<KwSolution, KwError> {
    require_feasible(p)?;
    let backend = opts.backend;
    let grid = *p.grid();
    let mut f = initial.cloned().unwrap_or_else(|| initial_guess(p));
    if f.grid() != &grid {
        return Err(KwError::GridMismatch);
    }
    let mut energy = kw_energy_with(&f, p, backend);
    let mut trace = vec![energy];
    let mut r = kw_residual(&f, p, backend);
    let mut res = r.sup_norm();
    let mut best = res;

    for it in 0..=opts.max_iter {
        if res <= opts.tol {
            return Ok(KwSolution {
                cross_residual_sup: kw_residual(&f, p, other(backend)).sup_norm(),
                f,
                residual_sup: res,
                iterations: it,
                solver: SolverKind::Newton,
                backend,
                energy_trace: trace,
            });
        }
        if it == opts.max_iter {
            break;
        }
        let q = p.b.zip_map(&f, |b, fv| 2.0 * b * (2.0 * fv).exp());
        let shift = q.mean().max(f64::MIN_POSITIVE);
        let step = pcg(&r.scale(-1.0), &q, shift, backend, 1e-11, 400);
        let slope = dot(r.values(), step.values()) * grid.hx() * grid.hy();

        let mut alpha = 1.0;
        loop {
            let trial = f.zip_map(&step, |a, b| a + alpha * b);
            let e_trial = kw_energy_with(&trial, p, backend);
            let armijo = e_trial <= energy + 1e-4 * alpha * slope;
            // Near convergence the energy decrease drops below roundoff; fall
            // back to monotone residual decrease there.
            let roundoff = (alpha * slope).abs() <= 1e-13 * energy.abs().max(1.0);
            let (r_trial, res_trial) = if armijo || roundoff {
                let rt = kw_residual(&trial, p, backend);
                let s = rt.sup_norm();
                (Some(rt), s)
            } else {
                (None, f64::INFINITY)
            };
            if armijo || (roundoff && res_trial < res) {
                f = trial;
                energy = e_trial;
                r = r_trial.expect("residual computed for accepted step");
                res = res_trial;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-10 {
                return Err(KwError::LineSearchStalled(res));
            }
        }
        best = best.min(res);
        trace.push(energy);
    }
    Err(KwError::MaxIterationsExceeded { iterations: opts.max_iter, best_residual: best })
}

/// Fixed-point oracle from the constant initial guess (`θ = 1`).
pub fn kw_solve_picard(p: &KwProblem, tol: f64, max_iter: usize) -> Result<KwSolution, KwError> {
    kw_solve_picard_with(p, &KwOptions::new(tol, max_iter), None)
}

/// `f ← f + θ (Δ + c)⁻¹ (w − B e^{2f} − Δf)` with `c = 2 max(B e^{2f})`
/// refreshed every sweep.
pub fn kw_solve_picard_with(
    p: &KwProblem,
    opts: &KwOptions,
    initial: Option<&RealField>,
) -> Result<KwSolution, KwError> {
    require_feasible(p)?;
    let theta = opts.picard_damping;
    assert!(theta > 0.0 && theta <= 1.0, "damping must lie in (0, 1]");
    let backend = opts.backend;
    let mut f = initial.cloned().unwrap_or_else(|| initial_guess(p));
    if f.grid() != p.grid() {
        return Err(KwError::GridMismatch);
    }
    let mut trace = vec![kw_energy_with(&f, p, backend)];
    let mut best = f64::INFINITY;
    for it in 0..=opts.max_iter {
        let r = kw_residual(&f, p, backend);
        let res = r.sup_norm();
        best = best.min(res);
        if res <= opts.tol {
            return Ok(KwSolution {
                cross_residual_sup: kw_residual(&f, p, other(backend)).sup_norm(),
                f,
                residual_sup: res,
                iterations: it,
                solver: SolverKind::Picard,
                backend,
                energy_trace: trace,
            });
        }
        if it == opts.max_iter || !res.is_finite() {
            break;
        }
        let c = 2.0 * p.b.zip_map(&f, |b, fv| b * (2.0 * fv).exp()).max();
        let update = shifted_inverse(&r.scale(-1.0), c, backend);
        f = f.zip_map(&update, |a, b| a + theta * b);
        trace.push(kw_energy_with(&f, p, backend));
    }
    Err(KwError::MaxIterationsExceeded { iterations: opts.max_iter, best_residual: best })
}
