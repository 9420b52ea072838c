use std::path::{Path, PathBuf};

use conevortex::cone::WeightedCircleAction;
use conevortex::kazdan_warner::{
    kw_solve_picard_with, kw_solve_with, KwError, KwOptions, KwProblem, SolverKind,
};
use conevortex::sections::{
    theta_combination, ComplexSection, LineBundle, SectionError, UnitaryConnection,
};
use conevortex::torus::{cvf, Backend, ComplexField, RealField, TorusGrid};
use conevortex::vortex::{
    check_threshold, hk_gauge_fix, integral_two_mu, mu_of, pi_map, predicted_integral, sv_residual_with,
    tau_vortex_solve_with, Certificate, Configuration, GaugeFixOptions, GaugeFixed, PiOutcome, VortexError,
};
use conevortex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{self, FieldSource, GaugeFixConfig, KwSolveConfig, PiMapConfig, ScanConfig, VortexConfig};
use crate::output::OutputDir;
use crate::Failure;

/// Everything `pi-map` needs to rebuild a solution.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub grid: TorusGrid,
    pub degree: u32,
    pub offset: [f64; 2],
    pub tau: f64,
    pub backend: Backend,
    /// Components `u_k` in the unitary frame.
    pub u_files: Vec<String>,
    /// Total potentials, stored as `a_x + i a_y`.
    pub a_file: String,
    pub certificate: Certificate,
}

impl From<VortexError> for Failure {
    fn from(e: VortexError) -> Self {
        let message = e.to_string();
        match e {
            VortexError::BelowThreshold { .. } => Failure::Infeasible { message, reason: "BelowThreshold".into() },
            VortexError::Unstable => Failure::Infeasible { message, reason: "Unstable".into() },
            VortexError::Kw(k) => k.into(),
            _ => Failure::Usage(message),
        }
    }
}

impl From<KwError> for Failure {
    fn from(e: KwError) -> Self {
        let message = e.to_string();
        match e {
            KwError::InfeasibleProblem(r) => Failure::Infeasible { message, reason: r.to_string() },
            KwError::MaxIterationsExceeded { best_residual, .. } => {
                Failure::NonConvergence { message, best_residual }
            }
            KwError::LineSearchStalled(best_residual) => Failure::NonConvergence { message, best_residual },
            KwError::GridMismatch | KwError::NegativeCoefficient(_) => Failure::Usage(message),
        }
    }
}

impl From<SectionError> for Failure {
    fn from(e: SectionError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn load_real(path: &Path) -> Result<RealField, Failure> {
    cvf::load_real(path).map_err(|e| Failure::Usage(format!("cannot load {}: {e}", path.display())))
}

fn load_complex(path: &Path) -> Result<ComplexField, Failure> {
    cvf::load_complex(path).map_err(|e| Failure::Usage(format!("cannot load {}: {e}", path.display())))
}

/// Runs `body` in `out`; failures with a reportable status also leave a
/// `failure.json`. The manifest is written in every case.
pub fn run_in<C: Serialize>(
    out: &Path,
    subcommand: &str,
    cfg: &C,
    seed: u64,
    backend: Backend,
    body: impl FnOnce(&mut OutputDir) -> Result<String, Failure>,
) -> Result<String, Failure> {
    let mut dir = OutputDir::create(out)?;
    let result = body(&mut dir);
    if let Err(f) = &result {
        dir.json("failure.json", &f.report())?;
    }
    dir.finish(subcommand, cfg, seed, backend)?;
    result
}

fn kw_field(src: &FieldSource, base: &Path, grid: Option<TorusGrid>) -> Result<RealField, Failure> {
    match src {
        FieldSource::File(p) => {
            let f = load_real(&resolve(base, p))?;
            if grid.is_some_and(|g| g != *f.grid()) {
                return Err(Failure::Usage(format!("{} does not match the configured grid", p.display())));
            }
            Ok(f)
        }
        FieldSource::Constant(v) => Ok(RealField::constant(grid.expect("grid resolved"), *v)),
    }
}

pub fn kw_solve(cfg: &KwSolveConfig, base: &Path, out: &mut OutputDir) -> Result<String, Failure> {
    let backend = cfg.backend.unwrap_or_default();
    let mut grid = cfg.grid;
    for src in [&cfg.b, &cfg.w] {
        if let (None, FieldSource::File(p)) = (grid, src) {
            grid = Some(*load_real(&resolve(base, p))?.grid());
        }
    }
    let b = kw_field(&cfg.b, base, grid)?;
    let w = kw_field(&cfg.w, base, grid)?;
    let problem = KwProblem::new(b, w)?;
    let opts = KwOptions { tol: cfg.tol, max_iter: cfg.max_iter, backend, picard_damping: cfg.picard_damping };
    let sol = match cfg.solver {
        SolverKind::Newton => kw_solve_with(&problem, &opts, None)?,
        SolverKind::Picard => kw_solve_picard_with(&problem, &opts, None)?,
    };
    out.real("f.cvf1", &sol.f)?;
    out.json(
        "certificate.json",
        &json!({
            "solver": sol.solver,
            "backend": sol.backend,
            "iterations": sol.iterations,
            "residual_sup": sol.residual_sup,
            "cross_residual_sup": sol.cross_residual_sup,
            "tol": cfg.tol,
            "energy": sol.energy_trace.last(),
        }),
    )?;
    let mut csv = String::from("iteration,energy\n");
    for (i, e) in sol.energy_trace.iter().enumerate() {
        csv.push_str(&format!("{i},{e}\n"));
    }
    out.text("energy_trace.csv", &csv)?;
    Ok(format!("kw-solve: converged in {} iterations, residual {:.3e}", sol.iterations, sol.residual_sup))
}

fn gauge_options(tol: f64, max_iter: usize, holo_tol: f64, backend: Backend) -> GaugeFixOptions {
    GaugeFixOptions { kw: KwOptions { tol, max_iter, backend, picard_damping: 1.0 }, holo_tol }
}

fn potentials(a: &UnitaryConnection) -> ComplexField {
    let (ax, ay) = (a.ax(), a.ay());
    let values = ax.values().iter().zip(ay.values()).map(|(&x, &y)| Complex64::new(x, y)).collect();
    ComplexField::new(*ax.grid(), values).expect("finite potentials")
}

fn write_solution(
    out: &mut OutputDir,
    sol: &GaugeFixed,
    u_names: &[String],
    backend: Backend,
) -> Result<(), Failure> {
    for (name, s) in u_names.iter().zip(sol.config.u()) {
        out.complex(name, s.values())?;
    }
    out.complex("A.cvf1", &potentials(sol.config.a()))?;
    let bundle = sol.config.bundle();
    let (ox, oy) = bundle.offset();
    out.json(
        "solution.json",
        &SolutionFile {
            grid: *bundle.grid(),
            degree: bundle.degree(),
            offset: [ox, oy],
            tau: sol.config.tau(),
            backend,
            u_files: u_names.to_vec(),
            a_file: "A.cvf1".into(),
            certificate: sol.certificate,
        },
    )
}

pub fn vortex_make(cfg: &VortexConfig, out: &mut OutputDir) -> Result<String, Failure> {
    let backend = cfg.backend.unwrap_or_default();
    let coeffs = match &cfg.coeffs {
        Some(c) => config::to_complex(c),
        None => config::random_coeffs(&mut config::rng(cfg.seed.unwrap_or(0)), cfg.degree as usize),
    };
    let bundle = LineBundle::new(cfg.degree, cfg.grid)?;
    let opts = gauge_options(cfg.tol, cfg.max_iter, cfg.holo_tol, backend);
    let sol = tau_vortex_solve_with(&coeffs, bundle, cfg.tau, &opts)?;
    write_solution(out, &sol, &["phi.cvf1".to_string()], backend)?;
    let divisor = match pi_map(&sol.config)?.outcome {
        PiOutcome::Divisor(d) => d,
        PiOutcome::NoDivisor { .. } => unreachable!("a single section always has a divisor"),
    };
    out.json("divisor.json", &divisor)?;
    let integral = integral_two_mu(&sol.config)?;
    let predicted = predicted_integral(cfg.tau, cfg.degree, cfg.grid.vol());
    let rel_err = (integral - predicted).abs() / predicted.abs();
    out.json(
        "certificate.json",
        &json!({
            "dbar_sup": sol.certificate.dbar_sup,
            "moment_sup": sol.certificate.moment_sup,
            "f02_sup": sol.certificate.f02_sup,
            "kw_iterations": sol.certificate.kw_iterations,
            "threshold_margin": sol.certificate.threshold_margin,
            "kw_residual_sup": sol.kw.residual_sup,
            "integral_phi_sq": integral,
            "predicted_integral": predicted,
            "integral_rel_err": rel_err,
            "coeffs": coeffs.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        }),
    )?;
    Ok(format!(
        "vortex-make: divisor of degree {} at {} point(s); integral |phi|^2 = {integral:.6} (rel err {rel_err:.2e})",
        divisor.degree,
        divisor.len()
    ))
}

pub fn sv_gaugefix(cfg: &GaugeFixConfig, out: &mut OutputDir) -> Result<String, Failure> {
    let backend = cfg.backend.unwrap_or_default();
    let weights = cfg.weights.clone().unwrap_or_else(|| vec![1; cfg.n]);
    let action = WeightedCircleAction::new(weights).map_err(|e| Failure::Usage(e.to_string()))?;
    if !action.supports_kw_reduction() {
        return Err(Failure::Usage(VortexError::NonReebAction.to_string()));
    }
    let bundle = LineBundle::new(cfg.degree, cfg.grid)?;
    let components: Vec<Vec<Complex64>> = match &cfg.components {
        Some(c) => c.iter().map(|v| config::to_complex(v)).collect(),
        None => {
            let mut rng = config::rng(cfg.seed.unwrap_or(0));
            (0..cfg.n).map(|_| config::random_coeffs(&mut rng, cfg.degree as usize)).collect()
        }
    };
    let u0 = components
        .iter()
        .map(|c| {
            if c.iter().all(|z| z.norm() == 0.0) {
                Ok(ComplexSection::zero(bundle))
            } else {
                theta_combination(&bundle, c)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let opts = gauge_options(cfg.tol, cfg.max_iter, cfg.holo_tol, backend);
    let a0 = conevortex::sections::background_connection_for(&bundle);
    let sol = hk_gauge_fix(u0, a0, cfg.tau, &opts)?;
    let names: Vec<String> = (1..=cfg.n).map(|k| format!("u_{k}.cvf1")).collect();
    write_solution(out, &sol, &names, backend)?;
    out.real("f.cvf1", &sol.f)?;
    out.real("mu.cvf1", &mu_of(sol.config.u())?)?;
    out.json("certificate.json", &sol.certificate)?;
    Ok(format!(
        "sv-gaugefix: n = {}, moment residual {:.3e}, dbar residual {:.3e}",
        cfg.n, sol.certificate.moment_sup, sol.certificate.dbar_sup
    ))
}

/// Rebuilds a stored solution.
pub fn load_solution(dir: &Path) -> Result<(SolutionFile, Configuration), Failure> {
    let path = dir.join("solution.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: SolutionFile =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid {}: {e}", path.display())))?;
    let bundle = LineBundle::with_offset(file.degree, file.grid, (file.offset[0], file.offset[1]))?;
    let mut u = Vec::with_capacity(file.u_files.len());
    for name in &file.u_files {
        let values = load_complex(&dir.join(name))?;
        if values.grid() != &file.grid {
            return Err(Failure::Usage(format!("{name} is not on the solution grid")));
        }
        u.push(ComplexSection::new(bundle, values)?);
    }
    let a = load_complex(&dir.join(&file.a_file))?;
    if a.grid() != &file.grid {
        return Err(Failure::Usage(format!("{} is not on the solution grid", file.a_file)));
    }
    let conn = UnitaryConnection::from_potentials(bundle, a.re(), a.im())?;
    let cfg = Configuration::new(u, conn, file.tau)?;
    Ok((file, cfg))
}

pub fn pi_map_cmd(cfg: &PiMapConfig, base: &Path, out: &mut OutputDir) -> Result<String, Failure> {
    let (file, solution) = load_solution(&resolve(base, &cfg.solution))?;
    let res = sv_residual_with(&solution, file.backend);
    if res.moment_sup > cfg.certify_tol || res.dbar_sup > cfg.certify_tol {
        return Err(Failure::Usage(format!(
            "input is not a certified solution: moment residual {:.3e}, dbar residual {:.3e} (tolerance {:.1e})",
            res.moment_sup, res.dbar_sup, cfg.certify_tol
        )));
    }
    let image = pi_map(&solution)?;
    out.real("modulus.cvf1", &image.modulus_sq)?;
    match &image.outcome {
        PiOutcome::Divisor(d) => {
            out.json("divisor.json", d)?;
            Ok(format!("pi-map: divisor of degree {} at {} point(s)", d.degree, d.len()))
        }
        PiOutcome::NoDivisor { min_mu, common_degree, degree } => {
            out.json(
                "nodivisor.json",
                &json!({
                    "kind": "no_divisor",
                    "min_mu": min_mu,
                    "common_degree": common_degree,
                    "degree": degree,
                    "n": solution.n(),
                }),
            )?;
            Ok(format!("pi-map: no divisor, min mu = {min_mu:.6}"))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub tau: f64,
    pub integral_mu: f64,
    pub predicted: f64,
    pub rel_err: f64,
}

pub fn threshold_scan(cfg: &ScanConfig, out: &mut OutputDir) -> Result<String, Failure> {
    let backend = cfg.backend.unwrap_or_default();
    for &tau in &cfg.tau_list {
        check_threshold(tau, cfg.degree as f64, cfg.grid.vol())?;
    }
    let coeffs = match &cfg.coeffs {
        Some(c) => config::to_complex(c),
        None => config::random_coeffs(&mut config::rng(cfg.seed.unwrap_or(0)), cfg.degree as usize),
    };
    let bundle = LineBundle::new(cfg.degree, cfg.grid)?;
    let opts = gauge_options(cfg.tol, cfg.max_iter, 1e-6, backend);
    let mut taus = cfg.tau_list.clone();
    taus.sort_by(f64::total_cmp);
    let rows = taus
        .par_iter()
        .map(|&tau| -> Result<ScanRow, Failure> {
            let sol = tau_vortex_solve_with(&coeffs, bundle, tau, &opts)?;
            let integral_mu = integral_two_mu(&sol.config)?;
            let predicted = predicted_integral(tau, cfg.degree, cfg.grid.vol());
            Ok(ScanRow { tau, integral_mu, predicted, rel_err: (integral_mu - predicted).abs() / predicted.abs() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("tau,integral_mu,predicted,rel_err\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{:e}\n", r.tau, r.integral_mu, r.predicted, r.rel_err));
    }
    out.text("scan.csv", &csv)?;
    let worst = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    Ok(format!("threshold-scan: {} points, max rel err {worst:.2e}", rows.len()))
}

