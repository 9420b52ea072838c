//! Acceptance criteria. Each check prints one `PASS`/`FAIL` line; the
//! process exits nonzero if any check fails.

use std::f64::consts::PI;
use std::time::Instant;

use conevortex::cone::*;
use conevortex::kazdan_warner::*;
use conevortex::sections::*;
use conevortex::torus::{cvf, random_smooth, Backend, RealField, TorusGrid};
use conevortex::vortex::*;
use conevortex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unit(n: usize) -> TorusGrid {
    TorusGrid::unit(n).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_coeffs(d: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn kw_constant() -> Check {
    let g = unit(64);
    let p = KwProblem::new(RealField::constant(g, 1.0), RealField::constant(g, 2.0)).map_err(|e| e.to_string())?;
    let sol = kw_solve(&p, 1e-13, 20).map_err(|e| e.to_string())?;
    let err = sol.f.shift(-0.5 * 2f64.ln()).sup_norm();
    ensure(err <= 1e-12, format!("sup|f - ln2/2| = {err:.2e}"))
}

fn kw_manufactured() -> Check {
    let g = unit(128);
    let fstar = RealField::from_fn(g, |x, y| 0.3 * (2.0 * PI * x).cos() * (2.0 * PI * y).sin());
    let b = RealField::from_fn(g, |_, y| 1.0 + 0.5 * (2.0 * PI * y).cos());
    let w = fstar.scale(8.0 * PI * PI).add(&b.zip_map(&fstar, |b, f| b * (2.0 * f).exp()));
    let p = KwProblem::new(b, w).map_err(|e| e.to_string())?;
    let newton = kw_solve(&p, 1e-10, 50).map_err(|e| e.to_string())?;
    let picard = kw_solve_picard(&p, 1e-9, 5000).map_err(|e| e.to_string())?;
    let err = newton.f.sup_distance(&fstar);
    let agree = newton.f.sup_distance(&picard.f);
    ensure(
        err <= 1e-8 && newton.iterations <= 25 && agree <= 1e-6,
        format!("sup error {err:.2e}, {} Newton iterations, Picard gap {agree:.2e}", newton.iterations),
    )
}

fn kw_uniqueness() -> Check {
    let g = unit(64);
    let b = random_smooth(g, 3, 1.0, 31).map(|v| (v + 0.9).max(0.0));
    let w = random_smooth(g, 3, 3.0, 32).shift(1.5);
    let p = KwProblem::new(b, w).map_err(|e| e.to_string())?;
    let opts = KwOptions::new(1e-11, 60);
    let guesses: Vec<RealField> = (0..5u64).map(|k| random_smooth(g, 4, 2.0, 100 + k).shift(k as f64 - 2.0)).collect();
    let sols = guesses
        .iter()
        .map(|f0| kw_solve_with(&p, &opts, Some(f0)).map(|s| s.f))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for a in &sols {
        for b in &sols {
            worst = worst.max(a.sup_distance(b));
        }
    }
    ensure(worst <= 1e-8, format!("max pairwise sup distance {worst:.2e} over 5 guesses"))
}

fn threshold() -> Check {
    let g = unit(64);
    let one = [c(1.0, 0.0)];
    let mut notes = Vec::new();
    for tau in [6.0, 2.0 * PI] {
        let below = matches!(tau_vortex_solve(&one, 1, tau, g), Err(VortexError::BelowThreshold { .. }));
        // the reduced problem itself has ∫w = τ - 2π ≤ 0
        let bundle = LineBundle::new(1, g).unwrap();
        let bmu = mu_of(&[theta_section(&bundle, 0)]).unwrap();
        let w = background_connection_for(&bundle).curvature().map(|k| tau - k);
        let infeasible = matches!(
            kw_solve(&KwProblem::new(bmu, w).unwrap(), 1e-10, 50),
            Err(KwError::InfeasibleProblem(InfeasibleReason::NonPositiveMeanW))
        );
        if !(below && infeasible) {
            return Err(format!("tau = {tau} was not refused"));
        }
        notes.push(format!("tau={tau:.4} refused"));
    }
    let above = tau_vortex_solve(&one, 1, 2.0 * PI + 0.5, g).map_err(|e| e.to_string())?;
    ensure(
        above.certificate.moment_sup <= 1e-8,
        format!("{}; tau=2pi+0.5 converged in {} iterations", notes.join(", "), above.kw.iterations),
    )
}

fn bradlow_law() -> Check {
    let g = unit(128);
    let mut worst: f64 = 0.0;
    for tau in [2.0 * PI + 0.5, 8.0, 10.0, 12.0] {
        let sol = tau_vortex_solve(&[c(1.0, 0.0)], 1, tau, g).map_err(|e| e.to_string())?;
        let got = integral_two_mu(&sol.config).unwrap();
        let want = predicted_integral(tau, 1, 1.0);
        worst = worst.max((got - want).abs() / want);
    }
    ensure(worst <= 1e-4, format!("max relative error {worst:.2e} over 4 values of tau"))
}

fn residual_certificate() -> Check {
    let coeffs = [c(1.0, 0.0)];
    let fine = tau_vortex_solve(&coeffs, 1, 10.0, unit(128)).map_err(|e| e.to_string())?;
    let coarse = tau_vortex_solve(&coeffs, 1, 10.0, unit(64)).map_err(|e| e.to_string())?;
    let cert = fine.certificate;
    let stencil = |s: &GaugeFixed| {
        let r = sv_residual_with(&s.config, Backend::Stencil);
        r.dbar_sup.max(r.moment_sup)
    };
    let (r64, r128) = (stencil(&coarse), stencil(&fine));
    let slope = (r64 / r128).log2();
    ensure(
        cert.dbar_sup <= 1e-8 && cert.moment_sup <= 1e-8 && slope >= 1.9,
        format!(
            "spectral dbar {:.2e}, moment {:.2e}; stencil {r64:.2e} -> {r128:.2e} (slope {slope:.2})",
            cert.dbar_sup, cert.moment_sup
        ),
    )
}

fn divisor_topology() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 1..=3u32 {
        let bundle = LineBundle::new(d, unit(64)).unwrap();
        for _ in 0..20 {
            let s = theta_combination(&bundle, &random_coeffs(d as usize, &mut rng)).unwrap();
            let div = divisor_extract(&s).map_err(|e| e.to_string())?;
            if div.degree != d {
                return Err(format!("degree {} for d = {d}", div.degree));
            }
        }
    }
    let locate = |n: usize| -> Result<[f64; 2], String> {
        let sol = tau_vortex_solve(&[c(1.0, 0.0)], 1, 10.0, unit(n)).map_err(|e| e.to_string())?;
        match pi_map(&sol.config).map_err(|e| e.to_string())?.outcome {
            PiOutcome::Divisor(div) if div.len() == 1 => Ok(div.points[0]),
            other => Err(format!("unexpected image {other:?}")),
        }
    };
    let (a, b) = (locate(128)?, locate(256)?);
    let shift = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
    let h = 1.0 / 256.0;
    ensure(shift <= 1.5 * h, format!("60 draws of exact degree; d=1 zero moved {:.2} fine spacings", shift / h))
}

fn homogeneity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let z: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let f = rng.gen_range(-3.0..3.0);
        let report = homogeneity_check(&WeightedCircleAction::reeb(n), &[(f, ConePoint::new(z).unwrap())]).unwrap();
        worst = worst.max(report.max_gap);
    }
    let weighted = WeightedCircleAction::new(vec![1, 2]).unwrap();
    let counter = homogeneity_check(&weighted, &[(0.5, ConePoint::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap())]).unwrap();
    ensure(
        worst <= 1e-12 && counter.max_gap >= 0.5 && !counter.passed(),
        format!("weight-1 gap {worst:.2e}; weights (1,2) gap {:.3}", counter.max_gap),
    )
}

fn moment_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for n in 1..=3usize {
        let action = WeightedCircleAction::reeb(n);
        for _ in 0..100 {
            let z: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
            let v: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let at = |t: f64| {
                let zt: Vec<Complex64> = z.iter().zip(&v).map(|(a, b)| a + b * t).collect();
                cone_moment(&action, &ConePoint::new(zt).unwrap()).unwrap()
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let k = fundamental_field(&action, &ConePoint::new(z.clone()).unwrap()).unwrap();
            worst = worst.max((fd - flat_kahler_form(&v, &k)).abs());
        }
    }
    ensure(worst <= 1e-6, format!("max |dmu(v) - omega0(v, K)| = {worst:.2e} over 300 points"))
}

fn rescaling() -> Check {
    let g = unit(64);
    let bundle = LineBundle::new(2, g).unwrap();
    let u0 = vec![
        theta_combination(&bundle, &[c(0.6, 0.1), c(-0.3, 0.8)]).unwrap(),
        theta_combination(&bundle, &[c(0.2, -0.5), c(0.9, 0.0)]).unwrap(),
    ];
    let a0 = background_connection_for(&bundle);
    let opts = GaugeFixOptions::default();
    let base = hk_gauge_fix(u0.clone(), a0.clone(), 20.0, &opts).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for s in [0.1, 10.0] {
        let scaled: Vec<ComplexSection> = u0.iter().map(|x| x.scale(c(s, 0.0))).collect();
        let out = hk_gauge_fix(scaled, a0.clone(), 20.0, &opts).map_err(|e| e.to_string())?;
        for (p, q) in out.config.u().iter().zip(base.config.u()) {
            worst = worst.max(p.values().sup_distance(q.values()));
        }
        worst = worst.max(out.config.a().bx().sup_distance(base.config.a().bx()));
        worst = worst.max(out.config.a().by().sup_distance(base.config.a().by()));
        worst = worst.max(mu_of(out.config.u()).unwrap().sup_distance(&mu_of(base.config.u()).unwrap()));
    }
    ensure(worst <= 1e-8, format!("max field change {worst:.2e} for c in {{0.1, 10}}"))
}

fn correspondence() -> Check {
    let g = unit(64);
    let sol = tau_vortex_solve(&[c(0.8, 0.3), c(-0.2, 0.6)], 2, 20.0, g).map_err(|e| e.to_string())?;
    let phi = &sol.config.u()[0];
    let report = correspondence_check(&sol.config, phi, sol.config.a()).map_err(|e| e.to_string())?;
    let bundle = LineBundle::new(2, g).unwrap();
    let pair = hk_gauge_fix(theta_basis_for(&bundle), background_connection_for(&bundle), 20.0, &GaugeFixOptions::default())
        .map_err(|e| e.to_string())?;
    let (min_mu, no_div) = match pi_map(&pair.config).map_err(|e| e.to_string())?.outcome {
        PiOutcome::NoDivisor { min_mu, .. } => (min_mu, true),
        PiOutcome::Divisor(_) => (0.0, false),
    };
    ensure(
        report.phi_dbar <= 1e-8 && report.mu_vs_curvature <= 1e-8 && no_div && min_mu > 0.0,
        format!(
            "|phi dbar phi| {:.2e}, |mu - (tau - F)| {:.2e}; n=2 gives NoDivisor with min mu {min_mu:.3}",
            report.phi_dbar, report.mu_vs_curvature
        ),
    )
}

fn artifacts(seed: u64) -> Result<Vec<u8>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = random_coeffs(2, &mut rng);
    let sol = tau_vortex_solve(&coeffs, 2, 20.0, unit(64)).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    cvf::write_complex(&mut out, sol.config.u()[0].values()).map_err(|e| e.to_string())?;
    cvf::write_real(&mut out, sol.config.a().bx()).map_err(|e| e.to_string())?;
    cvf::write_real(&mut out, sol.config.a().by()).map_err(|e| e.to_string())?;
    let image = pi_map(&sol.config).map_err(|e| e.to_string())?;
    out.extend(serde_json::to_vec(&image.outcome).unwrap());
    out.extend(serde_json::to_vec(&sol.certificate).unwrap());
    Ok(out)
}

fn determinism() -> Check {
    let first = artifacts(7)?;
    let second = artifacts(7)?;
    conevortex::exec::set_parallel(false);
    let serial = artifacts(7);
    conevortex::exec::set_parallel(true);
    let serial = serial?;
    ensure(
        first == second && first == serial,
        format!("{} bytes identical across two runs and the sequential path", first.len()),
    )
}

fn main() {
    let checks: [(&str, fn() -> Check); 12] = [
        ("kw constant case", kw_constant),
        ("kw manufactured solution", kw_manufactured),
        ("kw uniqueness", kw_uniqueness),
        ("existence threshold", threshold),
        ("linear law in tau", bradlow_law),
        ("residual certificate", residual_certificate),
        ("divisor topology", divisor_topology),
        ("homogeneity identity", homogeneity),
        ("moment map identity", moment_identity),
        ("rescaling invariance", rescaling),
        ("correspondence diagnostics", correspondence),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let (verdict, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{verdict}] {:>2}. {name}: {detail} ({:.1}s)", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
