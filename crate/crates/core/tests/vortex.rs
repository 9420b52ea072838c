use std::f64::consts::PI;

use conevortex::sections::*;
use conevortex::torus::{Backend, TorusGrid};
use conevortex::vortex::*;
use conevortex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(n: usize) -> TorusGrid {
    TorusGrid::unit(n).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn degree_one_vortex_zero_sits_at_the_theta_zero() {
    for n in [64, 128] {
        let sol = tau_vortex_solve(&[c(1.0, 0.0)], 1, 10.0, unit(n)).unwrap();
        let PiOutcome::Divisor(div) = pi_map(&sol.config).unwrap().outcome else { panic!("no divisor") };
        assert_eq!(div.multiplicities, vec![1]);
        let (ox, oy) = DEFAULT_OFFSET;
        let [x, y] = div.points[0];
        // the refined location is far better than one grid spacing
        assert!((x - 0.5 - ox).abs() < 0.05 / n as f64, "{n}: x = {x}");
        assert!((y - 0.5 - oy).abs() < 0.05 / n as f64, "{n}: y = {y}");
    }
}

#[test]
fn rectangular_torus_obeys_the_threshold_law() {
    let g = TorusGrid::new(64, 32, 2.0, 1.0).unwrap();
    let bundle = LineBundle::new(3, g).unwrap();
    for tau in [10.0, 14.0] {
        let sol = tau_vortex_solve_with(&[c(1.0, 0.0), c(0.5, 0.5), c(0.0, -1.0)], bundle, tau, &GaugeFixOptions::default())
            .unwrap();
        let want = predicted_integral(tau, 3, 2.0);
        let got = integral_two_mu(&sol.config).unwrap();
        assert!(((got - want) / want).abs() <= 1e-6, "{got} vs {want}");
    }
    // threshold is 3π on this torus
    let r = tau_vortex_solve_with(&[c(1.0, 0.0); 3], bundle, 3.0 * PI, &GaugeFixOptions::default());
    assert!(matches!(r, Err(VortexError::BelowThreshold { .. })));
}

#[test]
fn mu_is_determined_pointwise_by_the_connection() {
    let g = unit(64);
    let bundle = LineBundle::new(2, g).unwrap();
    let sol = hk_gauge_fix(theta_basis_for(&bundle), background_connection_for(&bundle), 15.0, &GaugeFixOptions::default())
        .unwrap();
    let level = sol.config.a().curvature().map(|k| 15.0 - k);
    assert!(mu_of(sol.config.u()).unwrap().sup_distance(&level) <= 1e-8);
}

#[test]
fn same_orbit_gives_the_same_mu() {
    let g = unit(64);
    let a = tau_vortex_solve(&[c(0.3, 0.4)], 1, 9.0, g).unwrap();
    let b = tau_vortex_solve(&[c(-2.0, 1.0)], 1, 9.0, g).unwrap();
    let (ma, mb) = (mu_of(a.config.u()).unwrap(), mu_of(b.config.u()).unwrap());
    assert!(ma.sup_distance(&mb) <= 1e-8);
    assert!(a.config.a().bx().sup_distance(b.config.a().bx()) <= 1e-8);
}

#[test]
fn gauge_fixing_preserves_holomorphy() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = unit(64);
    for d in 1..=3u32 {
        let bundle = LineBundle::new(d, g).unwrap();
        let coeffs: Vec<Complex64> = (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let sol = tau_vortex_solve(&coeffs, d, 8.0 * d as f64, g).unwrap();
        let _ = bundle;
        let floor = 1e-12 * sol.config.u()[0].values().sup_norm().max(1.0);
        assert!(sol.certificate.dbar_sup <= 10.0 * sol.input_dbar_sup.max(floor), "d = {d}");
    }
}

#[test]
fn pi_map_is_invariant_under_constant_unitary_gauge() {
    let g = unit(64);
    let sol = tau_vortex_solve(&[c(0.9, -0.1), c(0.2, 0.7)], 2, 20.0, g).unwrap();
    let base = pi_map(&sol.config).unwrap();
    for theta in [0.3, 2.0, -1.2] {
        let turned = sol.config.scale_u(Complex64::from_polar(1.0, theta));
        let image = pi_map(&turned).unwrap();
        assert_eq!(image.modulus_sq, base.modulus_sq);
        assert_eq!(image.outcome, base.outcome);
    }
}

#[test]
fn pi_map_degree_matches_the_connection() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = unit(64);
    for _ in 0..5 {
        let coeffs = [c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(-1.0..1.0), 0.3)];
        let sol = tau_vortex_solve(&coeffs, 2, 20.0, g).unwrap();
        let PiOutcome::Divisor(div) = pi_map(&sol.config).unwrap().outcome else { panic!("no divisor") };
        assert_eq!(div.degree as i64, degree(sol.config.a()).unwrap());
        assert_eq!(div.degree, 2);
    }
}

#[test]
fn common_zero_free_pair_has_no_divisor() {
    let g = unit(64);
    let bundle = LineBundle::new(2, g).unwrap();
    let sol = hk_gauge_fix(theta_basis_for(&bundle), background_connection_for(&bundle), 20.0, &GaugeFixOptions::default())
        .unwrap();
    match pi_map(&sol.config).unwrap().outcome {
        PiOutcome::NoDivisor { min_mu, common_degree, degree } => {
            assert!(min_mu > 0.0);
            assert_eq!((common_degree, degree), (0, 2));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn fiber_points_share_the_image() {
    let g = unit(64);
    let sol = tau_vortex_solve(&[c(1.0, 0.0), c(0.0, 1.0)], 2, 20.0, g).unwrap();
    let (phi, a) = (&sol.config.u()[0], sol.config.a());
    let base = pi_map(&sol.config).unwrap();

    let embedded = fiber_point(phi, a, 20.0, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert_eq!(&embedded.config.u()[0], phi);
    assert!(embedded.config.u()[1].values().sup_norm() == 0.0);
    let own = sv_residual(&sol.config);
    assert_eq!(embedded.residual, own);

    let half = phi.pointwise_norm_sq().scale(0.5);
    let samples = fiber_sample(phi, a, 20.0, 3, 4, 99).unwrap();
    for s in &samples {
        assert!(mu_of(s.config.u()).unwrap().sup_distance(&half) <= 1e-12 * half.sup_norm().max(1.0));
        assert!(s.residual.moment_sup <= 1e-8 && s.residual.dbar_sup <= 1e-8);
        let image = pi_map(&s.config).unwrap();
        assert_eq!(image.modulus_sq, base.modulus_sq);
        let PiOutcome::Divisor(div) = image.outcome else { panic!("no divisor") };
        assert_eq!(div.degree, 2);
    }
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            assert!(!real_gauge_related(samples[i].config.u(), samples[j].config.u(), 1e-6));
        }
    }
}

#[test]
fn correspondence_report_on_a_fiber_point() {
    let g = unit(64);
    let sol = tau_vortex_solve(&[c(1.0, 0.0)], 1, 10.0, g).unwrap();
    let (phi, a) = (&sol.config.u()[0], sol.config.a());
    let s = fiber_sample(phi, a, 10.0, 2, 1, 1).unwrap().remove(0);
    let r = correspondence_check(&s.config, phi, a).unwrap();
    assert!(r.mu_vs_phi <= 1e-12 * phi.values().sup_norm().powi(2).max(1.0));
    assert!(r.phi_dbar <= 1e-8);
    assert!(r.mu_vs_curvature <= 1e-8);
    assert!(r.d_mu_identity <= 1e-8, "{}", r.d_mu_identity);
}

#[test]
fn stencil_gauge_fix_is_second_order() {
    let err = |n: usize| {
        let mut opts = GaugeFixOptions::default();
        opts.kw = opts.kw.with_backend(Backend::Stencil);
        let bundle = LineBundle::new(1, unit(n)).unwrap();
        let sol = tau_vortex_solve_with(&[c(1.0, 0.0)], bundle, 10.0, &opts).unwrap();
        assert!(sol.kw.residual_sup <= 1e-9);
        (integral_two_mu(&sol.config).unwrap() - predicted_integral(10.0, 1, 1.0)).abs()
            + sv_residual(&sol.config).moment_sup
    };
    let (a, b) = (err(32), err(64));
    assert!((a / b).log2() >= 1.8, "{a} {b}");
}

mod properties {
    use super::*;
    use conevortex::torus::{laplacian, random_smooth};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn complex_gauge_shifts_curvature_by_laplacian(seed in any::<u64>(), amp in 0.01f64..1.0) {
            let g = unit(32);
            let bundle = LineBundle::new(2, g).unwrap();
            let cfg = Configuration::new(theta_basis_for(&bundle), background_connection_for(&bundle), 12.0).unwrap();
            let f = random_smooth(g, 4, amp, seed);
            let moved = apply_complex_gauge(&f, &cfg).unwrap();
            let gap = moved.a().curvature().sub(&cfg.a().curvature());
            prop_assert!(gap.sup_distance(&laplacian(&f)) <= 1e-10);
            let ratio = mu_of(moved.u()).unwrap().zip_map(&mu_of(cfg.u()).unwrap(), |a, b| if b > 1e-8 { a / b } else { 0.0 });
            let expected = f.map(|v| (2.0 * v).exp());
            for k in 0..g.len() {
                if ratio.values()[k] != 0.0 {
                    prop_assert!((ratio.values()[k] - expected.values()[k]).abs() <= 1e-10 * expected.values()[k]);
                }
            }
        }

        #[test]
        fn unitary_rotation_leaves_pi_bit_identical(theta in -PI..PI) {
            let sol = tau_vortex_solve(&[c(1.0, 0.0)], 1, 10.0, unit(32)).unwrap();
            let base = pi_map(&sol.config).unwrap();
            let turned = pi_map(&sol.config.scale_u(Complex64::from_polar(1.0, theta))).unwrap();
            prop_assert_eq!(turned.modulus_sq, base.modulus_sq);
            prop_assert_eq!(turned.outcome, base.outcome);
        }

        #[test]
        fn threshold_law_holds_above_threshold(excess in 0.2f64..15.0) {
            let tau = 2.0 * PI + excess;
            let sol = tau_vortex_solve(&[c(0.6, 0.8)], 1, tau, unit(64)).unwrap();
            let want = predicted_integral(tau, 1, 1.0);
            prop_assert!(((integral_two_mu(&sol.config).unwrap() - want) / want).abs() <= 1e-6);
        }
    }
}
