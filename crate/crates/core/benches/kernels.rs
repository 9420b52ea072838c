//! Parallel versus sequential execution of the hot kernels.
//!
//! `cargo bench -p conevortex` runs both paths in one binary via
//! `exec::set_parallel`; `--no-default-features` compiles rayon out.

use std::f64::consts::PI;
use std::hint::black_box;

use conevortex::exec;
use conevortex::kazdan_warner::{kw_solve, KwProblem};
use conevortex::sections::{plaquette_windings, theta_combination, LineBundle};
use conevortex::torus::{laplacian, random_smooth, RealField, TorusGrid};
use conevortex::vortex::tau_vortex_solve;
use conevortex::Complex64;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, bool); 2] = [("parallel", true), ("sequential", false)];

fn laplacian_bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplacian");
    for n in [128, 512] {
        let f = random_smooth(TorusGrid::unit(n).unwrap(), 8, 1.0, 1);
        for (mode, on) in MODES {
            exec::set_parallel(on);
            group.bench_with_input(BenchmarkId::new(mode, n), &f, |b, f| b.iter(|| laplacian(black_box(f))));
        }
    }
    exec::set_parallel(true);
    group.finish();
}

fn kw_bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("kw_solve");
    group.sample_size(10);
    let g = TorusGrid::unit(128).unwrap();
    let fstar = RealField::from_fn(g, |x, y| 0.3 * (2.0 * PI * x).cos() * (2.0 * PI * y).sin());
    let b = RealField::from_fn(g, |_, y| 1.0 + 0.5 * (2.0 * PI * y).cos());
    let w = fstar.scale(8.0 * PI * PI).add(&b.zip_map(&fstar, |b, f| b * (2.0 * f).exp()));
    let p = KwProblem::new(b, w).unwrap();
    for (mode, on) in MODES {
        exec::set_parallel(on);
        group.bench_function(BenchmarkId::new(mode, 128), |bch| bch.iter(|| kw_solve(black_box(&p), 1e-10, 50).unwrap()));
    }
    exec::set_parallel(true);
    group.finish();
}

fn sections_bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("sections");
    let bundle = LineBundle::new(3, TorusGrid::unit(256).unwrap()).unwrap();
    let coeffs = [Complex64::new(1.0, 0.2), Complex64::new(-0.3, 0.8), Complex64::new(0.5, -0.5)];
    let s = theta_combination(&bundle, &coeffs).unwrap();
    for (mode, on) in MODES {
        exec::set_parallel(on);
        group.bench_function(BenchmarkId::new(format!("theta/{mode}"), 256), |b| {
            b.iter(|| theta_combination(black_box(&bundle), &coeffs).unwrap())
        });
        group.bench_function(BenchmarkId::new(format!("windings/{mode}"), 256), |b| {
            b.iter(|| plaquette_windings(black_box(&s)).unwrap())
        });
    }
    exec::set_parallel(true);
    group.finish();
}

fn vortex_bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("tau_vortex");
    group.sample_size(10);
    let g = TorusGrid::unit(128).unwrap();
    for (mode, on) in MODES {
        exec::set_parallel(on);
        group.bench_function(BenchmarkId::new(mode, 128), |b| {
            b.iter(|| tau_vortex_solve(&[Complex64::new(1.0, 0.0)], 1, 10.0, g).unwrap())
        });
    }
    exec::set_parallel(true);
    group.finish();
}

criterion_group!(benches, laplacian_bench, kw_bench, sections_bench, vortex_bench);
criterion_main!(benches);
