//! Parallel vs sequential throughput of the sweep-heavy paths.
//!
//! The library routes bulk work through `par::map_*`, which is rayon when
//! the `parallel` feature is on and a plain iterator otherwise. The
//! feature cannot be toggled at runtime, so each benchmark pairs the
//! library path (as built) with an explicit sequential loop doing the
//! same work; building with `--no-default-features` makes the two sides
//! coincide and measures the fallback's overhead.

use criterion::{criterion_group, criterion_main, Criterion};
use kerr_rkg::discretization::{assemble, Grid};
use kerr_rkg::geometry::{
    connection_identity_residual, positivity_identity_residual, special_s, KerrParams, ModeSpec,
    Point,
};
use std::hint::black_box;

fn lattice(p: &KerrParams, nr: usize, ntheta: usize) -> Vec<Point> {
    let mut points = Vec::with_capacity(nr * ntheta);
    for i in 0..nr {
        let r = p.r_plus + 1e-3 + 19.0 * (i as f64 + 0.5) / nr as f64;
        for j in 0..ntheta {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / ntheta as f64;
            points.push(Point::new(p, r, theta).unwrap());
        }
    }
    points
}

fn identity_residual(p: &KerrParams, mode: &ModeSpec, s: f64, q: &Point) -> f64 {
    positivity_identity_residual(p, mode.m, q).abs()
        + connection_identity_residual(p, mode, s, q).abs()
}

fn bench_identity_sweep(c: &mut Criterion) {
    let p = KerrParams::new(1.0, 0.9).unwrap();
    let mode = ModeSpec::new(2, 0.3).unwrap();
    let s = special_s(&p);
    let points = lattice(&p, 200, 120);

    let mut group = c.benchmark_group("identity_sweep");
    group.bench_function("library", |b| {
        b.iter(|| {
            let res = kerr_rkg::par::map_slice(black_box(&points), |q| {
                identity_residual(&p, &mode, s, q)
            });
            black_box(res)
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let res: Vec<f64> = black_box(&points)
                .iter()
                .map(|q| identity_residual(&p, &mode, s, q))
                .collect();
            black_box(res)
        })
    });
    group.finish();
}

fn bench_assembly(c: &mut Criterion) {
    let p = KerrParams::new(1.0, 0.5).unwrap();
    let mode = ModeSpec::new(1, 0.2).unwrap();
    let grid = Grid::new(&p, 1e-3, 20.0, 80, 40).unwrap();

    let mut group = c.benchmark_group("assembly_80x40");
    group.sample_size(20);
    group.bench_function("library", |b| {
        b.iter(|| black_box(assemble(&p, &mode, &grid).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_identity_sweep, bench_assembly);
criterion_main!(benches);
