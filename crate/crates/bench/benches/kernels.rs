use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use particlegp_bench::cloud;
use particlegp_core::gp::{fit, optimize_hyperparams};
use particlegp_core::numerics::{cholesky_decompose, SpdMatrix};
use particlegp_core::particle_gp::{estimate_gradient, GradientEstimator};
use particlegp_core::{make_benchmark, GpModel, HyperGridSpec, Kernel, ParticleGpConfig, RngStream};

fn inputs(n: usize) -> Vec<f64> {
    let mut rng = RngStream::new(1, 0);
    (0..n).map(|_| 0.1 * rng.standard_normal()).collect()
}

fn cholesky(c: &mut Criterion) {
    let mut g = c.benchmark_group("cholesky");
    for n in [20, 50, 100] {
        let x = inputs(n);
        let m = GpModel::new(x, vec![0.0; n], Kernel::new(0.1, 1.0)).unwrap().with_noise(1e-6);
        let gram: SpdMatrix = m.gram();
        g.bench_with_input(BenchmarkId::from_parameter(n), &gram, |b, k| b.iter(|| cholesky_decompose(black_box(k), 1e-10)));
    }
    g.finish();
}

fn hyper_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("hyperparameter_search");
    for n in [20, 100] {
        let x = inputs(n);
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 0.3 * (20.0 * v).sin()).collect();
        let base = GpModel::new(x, y, Kernel::default()).unwrap();
        for polish in [false, true] {
            let spec = HyperGridSpec { polish, ..Default::default() };
            let grid = spec.resolve(0.1, base.y_train(), 0.0);
            let id = BenchmarkId::new(if polish { "grid+polish" } else { "grid" }, n);
            g.bench_with_input(id, &grid, |b, grid| b.iter(|| optimize_hyperparams(black_box(&base), grid)));
        }
        g.bench_with_input(BenchmarkId::new("single_fit", n), &base, |b, m| b.iter(|| fit(black_box(m.clone()))));
    }
    g.finish();
}

fn gradient_estimate(c: &mut Criterion) {
    let mut g = c.benchmark_group("gradient_estimate");
    let mut obj = make_benchmark("beale").unwrap();
    for n in [20, 100] {
        let cfg = ParticleGpConfig { n_particles: n, ..Default::default() };
        let cl = cloud(&mut obj, &[1.0, 1.0], n, 0.01, 2);
        let rng = RngStream::new(3, 0);
        g.bench_with_input(BenchmarkId::new("full_search", n), &cl, |b, cl| {
            b.iter(|| estimate_gradient(black_box(cl), &[1.0, 1.0], &cfg, &rng))
        });
        let reuse = ParticleGpConfig { hyper_refit_every: usize::MAX, ..cfg.clone() };
        let mut est = GradientEstimator::new(&reuse);
        est.estimate(&cl, &[1.0, 1.0], &rng).unwrap();
        g.bench_with_input(BenchmarkId::new("cached_kernels", n), &cl, |b, cl| {
            b.iter(|| est.estimate(black_box(cl), &[1.0, 1.0], &rng))
        });
    }
    g.finish();
}

criterion_group!(benches, cholesky, hyper_search, gradient_estimate);
criterion_main!(benches);
