//! Solver benchmarks: weighted CG across conductance laws and the spectral
//! Poisson solve. CG iteration counts on degenerate laws are themselves a
//! tracked observable, so regressions here are meaningful.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use rcmlab_core::corrector::corrector_rhs;
use rcmlab_core::env::{Distribution, Environment, EnvironmentSpec};
use rcmlab_core::field::VertexField;
use rcmlab_core::grid::Torus;
use rcmlab_core::solver::{solve_poisson_spectral, solve_weighted};

fn environment(dist: Distribution, seed: u64) -> Environment {
    Environment::sample(&EnvironmentSpec::new(2, 64, dist, seed)).unwrap()
}

fn bench_weighted_cg(c: &mut Criterion) {
    let mut group = c.benchmark_group("weighted_cg_d2_l64");
    group.sample_size(10);
    for (name, dist) in [
        ("uniform", Distribution::Uniform { lambda: 0.5 }),
        ("pareto8", Distribution::ParetoSymmetric { gamma_star: 8.0 }),
    ] {
        let env = environment(dist, 42);
        let rhs = corrector_rhs(&env, 0);
        group.bench_function(name, |b| {
            b.iter_batched(
                || rhs.clone(),
                |rhs| solve_weighted(&env, &rhs, 1e-6, None).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn bench_spectral_poisson(c: &mut Criterion) {
    let torus = Torus::new(2, 128).unwrap();
    let n = torus.vertex_count();
    let mut rhs = VertexField::zeros(n);
    rhs[1] = 1.0;
    rhs[n / 2] = -1.0;
    c.bench_function("spectral_poisson_d2_l128", |b| {
        b.iter(|| solve_poisson_spectral(&torus, &rhs).unwrap())
    });
}

criterion_group!(benches, bench_weighted_cg, bench_spectral_poisson);
criterion_main!(benches);
