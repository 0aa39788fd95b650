//! Length-scale benchmarks: the dyadic band scan + inf-convolution of the
//! effective-ellipticity field, and the gridded maximal function.

use criterion::{criterion_group, criterion_main, Criterion};

use rcmlab_core::env::{Distribution, Environment, EnvironmentSpec};
use rcmlab_core::field::VertexField;
use rcmlab_core::grid::Torus;
use rcmlab_core::scales::{compute_r_diamond, diamond_check_constant, maximal_function};

fn bench_r_diamond(c: &mut Criterion) {
    let mut group = c.benchmark_group("r_diamond_d2");
    group.sample_size(10);
    for l in [32usize, 64] {
        let spec = EnvironmentSpec::new(
            2,
            l,
            Distribution::ParetoSymmetric { gamma_star: 8.0 },
            7,
        );
        let env = Environment::sample(&spec).unwrap();
        group.bench_function(format!("l{l}"), |b| {
            b.iter(|| compute_r_diamond(&env, diamond_check_constant(2)).unwrap())
        });
    }
    group.finish();
}

fn bench_maximal_function(c: &mut Criterion) {
    let torus = Torus::new(2, 64).unwrap();
    let spec = EnvironmentSpec::new(2, 64, Distribution::Lognormal { sigma: 1.0 }, 3);
    let env = Environment::sample(&spec).unwrap();
    let g = VertexField::from_vec(env.edges()[..torus.vertex_count()].to_vec());
    c.bench_function("maximal_function_d2_l64", |b| {
        b.iter(|| maximal_function(&torus, &g, 1.0).unwrap())
    });
}

criterion_group!(benches, bench_r_diamond, bench_maximal_function);
criterion_main!(benches);
