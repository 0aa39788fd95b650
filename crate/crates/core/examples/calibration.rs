//! Prints the realized maxima behind the frozen probe constants.

use rcmlab_core::corrector::compute_corrector;
use rcmlab_core::env::{Distribution, Environment, EnvironmentSpec};
use rcmlab_core::field::{VectorField, VertexField};
use rcmlab_core::green::green_difference;
use rcmlab_core::grid::Torus;
use rcmlab_core::rng::{self, Purpose};
use rcmlab_core::scales::check_caccioppoli;
use rcmlab_core::stats::avg_sobolev_probe;
use rand::Rng;

fn main() {
    // Caccioppoli over constant-env Green kernels (d = 2, 3) ...
    let mut worst_cacc = 0.0f64;
    for (d, l) in [(2usize, 64usize), (3, 32)] {
        let spec = EnvironmentSpec::new(d, l, Distribution::Constant { value: 1.0 }, 0);
        let env = Environment::sample(&spec).unwrap();
        let t = env.torus().clone();
        let gd = green_difference(&t, t.index(&[2, 0, 0])).unwrap();
        let far = t.index(&[(l / 2) as i64, (l / 2) as i64, 0]);
        let f = VectorField::zeros(d, t.vertex_count());
        for r in [2.0, 4.0, 8.0] {
            if 2.0 * r < l as f64 / 2.0 {
                let rep = check_caccioppoli(&env, &gd.field, &f, far, r).unwrap();
                worst_cacc = worst_cacc.max(rep.ratio);
            }
        }
    }
    // ... and over mixed-law correctors (d = 1, 2, 3)
    for (d, l, dist, seeds) in [
        (1usize, 64usize, Distribution::Bernoulli { p: 0.5, lo: 1.0, hi: 2.0 }, 12u64),
        (2, 32, Distribution::ParetoSymmetric { gamma_star: 8.0 }, 12),
        (2, 32, Distribution::Lognormal { sigma: 1.0 }, 12),
        (3, 16, Distribution::Uniform { lambda: 0.25 }, 8),
    ] {
        for seed in 0..seeds {
            let spec = EnvironmentSpec::new(d, l, dist.clone(), seed);
            let env = Environment::sample(&spec).unwrap();
            let bundle = compute_corrector(&env, 0, 1e-10).unwrap();
            let n = env.torus().vertex_count();
            let mut f = VectorField::zeros(d, n);
            for x in 0..n {
                f.set(0, x, env.conductance(0, x));
            }
            for center in [0usize, n / 3] {
                for r in [2.0, 4.0] {
                    if 4.0 * r < l as f64 {
                        let rep = check_caccioppoli(&env, &bundle.phi, &f, center, r).unwrap();
                        worst_cacc = worst_cacc.max(rep.ratio);
                    }
                }
            }
        }
    }
    println!("caccioppoli realized max: {worst_cacc:.4}");

    // averaged Sobolev over random fields and correctors
    let mut worst_sob = 0.0f64;
    let torus = Torus::new(2, 64).unwrap();
    let n = torus.vertex_count();
    for seed in 0..100u64 {
        let mut r = rng::stream(seed, Purpose::Draw, 8);
        let psi = VertexField::from_vec((0..n).map(|_| r.gen::<f64>() - 0.5).collect());
        for (s_out, s_in, mu) in [(3.0, 1.5, 0.5), (3.0, 1.5, 0.25), (2.5, 1.5, 0.5)] {
            let rep = avg_sobolev_probe(&torus, &psi, 8.0, mu, s_out, s_in).unwrap();
            worst_sob = worst_sob.max(rep.constant);
        }
    }
    for seed in 0..40u64 {
        let spec = EnvironmentSpec::new(2, 64, Distribution::ParetoSymmetric { gamma_star: 8.0 }, seed);
        let env = Environment::sample(&spec).unwrap();
        let bundle = compute_corrector(&env, 0, 1e-8).unwrap();
        let rep = avg_sobolev_probe(env.torus(), &bundle.phi, 8.0, 0.5, 3.0, 1.5).unwrap();
        worst_sob = worst_sob.max(rep.constant);
    }
    println!("avg-sobolev realized max: {worst_sob:.4}");

    // Gehring scan constants on the reverse-Hölder pipeline
    let mut worst_k = 0.0f64;
    for seed in [5u64, 313, 999] {
        let spec = EnvironmentSpec::new(
            2,
            64,
            Distribution::Bernoulli { p: 0.5, lo: 1.0, hi: 2.0 },
            seed,
        );
        let env = Environment::sample(&spec).unwrap();
        let rd = rcmlab_core::scales::compute_r_diamond(
            &env,
            rcmlab_core::scales::diamond_check_constant(2),
        )
        .unwrap();
        let bundle = compute_corrector(&env, 0, 1e-10).unwrap();
        let n = env.torus().vertex_count();
        let mut f = VectorField::zeros(2, n);
        for x in 0..n {
            f.set(0, x, env.conductance(0, x));
        }
        let (u, v, s) = rcmlab_core::scales::meyers_fields(&env, &bundle.grad_phi, &f, &rd).unwrap();
        let rep = rcmlab_core::scales::gehring_probe(env.torus(), &u, &v, 1.0 / s).unwrap();
        for &(_, k) in &rep.scan {
            worst_k = worst_k.max(k);
        }
    }
    println!("gehring pipeline realized max constant: {worst_k:.4}");
}
