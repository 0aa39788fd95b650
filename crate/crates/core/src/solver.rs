//! Linear solvers: Jacobi-preconditioned conjugate gradient for the weighted
//! operator `T⁻¹ - ∇*·A∇` and an exact spectral solver for the
//! constant-coefficient Poisson problem.
//!
//! Jacobi over multigrid is deliberate: the conductance ratios of degenerate
//! environments destroy standard smoothers, and the CG iteration count is
//! itself a reported observable.

use rustfft::num_complex::Complex64;
use serde::Serialize;
use std::time::Instant;

use crate::calculus::{apply_operator, operator_diagonal};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::fft::BoxFft;
use crate::field::VertexField;
use crate::grid::Torus;

/// CG restarts recompute the true residual and re-project the gauge every
/// this many iterations, capping rounding drift.
const RESTART_EVERY: usize = 500;

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative residual recomputed from scratch, not the CG recurrence.
    pub final_residual: f64,
    pub tolerance: f64,
    pub wall_seconds: f64,
}

fn matvec(env: &Environment, massive: Option<f64>, u: &VertexField) -> VertexField {
    apply_operator(env, u, massive)
}

fn true_residual(
    env: &Environment,
    massive: Option<f64>,
    x: &VertexField,
    b: &VertexField,
) -> VertexField {
    let ax = matvec(env, massive, x);
    let mut r = b.clone();
    for i in 0..r.len() {
        r[i] -= ax[i];
    }
    r
}

/// Solve `(T⁻¹ - ∇*·A∇) u = rhs` by preconditioned CG.
///
/// Without the massive term the operator is singular on constants; the
/// right-hand side must be compatible (`Σ rhs ≈ 0`, automatic for divergence
/// forms on the torus) and the returned solution carries the mean-zero gauge.
pub fn solve_weighted(
    env: &Environment,
    rhs: &VertexField,
    tol: f64,
    massive: Option<f64>,
) -> Result<(VertexField, SolveReport)> {
    let start = Instant::now();
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::config(format!("solver tolerance {tol} not in (0,1)")));
    }
    if let Some(t) = massive {
        if !(t > 0.0) {
            return Err(Error::config(format!("massive parameter T = {t} must be > 0")));
        }
    }
    let n = env.torus().vertex_count();
    if rhs.len() != n {
        return Err(Error::contract(format!(
            "rhs has {} entries, expected {n}",
            rhs.len()
        )));
    }
    let b_norm = rhs.l2_norm();
    let massless = massive.is_none();
    if massless {
        let budget = 1e-12 * b_norm * (n as f64).sqrt();
        if rhs.sum().abs() > budget.max(1e-300) {
            return Err(Error::contract(format!(
                "incompatible rhs on the torus: |Σ rhs| = {:.3e} exceeds {:.3e}",
                rhs.sum().abs(),
                budget
            )));
        }
    }
    if b_norm == 0.0 {
        return Ok((
            VertexField::zeros(n),
            SolveReport {
                iterations: 0,
                final_residual: 0.0,
                tolerance: tol,
                wall_seconds: start.elapsed().as_secs_f64(),
            },
        ));
    }

    let diag = operator_diagonal(env, massive);
    let (dmin, dmax) = diag
        .as_slice()
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let cond_estimate = dmax / dmin;
    let max_iterations = (50.0 * (n as f64).sqrt() * cond_estimate).min(1e9) as usize;

    let mut x = VertexField::zeros(n);
    let mut r = rhs.clone();
    let precond = |r: &VertexField| {
        let mut z = r.clone();
        for i in 0..n {
            z[i] /= diag[i];
        }
        z
    };
    let mut z = precond(&r);
    if massless {
        z.project_mean_zero();
    }
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let mut iterations = 0usize;

    loop {
        // restart block
        let mut converged = false;
        for _ in 0..RESTART_EVERY {
            if iterations >= max_iterations {
                let res = true_residual(env, massive, &x, rhs).l2_norm() / b_norm;
                return Err(Error::Convergence {
                    report: SolveReport {
                        iterations,
                        final_residual: res,
                        tolerance: tol,
                        wall_seconds: start.elapsed().as_secs_f64(),
                    },
                });
            }
            let ap = matvec(env, massive, &p);
            let pap = p.dot(&ap);
            if pap <= 0.0 {
                break; // numerically exhausted search direction; restart
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            if r.l2_norm() / b_norm <= 0.5 * tol {
                converged = true;
                break;
            }
            let z_new = {
                let mut z = precond(&r);
                if massless {
                    z.project_mean_zero();
                }
                z
            };
            let rz_new = r.dot(&z_new);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z_new[i] + beta * p[i];
            }
            z = z_new;
            let _ = &z;
        }

        // recompute the residual from scratch; the recurrence drifts
        if massless {
            x.project_mean_zero();
        }
        r = true_residual(env, massive, &x, rhs);
        let rel = r.l2_norm() / b_norm;
        if rel <= tol && converged {
            return Ok((
                x,
                SolveReport {
                    iterations,
                    final_residual: rel,
                    tolerance: tol,
                    wall_seconds: start.elapsed().as_secs_f64(),
                },
            ));
        }
        if rel <= tol {
            // converged exactly at a restart boundary
            return Ok((
                x,
                SolveReport {
                    iterations,
                    final_residual: rel,
                    tolerance: tol,
                    wall_seconds: start.elapsed().as_secs_f64(),
                },
            ));
        }
        // restart CG from the true residual
        z = precond(&r);
        if massless {
            z.project_mean_zero();
        }
        p = z.clone();
        rz = r.dot(&z);
    }
}

/// Lattice symbol of the positive Laplacian: `λ(k) = Σ_i (2 - 2cos(2π k_i / L))`.
fn symbol(torus: &Torus, idx: usize) -> f64 {
    let l = torus.side() as f64;
    let mut acc = 0.0;
    for dir in 0..torus.dim() {
        let k = torus.coord(idx, dir) as f64;
        acc += 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k / l).cos();
    }
    acc
}

/// Exact (up to floating point) mean-zero solution of `Δ u = rhs` on the
/// torus, `Δ` the positive Laplacian of [`crate::calculus::laplacian`], via
/// the discrete Fourier transform; the zero mode is set to zero.
pub fn solve_poisson_spectral(torus: &Torus, rhs: &VertexField) -> Result<VertexField> {
    let n = torus.vertex_count();
    if rhs.len() != n {
        return Err(Error::contract(format!(
            "rhs has {} entries, expected {n}",
            rhs.len()
        )));
    }
    let b_norm = rhs.l2_norm();
    let budget = (1e-12 * b_norm * (n as f64).sqrt()).max(1e-300);
    if rhs.sum().abs() > budget {
        return Err(Error::contract(format!(
            "spectral Poisson rhs has nonzero mean: |Σ rhs| = {:.3e}",
            rhs.sum().abs()
        )));
    }
    if b_norm == 0.0 {
        return Ok(VertexField::zeros(n));
    }
    let fft = BoxFft::new(torus);
    let mut data: Vec<Complex64> = rhs
        .as_slice()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft.forward(&mut data);
    data[0] = Complex64::default();
    for (idx, v) in data.iter_mut().enumerate().skip(1) {
        *v /= symbol(torus, idx);
    }
    fft.inverse(&mut data);
    Ok(VertexField::from_vec(data.into_iter().map(|c| c.re).collect()))
}
