//! Discrete vector calculus on the torus.
//!
//! Forward gradient, backward divergence and edge averages follow the usual
//! lattice conventions: `(∇f)_i(x) = f(x+e_i) - f(x)`,
//! `(∇*·g)(x) = Σ_i g_i(x) - g_i(x-e_i)`, `f_e = (f(x)+f(x+e_i))/2`, and the
//! two gradients are adjoint: `⟨∇f, g⟩ = -⟨f, ∇*·g⟩`.
//!
//! `laplacian` and `apply_operator` return the *positive semidefinite* forms
//! `-∇*·∇` and `T⁻¹ - ∇*·(A∇·)`, so `⟨u, Op u⟩ = Σ_e a_e |∇_e u|² (+ T⁻¹‖u‖²)`
//! and the solvers work with definite systems throughout.

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::field::{VectorField, VertexField};
use crate::grid::{Ball, OffsetCache, Torus, MAX_DIM};

/// `(∇f)_i(x) = f(x+e_i) - f(x)` with periodic wrap.
pub fn forward_gradient(torus: &Torus, f: &VertexField) -> VectorField {
    let n = torus.vertex_count();
    let mut out = VectorField::zeros(torus.dim(), n);
    for dir in 0..torus.dim() {
        for x in 0..n {
            out.set(dir, x, f[torus.up(x, dir)] - f[x]);
        }
    }
    out
}

/// `(∇*·g)(x) = Σ_i g_i(x) - g_i(x-e_i)`.
pub fn backward_divergence(torus: &Torus, g: &VectorField) -> VertexField {
    let n = torus.vertex_count();
    let mut out = VertexField::zeros(n);
    for dir in 0..torus.dim() {
        for x in 0..n {
            out[x] += g.at(dir, x) - g.at(dir, torus.down(x, dir));
        }
    }
    out
}

/// Backward partial derivative `(∇*_dir f)(x) = f(x) - f(x-e_dir)`.
pub fn backward_partial(torus: &Torus, f: &VertexField, dir: usize) -> VertexField {
    let n = torus.vertex_count();
    let mut out = VertexField::zeros(n);
    for x in 0..n {
        out[x] = f[x] - f[torus.down(x, dir)];
    }
    out
}

/// Forward partial derivative of one component of a vector field.
pub fn forward_partial_of_component(
    torus: &Torus,
    g: &VectorField,
    component: usize,
    dir: usize,
) -> VertexField {
    let n = torus.vertex_count();
    let mut out = VertexField::zeros(n);
    for x in 0..n {
        out[x] = g.at(component, torus.up(x, dir)) - g.at(component, x);
    }
    out
}

/// Positive lattice Laplacian `-∇*·∇`; `⟨f, laplacian f⟩ = ‖∇f‖²`.
pub fn laplacian(torus: &Torus, f: &VertexField) -> VertexField {
    let mut out = backward_divergence(torus, &forward_gradient(torus, f));
    for v in out.as_mut_slice() {
        *v = -*v;
    }
    out
}

/// Edge average `f_e = (f(x) + f(x+e_dir))/2`.
#[inline]
pub fn edge_average(torus: &Torus, f: &VertexField, dir: usize, vertex: usize) -> f64 {
    0.5 * (f[vertex] + f[torus.up(vertex, dir)])
}

/// Pointwise action of the edge-diagonal conductance matrix on a vector field.
pub fn apply_conductance(env: &Environment, g: &VectorField) -> VectorField {
    let n = g.vertex_count();
    let mut out = g.clone();
    for dir in 0..g.components() {
        for x in 0..n {
            out.set(dir, x, env.conductance(dir, x) * g.at(dir, x));
        }
    }
    out
}

/// The positive weighted operator `u ↦ T⁻¹ u - ∇*·(A ∇u)`; linear in `u`,
/// symmetric, and positive semidefinite (definite when `massive` is set).
pub fn apply_operator(env: &Environment, u: &VertexField, massive: Option<f64>) -> VertexField {
    let torus = env.torus();
    let n = torus.vertex_count();
    let inv_t = massive.map(|t| 1.0 / t).unwrap_or(0.0);
    let mut out = VertexField::zeros(n);
    for x in 0..n {
        let ux = u[x];
        let mut acc = inv_t * ux;
        for dir in 0..torus.dim() {
            let up = torus.up(x, dir);
            let down = torus.down(x, dir);
            acc += env.conductance(dir, x) * (ux - u[up]);
            acc += env.conductance(dir, down) * (ux - u[down]);
        }
        out[x] = acc;
    }
    out
}

/// Sum of conductances incident to each vertex (+ the massive term): the
/// operator diagonal, used as Jacobi preconditioner.
pub fn operator_diagonal(env: &Environment, massive: Option<f64>) -> VertexField {
    let torus = env.torus();
    let n = torus.vertex_count();
    let inv_t = massive.map(|t| 1.0 / t).unwrap_or(0.0);
    let mut out = VertexField::zeros(n);
    for x in 0..n {
        let mut acc = inv_t;
        for dir in 0..torus.dim() {
            acc += env.conductance(dir, x);
            acc += env.conductance(dir, torus.down(x, dir));
        }
        out[x] = acc;
    }
    out
}

/// Exact mean of a vertex field over a ball.
pub fn ball_average_vertex(f: &VertexField, ball: &Ball) -> f64 {
    ball.vertices.iter().map(|&x| f[x]).sum::<f64>() / ball.vertices.len() as f64
}

/// Component-wise mean of a vector field over the vertices of a ball.
pub fn ball_average_vector(g: &VectorField, ball: &Ball) -> [f64; MAX_DIM] {
    let mut out = [0.0; MAX_DIM];
    for dir in 0..g.components() {
        out[dir] = ball.vertices.iter().map(|&x| g.at(dir, x)).sum::<f64>()
            / ball.vertices.len() as f64;
    }
    out
}

/// Mean of edge data (flat layout `dir * L^d + tail`) over the edge-ball.
pub fn ball_average_edges(edge_data: &[f64], ball: &Ball) -> f64 {
    if ball.edges.is_empty() {
        return 0.0;
    }
    ball.edges.iter().map(|&e| edge_data[e]).sum::<f64>() / ball.edges.len() as f64
}

/// Nested average `⨏_{x∈B} ⨏_{B_{r(x)}(x)} F` with a per-vertex radius field.
pub fn inhomogeneous_double_average(
    torus: &Torus,
    f: &VertexField,
    radii: &[f64],
    ball: &Ball,
    cache: &mut OffsetCache,
) -> Result<f64> {
    if radii.len() != torus.vertex_count() {
        return Err(Error::contract(format!(
            "radius field has {} entries, expected {}",
            radii.len(),
            torus.vertex_count()
        )));
    }
    let mut acc = 0.0;
    for &x in &ball.vertices {
        let r = radii[x];
        if !r.is_finite() {
            return Err(Error::geometry(format!("radius at vertex {x} not finite")));
        }
        let offsets = cache.get(torus.dim(), r, torus.side())?;
        let inner = offsets.anchor(torus, x);
        acc += ball_average_vertex(f, &inner);
    }
    Ok(acc / ball.vertices.len() as f64)
}

/// `Σ_e a_e |∇_e u|²` restricted to the vertices of a ball (vertex form:
/// each vertex contributes its d forward edges).
pub fn energy_in_ball(env: &Environment, grad: &VectorField, ball: &Ball) -> f64 {
    let mut acc = 0.0;
    for &x in &ball.vertices {
        for dir in 0..grad.components() {
            let g = grad.at(dir, x);
            acc += env.conductance(dir, x) * g * g;
        }
    }
    acc
}
