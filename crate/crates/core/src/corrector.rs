//! Correctors, fluxes, flux correctors, and the auxiliary fields of the
//! sensitivity calculus.
//!
//! The corrector in direction `i` solves `-∇*·A(∇φ_i + e_i) = 0` on the
//! torus, i.e. `Op φ_i = ∇*·(A e_i)` for the positive operator; the flux is
//! `q_i = A(∇φ_i + e_i)` and the flux corrector entries solve
//! `-Δ σ_{ijk} = ∇_j (q_i)_k - ∇_k (q_i)_j` spectrally, with `Δ` the crate's
//! positive Laplacian. That sign system makes the skew field a true flux
//! potential on the torus: `Σ_j ∇*_j σ_{ijk} = (q_i)_k - ⟨(q_i)_k⟩` up to
//! solver residuals. Whole-space objects are approximated by periodization;
//! box-size sensitivity is an acceptance experiment, not an assumption.

use std::collections::BTreeMap;

use crate::calculus::{
    apply_conductance, backward_divergence, backward_partial, forward_gradient,
    forward_partial_of_component, laplacian,
};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::field::{VectorField, VertexField};
use crate::solver::{solve_poisson_spectral, solve_weighted, SolveReport};

/// One skew component `σ_{ijk}` with `j < k`; the `j > k` entries follow
/// from `σ_{ikj} = -σ_{ijk}` and the diagonal vanishes.
#[derive(Debug, Clone)]
pub struct SigmaComponent {
    pub j: usize,
    pub k: usize,
    pub field: VertexField,
    /// Relative residual of the spectral solve, recomputed from scratch.
    pub residual: f64,
}

/// Corrector data for one direction.
#[derive(Debug, Clone)]
pub struct CorrectorBundle {
    pub direction: usize,
    pub phi: VertexField,
    pub grad_phi: VectorField,
    /// `q_i = A(∇φ_i + e_i)` evaluated edgewise.
    pub flux: VectorField,
    /// Entries `σ_{ijk}` for `j < k`; empty in d=1 and before
    /// [`compute_flux_corrector`] runs.
    pub sigma: Vec<SigmaComponent>,
    pub phi_report: SolveReport,
    pub tolerance: f64,
}

impl CorrectorBundle {
    /// Reconstruct `σ_{ijk}` for arbitrary `j, k` from the stored `j < k`
    /// components (skew symmetry).
    pub fn sigma_entry(&self, j: usize, k: usize) -> Option<VertexField> {
        if j == k {
            return Some(VertexField::zeros(self.phi.len()));
        }
        let (lo, hi, sign) = if j < k { (j, k, 1.0) } else { (k, j, -1.0) };
        self.sigma
            .iter()
            .find(|s| s.j == lo && s.k == hi)
            .map(|s| s.field.scaled(sign))
    }

    /// Torus average of the flux component along the bundle direction (the
    /// effective conductance of the periodized cell problem).
    pub fn effective_flux(&self) -> f64 {
        let n = self.flux.vertex_count();
        self.flux.component(self.direction).iter().sum::<f64>() / n as f64
    }
}

/// Right-hand side `∇*·(A e_i)` of the corrector equation.
pub fn corrector_rhs(env: &Environment, direction: usize) -> VertexField {
    let torus = env.torus();
    let n = torus.vertex_count();
    let mut h = VectorField::zeros(torus.dim(), n);
    for x in 0..n {
        h.set(direction, x, env.conductance(direction, x));
    }
    backward_divergence(torus, &h)
}

/// Solve the corrector equation in direction `i` and evaluate the flux.
pub fn compute_corrector(env: &Environment, direction: usize, tol: f64) -> Result<CorrectorBundle> {
    let torus = env.torus();
    if direction >= torus.dim() {
        return Err(Error::config(format!(
            "direction {direction} out of range for d={}",
            torus.dim()
        )));
    }
    let rhs = corrector_rhs(env, direction);
    let (phi, phi_report) = solve_weighted(env, &rhs, tol, None)?;
    let grad_phi = forward_gradient(torus, &phi);
    let mut affine = grad_phi.clone();
    let n = torus.vertex_count();
    for x in 0..n {
        affine.set(direction, x, affine.at(direction, x) + 1.0);
    }
    let flux = apply_conductance(env, &affine);
    Ok(CorrectorBundle {
        direction,
        phi,
        grad_phi,
        flux,
        sigma: Vec::new(),
        phi_report,
        tolerance: tol,
    })
}

/// Solve the flux-corrector equations for every pair `j < k` and attach the
/// components to the bundle. In d=1 the flux corrector vanishes identically
/// and the list stays empty.
pub fn compute_flux_corrector(env: &Environment, bundle: &mut CorrectorBundle) -> Result<()> {
    let torus = env.torus();
    bundle.sigma.clear();
    if torus.dim() < 2 {
        return Ok(());
    }
    for j in 0..torus.dim() {
        for k in (j + 1)..torus.dim() {
            // -Δ σ_{ijk} = ∇_j (q_i)_k - ∇_k (q_i)_j with positive Δ, so the
            // spectral solve takes the rhs ∇_k (q_i)_j - ∇_j (q_i)_k
            let mut rhs = forward_partial_of_component(torus, &bundle.flux, j, k);
            let other = forward_partial_of_component(torus, &bundle.flux, k, j);
            for x in 0..rhs.len() {
                rhs[x] -= other[x];
            }
            let field = solve_poisson_spectral(torus, &rhs)?;
            let check = laplacian(torus, &field);
            let residual = check.sub(&rhs).l2_norm() / rhs.l2_norm().max(1e-300);
            bundle.sigma.push(SigmaComponent {
                j,
                k,
                field,
                residual,
            });
        }
    }
    Ok(())
}

/// `(∇*·σ_i)_k = Σ_j ∇*_j σ_{ijk}` as a vector field; numerically this
/// matches `q_i - ⟨q_i⟩` componentwise once both solves are converged.
pub fn sigma_divergence(env: &Environment, bundle: &CorrectorBundle) -> VectorField {
    let torus = env.torus();
    let n = torus.vertex_count();
    let d = torus.dim();
    let mut out = VectorField::zeros(d, n);
    for k in 0..d {
        for j in 0..d {
            if j == k {
                continue;
            }
            if let Some(sigma) = bundle.sigma_entry(j, k) {
                let part = backward_partial(torus, &sigma, j);
                for x in 0..n {
                    out.set(k, x, out.at(k, x) + part[x]);
                }
            }
        }
    }
    out
}

/// Massive corrector: `(T⁻¹ - ∇*·A∇) φ_T = ∇*·(A e_i)`. The zero-order term
/// pins the mean, so no gauge fix is applied.
pub fn compute_massive_corrector(
    env: &Environment,
    direction: usize,
    t: f64,
    tol: f64,
) -> Result<(VertexField, SolveReport)> {
    if !(t > 0.0) {
        return Err(Error::config(format!("massive parameter T = {t} must be > 0")));
    }
    if direction >= env.torus().dim() {
        return Err(Error::config(format!(
            "direction {direction} out of range for d={}",
            env.torus().dim()
        )));
    }
    let rhs = corrector_rhs(env, direction);
    solve_weighted(env, &rhs, tol, Some(t))
}

/// Which auxiliary field to solve next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxWhich {
    /// `-∇*·A∇u = ∇*·g`
    U,
    /// `-Δ v = ∇*·g`
    V,
    /// `-∇*·A∇ w_{jk} = ∇*·A(∇*_k v e_j - ∇*_j v e_k)`; requires `V` first.
    W { j: usize, k: usize },
}

/// Auxiliary fields driven by a test field `g`, built incrementally.
#[derive(Debug, Clone)]
pub struct AuxFields {
    pub g: VectorField,
    pub u: Option<(VertexField, SolveReport)>,
    pub v: Option<VertexField>,
    pub w: BTreeMap<(usize, usize), (VertexField, SolveReport)>,
}

impl AuxFields {
    pub fn new(g: VectorField) -> Self {
        AuxFields {
            g,
            u: None,
            v: None,
            w: BTreeMap::new(),
        }
    }
}

pub fn solve_aux(env: &Environment, aux: &mut AuxFields, which: AuxWhich, tol: f64) -> Result<()> {
    let torus = env.torus();
    match which {
        AuxWhich::U => {
            let rhs = backward_divergence(torus, &aux.g);
            aux.u = Some(solve_weighted(env, &rhs, tol, None)?);
        }
        AuxWhich::V => {
            let rhs = backward_divergence(torus, &aux.g);
            aux.v = Some(solve_poisson_spectral(torus, &rhs)?);
        }
        AuxWhich::W { j, k } => {
            let d = torus.dim();
            if j >= d || k >= d || j == k {
                return Err(Error::config(format!("invalid pair (j,k)=({j},{k}) for d={d}")));
            }
            let v = aux
                .v
                .as_ref()
                .ok_or_else(|| Error::contract("w requested before v was solved"))?;
            let n = torus.vertex_count();
            let dkv = backward_partial(torus, v, k);
            let djv = backward_partial(torus, v, j);
            let mut h = VectorField::zeros(d, n);
            for x in 0..n {
                h.set(j, x, env.conductance(j, x) * dkv[x]);
                h.set(k, x, -env.conductance(k, x) * djv[x]);
            }
            let rhs = backward_divergence(torus, &h);
            aux.w.insert((j, k), solve_weighted(env, &rhs, tol, None)?);
        }
    }
    Ok(())
}

/// Closed-form 1D corrector gradient on the torus:
/// `∇φ = (⨏ a⁻¹)⁻¹ a⁻¹ - 1` edgewise (the periodized form of the
/// whole-line formula, the expectation replaced by the box average).
pub fn one_dimensional_gradient(env: &Environment) -> Result<VectorField> {
    let torus = env.torus();
    if torus.dim() != 1 {
        return Err(Error::contract("closed form only available in d=1"));
    }
    let n = torus.vertex_count();
    let harm: f64 = env.edges().iter().map(|a| 1.0 / a).sum::<f64>() / n as f64;
    let qbar = 1.0 / harm;
    let mut g = VectorField::zeros(1, n);
    for x in 0..n {
        g.set(0, x, qbar / env.conductance(0, x) - 1.0);
    }
    Ok(g)
}
