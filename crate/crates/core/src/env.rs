//! Conductance environments: i.i.d. positive weights on the oriented edges
//! of the periodic box, with controllable tail behaviour.
//!
//! Each distribution documents its density and carries closed forms for
//! `E[a^g]` (also for the truncated variant `(a ∧ M) ∨ M⁻¹`), so moment
//! targets used by the length-scale fields never rely on Monte Carlo.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::grid::Torus;
use crate::rng::{self, Purpose};

/// Edge-conductance law. All laws produce strictly positive values.
///
/// `pareto_symmetric(gamma_star)` draws `a = U^{-1/γ*}` with probability 1/2
/// and its reciprocal otherwise: density `(γ*/2) t^{γ*-1}` on (0,1) and
/// `(γ*/2) t^{-γ*-1}` on [1,∞). Both `a` and `a⁻¹` then have finite moments
/// of order `g` exactly when `|g| < γ*`, which makes the tail index a dial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Distribution {
    Constant { value: f64 },
    Uniform { lambda: f64 },
    Bernoulli { p: f64, lo: f64, hi: f64 },
    ParetoSymmetric { gamma_star: f64 },
    Lognormal { sigma: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Constant { value } => {
                if value <= 0.0 || !value.is_finite() {
                    return Err(Error::config(format!("constant value {value} must be > 0")));
                }
            }
            Distribution::Uniform { lambda } => {
                if !(lambda > 0.0 && lambda <= 1.0) {
                    return Err(Error::config(format!(
                        "uniform lower bound lambda {lambda} must lie in (0, 1]"
                    )));
                }
            }
            Distribution::Bernoulli { p, lo, hi } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::config(format!("bernoulli p {p} must lie in [0,1]")));
                }
                if lo <= 0.0 || hi < lo {
                    return Err(Error::config(format!(
                        "bernoulli values must satisfy 0 < lo <= hi, got lo={lo}, hi={hi}"
                    )));
                }
            }
            Distribution::ParetoSymmetric { gamma_star } => {
                if gamma_star <= 0.0 || !gamma_star.is_finite() {
                    return Err(Error::config(format!(
                        "pareto-symmetric tail index {gamma_star} must be > 0"
                    )));
                }
            }
            Distribution::Lognormal { sigma } => {
                if sigma < 0.0 || !sigma.is_finite() {
                    return Err(Error::config(format!("lognormal sigma {sigma} must be >= 0")));
                }
            }
        }
        Ok(())
    }

    /// Binary-format tag.
    pub fn tag(&self) -> u16 {
        match self {
            Distribution::Constant { .. } => 1,
            Distribution::Uniform { .. } => 2,
            Distribution::Bernoulli { .. } => 3,
            Distribution::ParetoSymmetric { .. } => 4,
            Distribution::Lognormal { .. } => 5,
        }
    }

    /// Largest `g` with `E[a^g] < ∞` (and by symmetry `E[a^{ -g }] < ∞`),
    /// when finite.
    pub fn tail_index(&self) -> Option<f64> {
        match self {
            Distribution::ParetoSymmetric { gamma_star } => Some(*gamma_star),
            _ => None,
        }
    }

    /// Quantile transform; `u` must lie in the open interval (0,1).
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Distribution::Constant { value } => value,
            Distribution::Uniform { lambda } => lambda + (1.0 - lambda) * u,
            Distribution::Bernoulli { p, lo, hi } => {
                if u < 1.0 - p {
                    lo
                } else {
                    hi
                }
            }
            Distribution::ParetoSymmetric { gamma_star } => {
                if u < 0.5 {
                    // lower branch: a in (0,1], P(a <= t) = t^γ*/2
                    (2.0 * u).powf(1.0 / gamma_star)
                } else {
                    // upper branch: a in [1,∞), P(a > t) = t^{-γ*}/2
                    (2.0 * (1.0 - u)).powf(-1.0 / gamma_star)
                }
            }
            Distribution::Lognormal { sigma } => {
                let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(u);
                (sigma * z).exp()
            }
        }
    }

    pub fn draw(&self, rng: &mut impl Rng) -> f64 {
        self.quantile(rng::open_unit(rng))
    }

    /// `E[a^g]`, or `None` when the moment is infinite.
    pub fn moment(&self, g: f64) -> Option<f64> {
        match *self {
            Distribution::Constant { value } => Some(value.powf(g)),
            Distribution::Uniform { lambda } => {
                if lambda == 1.0 {
                    return Some(1.0);
                }
                Some(power_integral(lambda, 1.0, g) / (1.0 - lambda))
            }
            Distribution::Bernoulli { p, lo, hi } => {
                Some((1.0 - p) * lo.powf(g) + p * hi.powf(g))
            }
            Distribution::ParetoSymmetric { gamma_star } => {
                if g.abs() >= gamma_star {
                    None
                } else {
                    Some(gamma_star * gamma_star / (gamma_star * gamma_star - g * g))
                }
            }
            Distribution::Lognormal { sigma } => Some((0.5 * g * g * sigma * sigma).exp()),
        }
    }

    /// `E[((a ∧ M) ∨ M⁻¹)^g]`; always finite for `M >= 1`.
    pub fn moment_truncated(&self, g: f64, m: f64) -> f64 {
        let (lo, hi) = (1.0 / m, m);
        let clamp = |t: f64| t.clamp(lo, hi);
        match *self {
            Distribution::Constant { value } => clamp(value).powf(g),
            Distribution::Bernoulli { p, lo: a, hi: b } => {
                (1.0 - p) * clamp(a).powf(g) + p * clamp(b).powf(g)
            }
            Distribution::Uniform { lambda } => {
                if lambda == 1.0 {
                    return 1.0;
                }
                // support [λ,1]; only the lower clamp can bite
                let cut = lo.clamp(lambda, 1.0);
                let mass_below = (cut - lambda) / (1.0 - lambda);
                mass_below * lo.powf(g) + power_integral(cut, 1.0, g) / (1.0 - lambda)
            }
            Distribution::ParetoSymmetric { gamma_star } => {
                let gs = gamma_star;
                // P(a <= lo) = lo^γ*/2,  P(a >= hi) = hi^{-γ*}/2 (lo <= 1 <= hi)
                let mass_lo = 0.5 * lo.powf(gs);
                let mass_hi = 0.5 * hi.powf(-gs);
                let lower = 0.5 * gs * power_integral_weighted(lo, 1.0, g, gs - 1.0);
                let upper = 0.5 * gs * power_integral_weighted(1.0, hi, g, -gs - 1.0);
                mass_lo * lo.powf(g) + mass_hi * hi.powf(g) + lower + upper
            }
            Distribution::Lognormal { sigma } => {
                if sigma == 0.0 {
                    return 1.0;
                }
                let n = Normal::new(0.0, 1.0).unwrap();
                let alpha = m.ln() / sigma;
                let tails =
                    m.powf(-g) * n.cdf(-alpha) + m.powf(g) * (1.0 - n.cdf(alpha));
                let body = (0.5 * g * g * sigma * sigma).exp()
                    * (n.cdf(alpha - g * sigma) - n.cdf(-alpha - g * sigma));
                tails + body
            }
        }
    }
}

/// ∫_a^b t^g dt with the logarithmic case handled.
fn power_integral(a: f64, b: f64, g: f64) -> f64 {
    if (g + 1.0).abs() < 1e-12 {
        (b / a).ln()
    } else {
        (b.powf(g + 1.0) - a.powf(g + 1.0)) / (g + 1.0)
    }
}

/// ∫_a^b t^{g+w} dt (density-weighted moment piece).
fn power_integral_weighted(a: f64, b: f64, g: f64, w: f64) -> f64 {
    power_integral(a, b, g + w)
}

/// Full description of an environment's law; the seed determines the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    pub dimension: usize,
    pub box_side: usize,
    pub distribution: Distribution,
    pub seed: u64,
    #[serde(default)]
    pub truncation: Option<f64>,
}

impl EnvironmentSpec {
    pub fn new(dimension: usize, box_side: usize, distribution: Distribution, seed: u64) -> Self {
        EnvironmentSpec {
            dimension,
            box_side,
            distribution,
            seed,
            truncation: None,
        }
    }

    pub fn with_truncation(mut self, m: f64) -> Self {
        self.truncation = Some(m);
        self
    }

    pub fn validate(&self) -> Result<Torus> {
        let torus = Torus::new(self.dimension, self.box_side)?;
        self.distribution.validate()?;
        if let Some(m) = self.truncation {
            if m < 1.0 || !m.is_finite() {
                return Err(Error::config(format!("truncation M = {m} must be >= 1")));
            }
        }
        Ok(torus)
    }

    /// `E[a^g]` under this spec, truncation included. `None` means infinite.
    pub fn moment(&self, g: f64) -> Option<f64> {
        match self.truncation {
            Some(m) => Some(self.distribution.moment_truncated(g, m)),
            None => self.distribution.moment(g),
        }
    }

    /// Analytic `Γ(γ) = E[a^γ]^{1/γ} + E[a^{-γ}]^{1/γ}` when both moments exist.
    pub fn gamma_norm(&self, gamma: f64) -> Option<f64> {
        let up = self.moment(gamma)?;
        let down = self.moment(-gamma)?;
        Some(up.powf(1.0 / gamma) + down.powf(1.0 / gamma))
    }

    /// Analytic effective elliptic ratio `Λ = E[a^{d+1}]^{1/(d+1)} E[a^{-(d+1)}]^{1/(d+1)}`.
    pub fn elliptic_ratio(&self) -> Option<f64> {
        let q = (self.dimension + 1) as f64;
        let up = self.moment(q)?;
        let down = self.moment(-q)?;
        Some((up * down).powf(1.0 / q))
    }
}

/// A sampled environment: one positive conductance per oriented edge,
/// immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    spec: EnvironmentSpec,
    torus: Torus,
    a: Vec<f64>,
}

impl Environment {
    /// Sample the i.i.d. environment determined by `spec`. Pure in `spec`:
    /// each edge draws from its own counter-based stream, so the result is
    /// bitwise identical regardless of scheduling.
    pub fn sample(spec: &EnvironmentSpec) -> Result<Environment> {
        let torus = spec.validate()?;
        let n_edges = torus.edge_count();
        let mut a = vec![0.0; n_edges];
        for (e, slot) in a.iter_mut().enumerate() {
            let mut rng = rng::stream(spec.seed, Purpose::Edge, e as u64);
            let mut v = spec.distribution.draw(&mut rng);
            if let Some(m) = spec.truncation {
                v = v.clamp(1.0 / m, m);
            }
            *slot = v;
        }
        Ok(Environment {
            spec: spec.clone(),
            torus,
            a,
        })
    }

    /// Build from raw parts (used by the binary reader); validates the length.
    pub fn from_parts(spec: EnvironmentSpec, edges: Vec<f64>) -> Result<Environment> {
        let torus = spec.validate()?;
        if edges.len() != torus.edge_count() {
            return Err(Error::contract(format!(
                "edge array has {} entries, expected {}",
                edges.len(),
                torus.edge_count()
            )));
        }
        if edges.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::contract("edge array contains non-positive values"));
        }
        Ok(Environment {
            spec,
            torus,
            a: edges,
        })
    }

    pub fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    pub fn edges(&self) -> &[f64] {
        &self.a
    }

    /// Conductance of the edge `{x, x + e_dir}`.
    #[inline]
    pub fn conductance(&self, dir: usize, vertex: usize) -> f64 {
        self.a[dir * self.torus.vertex_count() + vertex]
    }

    #[inline]
    pub fn conductance_by_edge(&self, edge: usize) -> f64 {
        self.a[edge]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.a.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    }

    /// `(a ∧ M) ∨ M⁻¹` on every edge; idempotent, records `M` in the spec.
    pub fn truncate(&self, m: f64) -> Result<Environment> {
        if m < 1.0 || !m.is_finite() {
            return Err(Error::config(format!("truncation M = {m} must be >= 1")));
        }
        let mut spec = self.spec.clone();
        spec.truncation = Some(m);
        let a = self.a.iter().map(|&v| v.clamp(1.0 / m, m)).collect();
        Ok(Environment {
            spec,
            torus: self.torus.clone(),
            a,
        })
    }

    /// Redraw the `d` forward edges `{x, x + e_i}` at one vertex, leaving all
    /// other edges bitwise unchanged. `stream_id` selects the resampling
    /// randomness, so repeated calls are reproducible.
    pub fn resample_vertex(&self, vertex: usize, stream_id: u64) -> Environment {
        self.resample_with(vertex, stream_id, false)
    }

    /// The antithetic partner of [`resample_vertex`]: same stream, each
    /// uniform draw `u` replaced by `1 - u`. Averaging an observable over
    /// the pair cancels the leading quantile noise of the inner resampling
    /// expectation.
    pub fn resample_vertex_antithetic(&self, vertex: usize, stream_id: u64) -> Environment {
        self.resample_with(vertex, stream_id, true)
    }

    fn resample_with(&self, vertex: usize, stream_id: u64, antithetic: bool) -> Environment {
        let n = self.torus.vertex_count();
        assert!(vertex < n, "vertex {vertex} outside box");
        let mut a = self.a.clone();
        let seed = rng::child_seed(self.spec.seed, Purpose::Resample, stream_id);
        let mut rng = rng::stream(seed, Purpose::Resample, vertex as u64);
        for dir in 0..self.torus.dim() {
            let mut u = rng::open_unit(&mut rng);
            if antithetic {
                u = 1.0 - u;
            }
            let mut v = self.spec.distribution.quantile(u);
            if let Some(m) = self.spec.truncation {
                v = v.clamp(1.0 / m, m);
            }
            a[dir * n + vertex] = v;
        }
        Environment {
            spec: self.spec.clone(),
            torus: self.torus.clone(),
            a,
        }
    }
}

/// Monte Carlo estimates of the moment norm Γ(γ) and the elliptic ratio Λ.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub gamma: f64,
    pub n_samples: usize,
    pub gamma_hat: f64,
    pub gamma_se: f64,
    pub lambda_hat: f64,
    pub lambda_se: f64,
    /// False when the requested order reaches the documented tail index, so
    /// the estimate cannot converge.
    pub reliable: bool,
    pub warnings: Vec<String>,
}

/// Estimate `Γ(γ)` and `Λ` by direct sampling of the edge law. Standard
/// errors come from the delta method on the joint sample covariance.
pub fn moment_report(spec: &EnvironmentSpec, gamma: f64, n_samples: usize) -> Result<MomentReport> {
    if gamma <= 0.0 {
        return Err(Error::config(format!("moment order gamma {gamma} must be > 0")));
    }
    if n_samples < 2 {
        return Err(Error::config("moment report needs at least 2 samples"));
    }
    spec.validate()?;
    let q = (spec.dimension + 1) as f64;
    // per-draw transforms: a^γ, a^{-γ}, a^{d+1}, a^{-(d+1)}
    let mut sums = [0.0f64; 4];
    let mut sq = [[0.0f64; 4]; 4];
    for k in 0..n_samples {
        let mut rng = rng::stream(spec.seed, Purpose::Draw, k as u64);
        let mut a = spec.distribution.draw(&mut rng);
        if let Some(m) = spec.truncation {
            a = a.clamp(1.0 / m, m);
        }
        let row = [a.powf(gamma), a.powf(-gamma), a.powf(q), a.powf(-q)];
        for i in 0..4 {
            sums[i] += row[i];
            for j in 0..4 {
                sq[i][j] += row[i] * row[j];
            }
        }
    }
    let n = n_samples as f64;
    let mean = |i: usize| sums[i] / n;
    let cov = |i: usize, j: usize| (sq[i][j] / n - mean(i) * mean(j)) / n;

    let (mg, mgi, mq, mqi) = (mean(0), mean(1), mean(2), mean(3));
    let gamma_hat = mg.powf(1.0 / gamma) + mgi.powf(1.0 / gamma);
    let dg = [
        mg.powf(1.0 / gamma - 1.0) / gamma,
        mgi.powf(1.0 / gamma - 1.0) / gamma,
    ];
    let gamma_var = dg[0] * dg[0] * cov(0, 0)
        + dg[1] * dg[1] * cov(1, 1)
        + 2.0 * dg[0] * dg[1] * cov(0, 1);

    let lambda_hat = (mq * mqi).powf(1.0 / q);
    let dl = [lambda_hat / (q * mq), lambda_hat / (q * mqi)];
    let lambda_var = dl[0] * dl[0] * cov(2, 2)
        + dl[1] * dl[1] * cov(3, 3)
        + 2.0 * dl[0] * dl[1] * cov(2, 3);

    let mut warnings = Vec::new();
    let mut reliable = true;
    if let Some(star) = spec.distribution.tail_index() {
        if spec.truncation.is_none() {
            if gamma >= star {
                reliable = false;
                warnings.push(format!(
                    "moment order gamma={gamma} >= tail index {star}: E[a^gamma] is infinite, estimate unreliable"
                ));
            }
            if q >= star {
                reliable = false;
                warnings.push(format!(
                    "elliptic ratio order d+1={q} >= tail index {star}: estimate unreliable"
                ));
            }
        }
    }

    Ok(MomentReport {
        gamma,
        n_samples,
        gamma_hat,
        gamma_se: gamma_var.max(0.0).sqrt(),
        lambda_hat,
        lambda_se: lambda_var.max(0.0).sqrt(),
        reliable,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: usize, l: usize, dist: Distribution, seed: u64) -> EnvironmentSpec {
        EnvironmentSpec::new(d, l, dist, seed)
    }

    #[test]
    fn constant_environment_is_constant() {
        let s = spec(2, 4, Distribution::Constant { value: 1.0 }, 9);
        let env = Environment::sample(&s).unwrap();
        assert_eq!(env.edges().len(), 32);
        assert!(env.edges().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = spec(
            1,
            4,
            Distribution::Bernoulli {
                p: 0.5,
                lo: 1.0,
                hi: 2.0,
            },
            1234,
        );
        let e1 = Environment::sample(&s).unwrap();
        let e2 = Environment::sample(&s).unwrap();
        assert_eq!(e1.edges(), e2.edges());
        assert!(e1.edges().iter().all(|&v| v == 1.0 || v == 2.0));
        let s2 = EnvironmentSpec { seed: 1235, ..s };
        let e3 = Environment::sample(&s2).unwrap();
        assert_ne!(e1.edges(), e3.edges());
    }

    #[test]
    fn truncation_clamps_and_is_idempotent() {
        let s = spec(1, 8, Distribution::ParetoSymmetric { gamma_star: 2.0 }, 7);
        let env = Environment::sample(&s).unwrap();
        let t = env.truncate(2.0).unwrap();
        assert!(t.edges().iter().all(|&v| (0.5..=2.0).contains(&v)));
        let tt = t.truncate(2.0).unwrap();
        assert_eq!(t.edges(), tt.edges());
        // clamp above, below, identity
        let probe = Environment::from_parts(
            spec(1, 4, Distribution::Constant { value: 1.0 }, 0),
            vec![5.0, 0.1, 1.5, 1.0],
        )
        .unwrap();
        let c = probe.truncate(2.0).unwrap();
        assert_eq!(c.edges(), &[2.0, 0.5, 1.5, 1.0]);
        assert!(env.truncate(0.5).is_err());
    }

    #[test]
    fn resample_touches_at_most_d_edges() {
        let s = spec(
            2,
            8,
            Distribution::Uniform { lambda: 0.25 },
            42,
        );
        let env = Environment::sample(&s).unwrap();
        let r = env.resample_vertex(17, 0);
        let n = env.torus().vertex_count();
        let mut diffs = Vec::new();
        for e in 0..env.edges().len() {
            if env.edges()[e] != r.edges()[e] {
                diffs.push(e);
            }
        }
        assert!(diffs.len() <= 2);
        for e in diffs {
            assert_eq!(e % n, 17);
        }
        // constant law: resampling is a no-op
        let sc = spec(2, 4, Distribution::Constant { value: 3.0 }, 0);
        let env = Environment::sample(&sc).unwrap();
        assert_eq!(env.resample_vertex(5, 9).edges(), env.edges());
    }

    #[test]
    fn antithetic_resample_mirrors_the_quantile() {
        // uniform law: quantile(u) + quantile(1-u) = lambda + 1 exactly
        let s = spec(2, 8, Distribution::Uniform { lambda: 0.25 }, 50);
        let env = Environment::sample(&s).unwrap();
        let a = env.resample_vertex(9, 3);
        let b = env.resample_vertex_antithetic(9, 3);
        let n = env.torus().vertex_count();
        for dir in 0..2 {
            let (x, y) = (a.edges()[dir * n + 9], b.edges()[dir * n + 9]);
            assert!((x + y - 1.25).abs() < 1e-12, "pair ({x}, {y}) not mirrored");
        }
    }

    #[test]
    fn resampled_edge_matches_marginal_law() {
        // chi-square over 10^4 resamples of one vertex in d=1
        let s = spec(
            1,
            4,
            Distribution::Bernoulli {
                p: 0.5,
                lo: 1.0,
                hi: 2.0,
            },
            77,
        );
        let env = Environment::sample(&s).unwrap();
        let trials = 10_000usize;
        let mut hi_count = 0usize;
        for t in 0..trials {
            let r = env.resample_vertex(2, t as u64);
            if r.edges()[2] == 2.0 {
                hi_count += 1;
            }
        }
        let expected = trials as f64 * 0.5;
        let chi2 = {
            let lo = trials as f64 - hi_count as f64;
            (hi_count as f64 - expected).powi(2) / expected + (lo - expected).powi(2) / expected
        };
        // 1 dof, alpha = 1e-3
        assert!(chi2 < 10.83, "chi-square {chi2} too large");
    }

    #[test]
    fn analytic_moments_match_quadrature() {
        // midpoint quadrature on the quantile transform as an independent oracle
        let dists = [
            Distribution::Uniform { lambda: 0.5 },
            Distribution::Bernoulli {
                p: 0.25,
                lo: 0.5,
                hi: 4.0,
            },
            Distribution::ParetoSymmetric { gamma_star: 8.0 },
            Distribution::Lognormal { sigma: 0.5 },
        ];
        let n = 2_000_000usize;
        for dist in &dists {
            for g in [1.0, 2.0, -1.0, -2.0] {
                let exact = dist.moment(g).unwrap();
                let quad: f64 = (0..n)
                    .map(|k| {
                        let u = (k as f64 + 0.5) / n as f64;
                        dist.quantile(u).powf(g)
                    })
                    .sum::<f64>()
                    / n as f64;
                let rel = (quad - exact).abs() / exact;
                assert!(
                    rel < 2e-2,
                    "{dist:?} moment g={g}: exact {exact}, quad {quad}"
                );
            }
        }
    }

    #[test]
    fn truncated_moments_match_quadrature() {
        let dists = [
            Distribution::Uniform { lambda: 0.25 },
            Distribution::ParetoSymmetric { gamma_star: 4.0 },
            Distribution::Lognormal { sigma: 1.0 },
            Distribution::Bernoulli {
                p: 0.5,
                lo: 0.25,
                hi: 8.0,
            },
        ];
        let m = 2.0;
        let n = 2_000_000usize;
        for dist in &dists {
            for g in [3.0, -3.0] {
                let exact = dist.moment_truncated(g, m);
                let quad: f64 = (0..n)
                    .map(|k| {
                        let u = (k as f64 + 0.5) / n as f64;
                        dist.quantile(u).clamp(1.0 / m, m).powf(g)
                    })
                    .sum::<f64>()
                    / n as f64;
                let rel = (quad - exact).abs() / exact.abs();
                assert!(
                    rel < 1e-2,
                    "{dist:?} truncated moment g={g}: exact {exact}, quad {quad}"
                );
            }
        }
    }

    #[test]
    fn pareto_tail_matches_dkw_band() {
        // empirical upper tail of a vs the documented t^{-γ*}/2 at 1e5 samples
        let dist = Distribution::ParetoSymmetric { gamma_star: 8.0 };
        let n = 100_000usize;
        let mut samples: Vec<f64> = (0..n)
            .map(|k| {
                let mut r = rng::stream(5150, Purpose::Draw, k as u64);
                dist.draw(&mut r)
            })
            .collect();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // DKW band at alpha = 1e-3
        let eps = ((2.0f64 / 1e-3).ln() / (2.0 * n as f64)).sqrt();
        let cdf = |t: f64| {
            if t < 1.0 {
                0.5 * t.powf(8.0)
            } else {
                1.0 - 0.5 * t.powf(-8.0)
            }
        };
        for (i, &x) in samples.iter().enumerate() {
            let emp_hi = (i + 1) as f64 / n as f64;
            let emp_lo = i as f64 / n as f64;
            let f = cdf(x);
            assert!(
                f - emp_lo <= eps + 1e-12 && emp_hi - f <= eps + 1e-12,
                "DKW violated at x={x}: F={f}, emp in [{emp_lo},{emp_hi}], eps={eps}"
            );
        }
    }

    #[test]
    fn pareto_moments_stable_below_tail_and_divergent_above() {
        let dist = Distribution::ParetoSymmetric { gamma_star: 8.0 };
        let exact7 = dist.moment(7.0).unwrap();
        assert!(dist.moment(9.0).is_none());
        let checkpoints = [10_000usize, 100_000, 1_000_000];
        let mut stable_ok = 0;
        let mut growth_ratios = Vec::new();
        for seed in 0..5u64 {
            let mut sum7 = 0.0f64;
            let mut sum12 = 0.0f64;
            let mut at7 = Vec::new();
            let mut at12 = Vec::new();
            let mut count = 0usize;
            for k in 0..1_000_000usize {
                let mut r = rng::stream(900 + seed, Purpose::Draw, k as u64);
                let a = dist.draw(&mut r);
                sum7 += a.powi(7);
                sum12 += a.powi(12);
                count += 1;
                if checkpoints.contains(&count) {
                    at7.push(sum7 / count as f64);
                    at12.push(sum12 / count as f64);
                }
            }
            // finite moment: final estimate within a loose band of the analytic value
            let rel = at7[2] / exact7;
            if (0.3..3.0).contains(&rel) {
                stable_ok += 1;
            }
            // infinite moment: running mean keeps growing with sample size
            growth_ratios.push(at12[2] / at12[0]);
        }
        assert!(stable_ok >= 4, "a^7 running means unstable: {stable_ok}/5 in band");
        growth_ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(
            growth_ratios[2] > 2.0,
            "median growth of divergent moment too small: {growth_ratios:?}"
        );
    }

    #[test]
    fn moment_report_closed_forms() {
        // constant(1): Γ = 2, Λ = 1 exactly
        let s = spec(2, 4, Distribution::Constant { value: 1.0 }, 3);
        let r = moment_report(&s, 2.0, 100).unwrap();
        assert_eq!(r.gamma_hat, 2.0);
        assert_eq!(r.lambda_hat, 1.0);
        assert!(r.reliable);

        // bernoulli(0.5, 1, 2), γ = 1: Γ = 1.5 + 0.75 = 2.25
        let s = spec(
            1,
            4,
            Distribution::Bernoulli {
                p: 0.5,
                lo: 1.0,
                hi: 2.0,
            },
            3,
        );
        let r = moment_report(&s, 1.0, 200_000).unwrap();
        assert!((r.gamma_hat - 2.25).abs() < 0.01, "gamma_hat {}", r.gamma_hat);
        let exact = s.gamma_norm(1.0).unwrap();
        assert!((exact - 2.25).abs() < 1e-12);

        // γ beyond the pareto tail: warn and flag
        let s = spec(2, 4, Distribution::ParetoSymmetric { gamma_star: 8.0 }, 3);
        let r = moment_report(&s, 12.0, 1000).unwrap();
        assert!(!r.reliable);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn spec_moment_accounts_for_truncation() {
        let s = spec(1, 4, Distribution::ParetoSymmetric { gamma_star: 4.0 }, 0)
            .with_truncation(2.0);
        // order above the tail index is finite after truncation
        assert!(s.moment(6.0).is_some());
        let untruncated = spec(1, 4, Distribution::ParetoSymmetric { gamma_star: 4.0 }, 0);
        assert!(untruncated.moment(6.0).is_none());
    }
}
