//! Ensemble orchestration and estimators.
//!
//! Everything here is reproducible from `(spec, seed, n)`: per-sample seeds
//! are derived from the master seed, samples are computed independently
//! (optionally on a rayon pool) and aggregated in index order, so parallel
//! and serial runs emit bitwise-identical results.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{ball_average_vector, ball_average_vertex, forward_gradient};
use crate::corrector::{compute_corrector, compute_flux_corrector, CorrectorBundle};
use crate::env::{Environment, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::field::VertexField;
use crate::grid::{OffsetCache, Torus};
use crate::rng::{self, Purpose};

/// Frozen PASS constant of the averaged Poincaré–Sobolev probe. Realized
/// constants peak at 0.19 over the calibration ensembles (random fields and
/// degenerate-law correctors; see the `calibration` example); frozen at a
/// x4 margin.
pub const C_AVG_SOBOLEV: f64 = 0.8;

/// Number of bootstrap resamples behind every confidence interval
/// (percentile method).
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// The spec of ensemble member `k`: same law, derived seed.
pub fn sample_spec(spec: &EnvironmentSpec, k: usize) -> EnvironmentSpec {
    EnvironmentSpec {
        seed: rng::child_seed(spec.seed, Purpose::Sample, k as u64),
        ..spec.clone()
    }
}

/// Run `n` independent samples with derived per-sample seeds on `threads`
/// workers; results come back in sample order regardless of scheduling.
pub fn run_ensemble<T: Send>(
    spec: &EnvironmentSpec,
    n: usize,
    threads: usize,
    job: impl Fn(usize, &EnvironmentSpec) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let specs: Vec<(usize, EnvironmentSpec)> = (0..n).map(|k| (k, sample_spec(spec, k))).collect();
    if threads <= 1 {
        specs.iter().map(|(k, s)| job(*k, s)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?;
        pool.install(|| specs.par_iter().map(|(k, s)| job(*k, s)).collect())
    }
}

/// `E[|X|^p]^{1/p}` with a percentile bootstrap confidence interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentNorm {
    pub p: f64,
    pub value: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Set when the requested order exceeds half the documented tail index.
    pub non_convergent: bool,
}

pub fn moment_norm(samples: &[f64], p: f64, seed: u64) -> Result<MomentNorm> {
    if !(p > 0.0) {
        return Err(Error::config(format!("moment order p = {p} must be > 0")));
    }
    if samples.len() < 2 {
        return Err(Error::config("moment norm needs at least 2 samples"));
    }
    let norm = |xs: &[f64]| -> f64 {
        (xs.iter().map(|x| x.abs().powf(p)).sum::<f64>() / xs.len() as f64).powf(1.0 / p)
    };
    let value = norm(samples);
    let mut boots: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|b| {
            let mut r = rng::stream(seed, Purpose::Bootstrap, b as u64);
            let resample: Vec<f64> = (0..samples.len())
                .map(|_| samples[r.gen_range(0..samples.len())])
                .collect();
            norm(&resample)
        })
        .collect();
    boots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = boots[(0.025 * (BOOTSTRAP_RESAMPLES - 1) as f64).round() as usize];
    let hi = boots[(0.975 * (BOOTSTRAP_RESAMPLES - 1) as f64).round() as usize];
    Ok(MomentNorm {
        p,
        value,
        ci_lo: lo,
        ci_hi: hi,
        non_convergent: false,
    })
}

/// Heavy-tail honesty rule: orders above `tail index / 2` cannot converge.
pub fn is_non_convergent(spec: &EnvironmentSpec, p: f64) -> bool {
    match (spec.truncation, spec.distribution.tail_index()) {
        (None, Some(star)) => p > star / 2.0,
        _ => false,
    }
}

/// Least-squares power-law fit on `(log x, log y)` with a bootstrap CI on
/// the slope.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_ci_lo: f64,
    pub slope_ci_hi: f64,
    pub r2: f64,
}

fn line_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for &(x, y) in points {
        let pred = slope * x + intercept;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

pub fn scaling_fit(pairs: &[(f64, f64)], seed: u64) -> Result<FitResult> {
    if pairs.len() < 3 {
        return Err(Error::config("scaling fit needs at least 3 points"));
    }
    if pairs.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::contract("scaling fit needs strictly positive data"));
    }
    let logs: Vec<(f64, f64)> = pairs.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (slope, intercept, r2) = line_fit(&logs);
    let mut boots = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for b in 0..BOOTSTRAP_RESAMPLES {
        let mut r = rng::stream(seed, Purpose::Bootstrap, b as u64);
        let resample: Vec<(f64, f64)> = (0..logs.len())
            .map(|_| logs[r.gen_range(0..logs.len())])
            .collect();
        let distinct = resample
            .iter()
            .any(|&(x, _)| (x - resample[0].0).abs() > 1e-12);
        if distinct {
            boots.push(line_fit(&resample).0);
        }
    }
    boots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lo, hi) = if boots.is_empty() {
        (slope, slope)
    } else {
        (
            boots[(0.025 * (boots.len() - 1) as f64).round() as usize],
            boots[(0.975 * (boots.len() - 1) as f64).round() as usize],
        )
    };
    Ok(FitResult {
        slope,
        intercept,
        slope_ci_lo: lo,
        slope_ci_hi: hi,
        r2,
    })
}

// ---------------------------------------------------------------------
// CLT statistic
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CrConfig {
    pub radii: Vec<f64>,
    pub direction: usize,
    pub n_samples: usize,
    pub p_list: Vec<f64>,
    pub tol: f64,
    pub threads: usize,
    /// Also average the flux-corrector gradients (d >= 2 only).
    pub include_sigma: bool,
    /// Periodization guard: radii must stay below `L / guard_ratio`.
    /// Default 8; sensitivity to it is itself an experiment.
    pub guard_ratio: f64,
}

impl CrConfig {
    pub fn new(radii: Vec<f64>, direction: usize, n_samples: usize) -> Self {
        CrConfig {
            radii,
            direction,
            n_samples,
            p_list: vec![1.0, 2.0],
            tol: 1e-6,
            threads: 1,
            include_sigma: false,
            guard_ratio: 8.0,
        }
    }
}

/// Per-sample record: the CLT statistic per radius, split by source.
#[derive(Debug, Clone, Serialize)]
pub struct CrSample {
    pub index: usize,
    pub seed: u64,
    /// `R^{d/2} |⨏_{B_R} ∇φ|` per radius.
    pub phi: Vec<f64>,
    /// `R^{d/2}` times the Euclidean norm over the averaged σ gradients.
    pub sigma: Vec<f64>,
    /// Concatenated-tensor statistic (Euclidean over φ and σ components).
    pub total: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrNorms {
    pub radius: f64,
    pub p: f64,
    pub phi: MomentNorm,
    pub total: MomentNorm,
}

#[derive(Debug, Clone)]
pub struct CrEnsemble {
    pub config: CrConfig,
    pub records: Vec<CrSample>,
    pub norms: Vec<CrNorms>,
    /// Log-log slope of `E[|⨏_{B_R}∇φ|²]^{1/2}` against `R` (CLT scaling
    /// target: `-d/2`); absent for degenerate data or fewer than 3 radii.
    pub slope: Option<FitResult>,
}

pub fn estimate_cr(spec: &EnvironmentSpec, config: &CrConfig) -> Result<CrEnsemble> {
    let torus = spec.validate()?;
    let d = torus.dim();
    let guard = torus.side() as f64 / config.guard_ratio;
    for &r in &config.radii {
        if r > guard {
            return Err(Error::geometry(format!(
                "radius {r} beyond the periodization guard L/{} = {guard}",
                config.guard_ratio
            )));
        }
    }
    if config.n_samples < 2 {
        return Err(Error::config("CLT scan needs at least 2 samples"));
    }
    let include_sigma = config.include_sigma && d >= 2;

    let records: Vec<CrSample> = run_ensemble(
        spec,
        config.n_samples,
        config.threads,
        |index, sample_spec| {
            let env = Environment::sample(sample_spec)?;
            let mut bundle = compute_corrector(&env, config.direction, config.tol)?;
            if include_sigma {
                compute_flux_corrector(&env, &mut bundle)?;
            }
            let sigma_grads: Vec<_> = bundle
                .sigma
                .iter()
                .map(|s| forward_gradient(env.torus(), &s.field))
                .collect();
            let mut phi = Vec::with_capacity(config.radii.len());
            let mut sigma = Vec::with_capacity(config.radii.len());
            let mut total = Vec::with_capacity(config.radii.len());
            for &r in &config.radii {
                let ball = env.torus().ball(0, r)?;
                let scale = r.powf(d as f64 / 2.0);
                let avg_phi = ball_average_vector(&bundle.grad_phi, &ball);
                let phi_sq: f64 = avg_phi[..d].iter().map(|v| v * v).sum();
                let mut sigma_sq = 0.0;
                for grad in &sigma_grads {
                    let avg = ball_average_vector(grad, &ball);
                    sigma_sq += avg[..d].iter().map(|v| v * v).sum::<f64>();
                }
                phi.push(scale * phi_sq.sqrt());
                sigma.push(scale * sigma_sq.sqrt());
                total.push(scale * (phi_sq + sigma_sq).sqrt());
            }
            Ok(CrSample {
                index,
                seed: sample_spec.seed,
                phi,
                sigma,
                total,
            })
        },
    )?;

    let mut norms = Vec::new();
    for (ri, &radius) in config.radii.iter().enumerate() {
        for &p in &config.p_list {
            let phi_samples: Vec<f64> = records.iter().map(|s| s.phi[ri]).collect();
            let total_samples: Vec<f64> = records.iter().map(|s| s.total[ri]).collect();
            let boot_seed = rng::child_seed(spec.seed, Purpose::Bootstrap, (ri * 997) as u64)
                ^ p.to_bits();
            let flag = is_non_convergent(spec, p);
            let mut phi_norm = moment_norm(&phi_samples, p, boot_seed)?;
            let mut total_norm = moment_norm(&total_samples, p, boot_seed ^ 1)?;
            phi_norm.non_convergent = flag;
            total_norm.non_convergent = flag;
            norms.push(CrNorms {
                radius,
                p,
                phi: phi_norm,
                total: total_norm,
            });
        }
    }

    // slope of E[|⨏ ∇φ|²]^{1/2} vs R: strip the R^{d/2} factor off C_R
    let pairs: Vec<(f64, f64)> = config
        .radii
        .iter()
        .enumerate()
        .map(|(ri, &r)| {
            let rms = (records
                .iter()
                .map(|s| {
                    let raw = s.phi[ri] / r.powf(d as f64 / 2.0);
                    raw * raw
                })
                .sum::<f64>()
                / records.len() as f64)
                .sqrt();
            (r, rms)
        })
        .collect();
    let slope = if pairs.len() >= 3 && pairs.iter().all(|&(_, y)| y > 0.0) {
        Some(scaling_fit(
            &pairs,
            rng::child_seed(spec.seed, Purpose::Bootstrap, 424242),
        )?)
    } else {
        None
    };

    Ok(CrEnsemble {
        config: config.clone(),
        records,
        norms,
        slope,
    })
}

// ---------------------------------------------------------------------
// Corrector growth
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GrowthConfig {
    pub direction: usize,
    /// Vertices whose increment from the origin is measured.
    pub offsets: Vec<usize>,
    pub p: f64,
    pub n_samples: usize,
    pub tol: f64,
    pub threads: usize,
    /// Periodization guard ratio (offsets stay below `L / guard_ratio`).
    pub guard_ratio: f64,
}

impl GrowthConfig {
    pub fn new(direction: usize, offsets: Vec<usize>, n_samples: usize) -> Self {
        GrowthConfig {
            direction,
            offsets,
            p: 2.0,
            n_samples,
            tol: 1e-6,
            threads: 1,
            guard_ratio: 8.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthPoint {
    pub vertex: usize,
    pub distance: f64,
    pub norm: MomentNorm,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShapeFit {
    pub shape: String,
    pub amplitude: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthCurve {
    pub points: Vec<GrowthPoint>,
    pub fits: Vec<ShapeFit>,
}

/// Shape functions the growth curve is regressed against.
pub fn growth_shapes(d: usize) -> Vec<(String, Box<dyn Fn(f64) -> f64>)> {
    let mut shapes: Vec<(String, Box<dyn Fn(f64) -> f64>)> = Vec::new();
    match d {
        1 => {
            shapes.push(("sqrt".into(), Box::new(|x: f64| x.sqrt())));
            shapes.push(("log".into(), Box::new(|x: f64| (1.0 + x).ln().sqrt())));
        }
        2 => {
            shapes.push(("sqrt-log".into(), Box::new(|x: f64| (1.0 + x).ln().sqrt())));
            shapes.push(("power-quarter".into(), Box::new(|x: f64| x.powf(0.25))));
        }
        _ => {
            shapes.push(("constant".into(), Box::new(|_x: f64| 1.0)));
            shapes.push(("sqrt-log".into(), Box::new(|x: f64| (1.0 + x).ln().sqrt())));
        }
    }
    shapes
}

/// Fit `y ≈ a·shape(x) + b` by least squares; reports R².
fn fit_shape(points: &[(f64, f64)], shape: &dyn Fn(f64) -> f64) -> (f64, f64, f64) {
    let transformed: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (shape(x), y)).collect();
    // degenerate regressor (constant shape): fit the mean
    let x0 = transformed[0].0;
    if transformed.iter().all(|&(x, _)| (x - x0).abs() < 1e-12) {
        let mean = transformed.iter().map(|&(_, y)| y).sum::<f64>() / transformed.len() as f64;
        let ss_tot: f64 = transformed
            .iter()
            .map(|&(_, y)| (y - mean) * (y - mean))
            .sum();
        let r2 = if ss_tot > 0.0 {
            // a flat fit explains nothing beyond the mean
            0.0
        } else {
            1.0
        };
        return (0.0, mean, r2);
    }
    line_fit(&transformed)
}

pub fn corrector_growth(spec: &EnvironmentSpec, config: &GrowthConfig) -> Result<GrowthCurve> {
    let torus = spec.validate()?;
    let guard = torus.side() as f64 / config.guard_ratio;
    for &x in &config.offsets {
        if torus.distance(0, x) > guard {
            return Err(Error::geometry(format!(
                "offset vertex {x} beyond the periodization guard L/{}",
                config.guard_ratio
            )));
        }
    }
    let increments: Vec<Vec<f64>> = run_ensemble(
        spec,
        config.n_samples,
        config.threads,
        |_, sample_spec| {
            let env = Environment::sample(sample_spec)?;
            let bundle = compute_corrector(&env, config.direction, config.tol)?;
            Ok(config
                .offsets
                .iter()
                .map(|&x| bundle.phi[x] - bundle.phi[0])
                .collect())
        },
    )?;

    let mut points = Vec::new();
    for (xi, &x) in config.offsets.iter().enumerate() {
        let samples: Vec<f64> = increments.iter().map(|row| row[xi]).collect();
        let norm = moment_norm(
            &samples,
            config.p,
            rng::child_seed(spec.seed, Purpose::Bootstrap, 7000 + xi as u64),
        )?;
        points.push(GrowthPoint {
            vertex: x,
            distance: torus.distance(0, x),
            norm,
        });
    }

    let curve: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.distance > 0.0)
        .map(|p| (p.distance, p.norm.value))
        .collect();
    let fits = if curve.len() >= 2 {
        growth_shapes(torus.dim())
            .iter()
            .map(|(name, shape)| {
                let (amplitude, intercept, r2) = fit_shape(&curve, shape.as_ref());
                ShapeFit {
                    shape: name.clone(),
                    amplitude,
                    intercept,
                    r2,
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(GrowthCurve { points, fits })
}

/// Exact second moment of the whole-line i.i.d. increment model in d=1:
/// `E[(φ(x) - φ(0))²] = |x| · Var(a⁻¹)/E[a⁻¹]²`, the oracle the d=1 growth
/// curve is checked against.
pub fn growth_oracle_1d(spec: &EnvironmentSpec, distance: f64) -> Option<f64> {
    let m1 = spec.moment(-1.0)?;
    let m2 = spec.moment(-2.0)?;
    let var = m2 - m1 * m1;
    Some((distance * var / (m1 * m1)).sqrt())
}

// ---------------------------------------------------------------------
// Sub-linearity
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SublinearityReport {
    /// `(n, n⁻¹ ⨏_{B_n} |(φ,σ)|)` over the requested radii.
    pub values: Vec<(f64, f64)>,
    pub slope: f64,
    pub ratio_last_first: f64,
    /// Largest admissible final value under the dimension's growth law,
    /// anchored at the first point with a x2 slack.
    pub threshold: f64,
    /// Final value at or below the threshold (trivially true for the
    /// identically-zero curve of constant environments).
    pub pass: bool,
}

/// Expected decay of `n⁻¹ ⨏_{B_n}|(φ,σ)|` between two radii: the shape
/// function of the dimension divided by `n`.
fn sublinearity_shape(d: usize, n: f64) -> f64 {
    match d {
        1 => n.sqrt() / n,
        2 => (1.0 + n).ln().sqrt() / n,
        _ => 1.0 / n,
    }
}

pub fn sublinearity_check(
    torus: &Torus,
    bundle: &CorrectorBundle,
    n_list: &[f64],
) -> Result<SublinearityReport> {
    if n_list.is_empty() {
        return Err(Error::contract("sub-linearity check needs at least one radius"));
    }
    let guard = torus.side() as f64 / 4.0;
    let n_vertices = torus.vertex_count();
    let mut magnitude = VertexField::zeros(n_vertices);
    for x in 0..n_vertices {
        let mut acc = bundle.phi[x] * bundle.phi[x];
        for s in &bundle.sigma {
            acc += s.field[x] * s.field[x];
        }
        magnitude[x] = acc.sqrt();
    }
    let mut values = Vec::new();
    for &n in n_list {
        if n > guard {
            return Err(Error::geometry(format!(
                "sub-linearity radius {n} beyond guard L/4 = {guard}"
            )));
        }
        let ball = torus.ball(0, n)?;
        values.push((n, ball_average_vertex(&magnitude, &ball) / n));
    }
    let points: Vec<(f64, f64)> = values.iter().filter(|&&(_, v)| v > 0.0).copied().collect();
    let slope = if points.len() >= 2 {
        let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
        line_fit(&logs).0
    } else {
        f64::NAN
    };
    let ratio_last_first = if values.first().map(|v| v.1) > Some(0.0) {
        values.last().unwrap().1 / values.first().unwrap().1
    } else {
        0.0
    };
    let (first, last) = (values[0], *values.last().unwrap());
    let d = torus.dim();
    let threshold =
        2.0 * first.1 * sublinearity_shape(d, last.0) / sublinearity_shape(d, first.0);
    Ok(SublinearityReport {
        values,
        slope,
        ratio_last_first,
        threshold,
        pass: last.1 <= threshold.max(1e-300) || last.1 == 0.0,
    })
}

// ---------------------------------------------------------------------
// Averaged Poincaré–Sobolev probe
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SobolevReport {
    pub big_r: f64,
    pub mu: f64,
    pub exponent_s_out: f64,
    pub exponent_s_in: f64,
    pub tau: f64,
    pub lhs: f64,
    /// `R^{-(1-τ)(1-μ)} (⨏_{B_2R} |∇ψ|^s)^{1/s}`.
    pub gradient_term: f64,
    /// `(⨏_{B_R} |⨏_{B_{R^μ}(x)} ∇ψ|^s)^{1/s}`.
    pub averaged_term: f64,
    pub constant: f64,
    pub pass: bool,
}

/// Check the averaged Poincaré–Sobolev inequality
/// `R⁻¹(⨏_{B_R}|ψ-⨏ψ|^S)^{1/S} <= C [R^{-(1-τ)(1-μ)}(⨏_{B_2R}|∇ψ|^s)^{1/s}
///  + (⨏_{B_R}|⨏_{B_{R^μ}(x)}∇ψ|^s)^{1/s}]`, `τ = d(1/s - 1/S)`.
pub fn avg_sobolev_probe(
    torus: &Torus,
    psi: &VertexField,
    big_r: f64,
    mu: f64,
    exponent_s_out: f64,
    exponent_s_in: f64,
) -> Result<SobolevReport> {
    let d = torus.dim() as f64;
    let (big_s, small_s) = (exponent_s_out, exponent_s_in);
    let tau = d * (1.0 / small_s - 1.0 / big_s);
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::config(format!(
            "τ = {tau} outside [0,1] for S={big_s}, s={small_s}"
        )));
    }
    if !(0.0 < mu && mu < 1.0) {
        return Err(Error::config(format!("μ = {mu} outside (0,1)")));
    }
    if 2.0 * big_r >= torus.side() as f64 / 2.0 {
        return Err(Error::geometry(format!(
            "2R = {} violates the guard L/2 = {}",
            2.0 * big_r,
            torus.side() / 2
        )));
    }

    let grad = forward_gradient(torus, psi);
    let ball = torus.ball(0, big_r)?;
    let mean = ball_average_vertex(psi, &ball);
    let lhs = (ball
        .vertices
        .iter()
        .map(|&x| (psi[x] - mean).abs().powf(big_s))
        .sum::<f64>()
        / ball.vertices.len() as f64)
        .powf(1.0 / big_s)
        / big_r;

    let double_ball = torus.ball(0, 2.0 * big_r)?;
    let grad_term = (double_ball
        .vertices
        .iter()
        .map(|&x| grad.norm_at(x).powf(small_s))
        .sum::<f64>()
        / double_ball.vertices.len() as f64)
        .powf(1.0 / small_s)
        * big_r.powf(-(1.0 - tau) * (1.0 - mu));

    let inner_radius = big_r.powf(mu);
    let mut cache = OffsetCache::new();
    let offsets = cache.get(torus.dim(), inner_radius, torus.side())?;
    let averaged_term = (ball
        .vertices
        .iter()
        .map(|&x| {
            let inner = offsets.anchor(torus, x);
            let avg = ball_average_vector(&grad, &inner);
            let norm: f64 = avg[..torus.dim()].iter().map(|v| v * v).sum::<f64>().sqrt();
            norm.powf(small_s)
        })
        .sum::<f64>()
        / ball.vertices.len() as f64)
        .powf(1.0 / small_s);

    let rhs = grad_term + averaged_term;
    let constant = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(SobolevReport {
        big_r,
        mu,
        exponent_s_out: big_s,
        exponent_s_in: small_s,
        tau,
        lhs,
        gradient_term: grad_term,
        averaged_term,
        constant,
        pass: constant <= C_AVG_SOBOLEV,
    })
}
