//! Experiment drivers: each kind consumes the validated config, runs the
//! corresponding core pipeline, and emits CSV + JSON-lines + summary text.

use anyhow::{anyhow, bail, Context};
use rand::Rng;

use rcmlab_core::corrector::{
    compute_corrector, compute_flux_corrector, compute_massive_corrector, sigma_divergence,
};
use rcmlab_core::env::Environment;
use rcmlab_core::field::VectorField;
use rcmlab_core::green::{gradient_decay_profile, green_difference, representation_phi_check};
use rcmlab_core::report::ProbeReport;
use rcmlab_core::rng::{self, Purpose};
use rcmlab_core::scales::{
    check_caccioppoli, check_hole_filling, compute_r_diamond, compute_r_spade,
    diamond_check_constant, gehring_probe, meyers_fields,
};
use rcmlab_core::sensitivity::{
    representation_check_f1, representation_check_f2, spectral_gap_check, Observable,
    SpectralGapMode,
};
use rcmlab_core::stats::{
    avg_sobolev_probe, corrector_growth, estimate_cr, run_ensemble, sample_spec,
    sublinearity_check, CrConfig, GrowthConfig,
};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::{fmt, OutputDir};

pub struct Outcome {
    pub warnings: Vec<String>,
    pub summary: String,
}

pub fn run(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<Outcome> {
    match config.experiment.kind {
        ExperimentKind::CltScan => clt_scan(config, out),
        ExperimentKind::Growth => growth(config, out),
        ExperimentKind::Correctors => correctors(config, out),
        ExperimentKind::Scales => scales(config, out),
        ExperimentKind::Sensitivity => sensitivity(config, out),
        ExperimentKind::Green => green(config, out),
        ExperimentKind::Meyers => meyers(config, out),
        ExperimentKind::SpectralGap => spectral_gap(config, out),
    }
}

fn clt_scan(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<Outcome> {
    let section = config.clt.as_ref().unwrap();
    let cr_config = CrConfig {
        radii: section.radii.clone(),
        direction: section.direction,
        n_samples: config.ensemble.n_samples,
        p_list: section.p_list.clone(),
        tol: config.solver.tol,
        threads: config.threads(),
        include_sigma: section.include_sigma,
        guard_ratio: section.guard_ratio,
    };
    let ens = estimate_cr(&config.env, &cr_config)?;

    let mut csv = out.csv(
        "cr_samples.csv",
        &["sample", "seed", "radius", "cr_phi", "cr_sigma", "cr_total"],
    )?;
    for rec in &ens.records {
        for (ri, &r) in section.radii.iter().enumerate() {
            csv.row(&[
                rec.index.to_string(),
                rec.seed.to_string(),
                fmt(r),
                fmt(rec.phi[ri]),
                fmt(rec.sigma[ri]),
                fmt(rec.total[ri]),
            ])?;
        }
    }
    csv.finish()?;

    let mut jsonl = out.jsonl("records.jsonl")?;
    let mut warnings = Vec::new();
    for norm in &ens.norms {
        jsonl.record("cr_norm", norm)?;
        if norm.phi.non_convergent {
            warnings.push(format!(
                "p = {} exceeds half the tail index: moment flagged NON-CONVERGENT",
                norm.p
            ));
        }
    }
    let slope_line = match &ens.slope {
        Some(fit) => {
            jsonl.record("cr_slope", fit)?;
            format!(
                "slope of E[|avg grad phi|^2]^(1/2) vs R: {:.4} (CI [{:.4}, {:.4}])",
                fit.slope, fit.slope_ci_lo, fit.slope_ci_hi
            )
        }
        None => "slope: not fitted (needs >= 3 radii with positive data)".to_string(),
    };
    jsonl.finish()?;

    let summary = format!(
        "clt-scan: {} samples, radii {:?}\n{}\nwarnings: {}\n",
        config.ensemble.n_samples,
        section.radii,
        slope_line,
        warnings.len()
    );
    Ok(Outcome { warnings, summary })
}

fn growth(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<Outcome> {
    let section = config.growth.as_ref().unwrap();
    let torus = config.env.validate().map_err(|e| anyhow!("{e}"))?;
    let offsets: Vec<usize> = section
        .offsets
        .iter()
        .map(|&k| torus.index(&[k, 0, 0]))
        .collect();
    let growth_config = GrowthConfig {
        direction: section.direction,
        offsets,
        p: section.p,
        n_samples: config.ensemble.n_samples,
        tol: config.solver.tol,
        threads: config.threads(),
        guard_ratio: section.guard_ratio,
    };
    let curve = corrector_growth(&config.env, &growth_config)?;

    let d = config.env.dimension;
    let reference = |x: f64| -> f64 {
        match d {
            1 => x.sqrt(),
            2 => (1.0 + x).ln().sqrt(),
            _ => 1.0,
        }
    };
    let ref_name = match d {
        1 => "sqrt",
        2 => "sqrt_log1p",
        _ => "constant",
    };
    let mut csv = out.csv(
        "growth_curve.csv",
        &["distance", "norm", "ci_lo", "ci_hi", ref_name],
    )?;
    for point in &curve.points {
        csv.row(&[
            fmt(point.distance),
            fmt(point.norm.value),
            fmt(point.norm.ci_lo),
            fmt(point.norm.ci_hi),
            fmt(reference(point.distance)),
        ])?;
    }
    csv.finish()?;

    let mut jsonl = out.jsonl("records.jsonl")?;
    for fit in &curve.fits {
        jsonl.record("growth_fit", fit)?;
    }
    jsonl.finish()?;

    let fits: Vec<String> = curve
        .fits
        .iter()
        .map(|f| format!("{}: R^2 = {:.5}", f.shape, f.r2))
        .collect();
    let summary = format!(
        "growth: {} samples, p = {}\nshape fits: {}\n",
        config.ensemble.n_samples,
        section.p,
        fits.join("; ")
    );
    Ok(Outcome {
        warnings: Vec::new(),
        summary,
    })
}

fn correctors(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<Outcome> {
    let section = config.correctors.clone().unwrap_or_default();
    let tol = config.solver.tol;
    let d = config.env.dimension;
    for &dir in &section.directions {
        if dir >= d {
            bail!("direction {dir} out of range for d={d}");
        }
    }

    struct Row {
        sample: usize,
        seed: u64,
        direction: usize,
        effective_flux: f64,
        harmonic_mean: f64,
        arithmetic_mean: f64,
        residual: f64,
        sigma_residual: f64,
        divergence_gap: f64,
    }

    let directions = section.directions.clone();
    let rows: Vec<Vec<Row>> = run_ensemble(
        &config.env,
        config.ensemble.n_samples,
        config.threads(),
        |k, s| {
            let env = Environment::sample(s)?;
            let n = env.torus().vertex_count();
            let mut out_rows = Vec::new();
            for &dir in &directions {
                let mut bundle = compute_corrector(&env, dir, tol)?;
                compute_flux_corrector(&env, &mut bundle)?;
                let edges: Vec<f64> = (0..n).map(|x| env.conductance(dir, x)).collect();
                let arith = edges.iter().sum::<f64>() / n as f64;
                let harm = n as f64 / edges.iter().map(|a| 1.0 / a).sum::<f64>();
                let sigma_residual = bundle
                    .sigma
                    .iter()
                    .map(|s| s.residual)
                    .fold(0.0f64, f64::max);
                let divergence_gap = if bundle.sigma.is_empty() {
                    0.0
                } else {
                    let div = sigma_divergence(&env, &bundle);
                    let mut worst = 0.0f64;
                    let mut scale = 0.0f64;
                    for dd in 0..env.torus().dim() {
                        let mean: f64 =
                            bundle.flux.component(dd).iter().sum::<f64>() / n as f64;
                        for x in 0..n {
                            let want = bundle.flux.at(dd, x) - mean;
                            worst = worst.max((div.at(dd, x) - want).abs());
                            scale = scale.max(want.abs());
                        }
                    }
                    if scale > 0.0 {
                        worst / scale
                    } else {
                        0.0
                    }
                };
                out_rows.push(Row {
                    sample: k,
                    seed: s.seed,
                    direction: dir,
                    effective_flux: bundle.effective_flux(),
                    harmonic_mean: harm,
                    arithmetic_mean: arith,
                    residual: bundle.phi_report.final_residual,
                    sigma_residual,
                    divergence_gap,
                });
            }
            Ok(out_rows)
        },
    )?;

    let mut csv = out.csv(
        "correctors.csv",
        &[
            "sample",
            "seed",
            "direction",
            "effective_flux",
            "harmonic_mean",
            "arithmetic_mean",
            "residual",
            "sigma_residual",
            "divergence_gap",
        ],
    )?;
    let mut warnings = Vec::new();
    let mut bracket_violations = 0usize;
    for row in rows.iter().flatten() {
        if row.effective_flux > row.arithmetic_mean + 1e-9
            || row.effective_flux < row.harmonic_mean - 1e-9
        {
            bracket_violations += 1;
        }
        csv.row(&[
            row.sample.to_string(),
            row.seed.to_string(),
            row.direction.to_string(),
            fmt(row.effective_flux),
            fmt(row.harmonic_mean),
            fmt(row.arithmetic_mean),
            fmt(row.residual),
            fmt(row.sigma_residual),
            fmt(row.divergence_gap),
        ])?;
    }
    csv.finish()?;
    if bracket_violations > 0 {
        warnings.push(format!(
            "{bracket_violations} effective-flux values left the Voigt-Reuss bracket"
        ));
    }

    // massive sweep and sub-linearity on the first sample
    let mut jsonl = out.jsonl("records.jsonl")?;
    let first = Environment::sample(&sample_spec(&config.env, 0))?;
    for &t in &section.massive_t {
        let (phi_t, report) = compute_massive_corrector(&first, section.directions[0], t, tol)?;
        jsonl.record(
            "massive",
            serde_json::json!({
                "t": t,
                "sup_norm": phi_t.linf_norm(),
                "iterations": report.iterations,
            }),
        )?;
    }
    let mut bundle0 = compute_corrector(&first, section.directions[0], tol)?;
    compute_flux_corrector(&first, &mut bundle0)?;
    let n_list: Vec<f64> = {
        let mut v = Vec::new();
        let mut n = 2.0;
        while n <= config.env.box_side as f64 / 4.0 {
            v.push(n);
            n *= 2.0;
        }
        v
    };
    let sub = sublinearity_check(first.torus(), &bundle0, &n_list)?;
    jsonl.record("sublinearity", &sub)?;
    jsonl.finish()?;

    let summary = format!(
        "correctors: {} samples x {} directions, tol {:.1e}\nVoigt-Reuss bracket violations: {}\nsub-linearity slope (first sample): {:.3}\n",
        config.ensemble.n_samples,
        section.directions.len(),
        tol,
        bracket_violations,
        sub.slope
    );
    Ok(Outcome { warnings, summary })
}

fn scales(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<Outcome> {
    let section = config.scales.clone().unwrap_or_default();
    let tol = config.solver.tol;
    let d = config.env.dimension;
    let n_fields = section.field_samples.min(config.ensemble.n_samples);

    struct FieldStats {
        sample: usize,
        diamond_max: f64,
        diamond_censored: f64,
        spade_max: f64,
        spade_censored: f64,
        post_check_ratio: f64,
        post_check_pass: bool,
        tail: Vec<(u32, usize, f64)>,
        vertices: usize,
    }

    let c_spade = section.c_spade;
    let stats: Vec<FieldStats> = run_ensemble(&config.env, n_fields, config.threads(), |k, s| {
        let env = Environment::sample(s)?;
        let rd = compute_r_diamond(&env, diamond_check_constant(d))?;
        let post = rcmlab_core::scales::r_diamond_post_check(&env, &rd)?;
        let bundles: Vec<_> = (0..d)
            .map(|dir| compute_corrector(&env, dir, tol))
            .collect::<Result<_, _>>()?;
        let rs = compute_r_spade(&env, &bundles, c_spade, &rd)?;
        Ok(FieldStats {
            sample: k,
            diamond_max: rd.max_radius(),
            diamond_censored: rd.censored_fraction(),
            spade_max: rs.max_radius(),
            spade_censored: rs.censored_fraction(),
            post_check_ratio: post.lhs,
            post_check_pass: post.pass,
            tail: rd.tail_histogram_raw(),
            vertices: rd.radii.len(),
        })
    })?;

    let mut csv = out.csv(
        "scales.csv",
        &[
            "sample",
            "diamond_max",
            "diamond_censored_fraction",
            "spade_max",
            "spade_censored_fraction",
            "post_check_ratio",
            "post_check_pass",
        ],
    )?;
    for s in &stats {
        csv.row(&[
            s.sample.to_string(),
            fmt(s.diamond_max),
            fmt(s.diamond_censored),
            fmt(s.spade_max),
            fmt(s.spade_censored),
            fmt(s.post_check_ratio),
            s.post_check_pass.to_string(),
        ])?;
    }
    csv.finish()?;

    // pooled diamond tail histogram
    let total_vertices: usize = stats.iter().map(|s| s.vertices).sum();
    let mut pooled: std::collections::BTreeMap<u32, usize> = Default::default();
    for s in &stats {
        for &(m, count, _) in &s.tail {
            *pooled.entry(m).or_default() += count;
        }
    }
    let mut tail_csv = out.csv("rdiamond_tail.csv", &["m", "count", "log2_tail_prob"])?;
    for (&m, &count) in &pooled {
        tail_csv.row(&[
            m.to_string(),
            count.to_string(),
            fmt((count as f64 / total_vertices as f64).log2()),
        ])?;
    }
    tail_csv.finish()?;

    let mut jsonl = out.jsonl("records.jsonl")?;
    let mut warnings = Vec::new();
    let mut worst_censored = 0.0f64;
    for s in &stats {
        jsonl.record(
            "scale_sample",
            serde_json::json!({
                "sample": s.sample,
                "diamond_censored": s.diamond_censored,
                "spade_censored": s.spade_censored,
                "post_check_pass": s.post_check_pass,
            }),
        )?;
        worst_censored = worst_censored.max(s.diamond_censored).max(s.spade_censored);
        if !s.post_check_pass {
            warnings.push(format!("sample {}: r_diamond post-check failed", s.sample));
        }
    }
    if worst_censored > 0.0 {
        warnings.push(format!(
            "censored fraction up to {worst_censored:.4} (finite-box truncation of the radius sup)"
        ));
    }
    jsonl.finish()?;

    let summary = format!(
        "scales: {n_fields} environments, C_spade = {}\nworst censored fraction {worst_censored:.4}\npooled tail rows: {}\n",
        section.c_spade,
        pooled.len()
    );
    Ok(Outcome { warnings, summary })
}

fn sensitivity(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<Outcome> {
    let section = config.sensitivity.clone().unwrap_or_default();
    let tol = config.solver.tol;
    let torus = config.env.validate().map_err(|e| anyhow!("{e}"))?;
    let d = torus.dim();
    if section.check != "f1" && d < 2 {
        bail!("F2 checks need dimension >= 2");
    }

    let mut jsonl = out.jsonl("records.jsonl")?;
    let mut csv = out.csv(
        "sensitivity.csv",
        &["trial", "identity", "vertex", "direct", "formula", "relative_gap", "pass"],
    )?;
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for trial in 0..section.trials {
        let spec = sample_spec(&config.env, trial);
        let env = Environment::sample(&spec)?;
        let mut r = rng::stream(spec.seed, Purpose::Draw, 1);
        let x = r.gen_range(0..torus.vertex_count());
        let mut g = VectorField::zeros(d, torus.vertex_count());
        g.set(r.gen_range(0..d), r.gen_range(0..torus.vertex_count()), 1.0);
        let env_x = env.resample_vertex(x, trial as u64);

        if section.check == "f1" || section.check == "both" {
            let rep = representation_check_f1(&env, &env_x, x, 0, &g, tol)?;
            worst = worst.max(rep.relative_gap);
            failures += usize::from(!rep.pass);
            csv.row(&[
                trial.to_string(),
                "f1".to_string(),
                x.to_string(),
                fmt(rep.direct),
                fmt(rep.formula),
                fmt(rep.relative_gap),
                rep.pass.to_string(),
            ])?;
            jsonl.record("representation_f1", &rep)?;
        }
        if (section.check == "f2" || section.check == "both") && d >= 2 {
            let rep = representation_check_f2(&env, &env_x, x, 0, 0, 1, &g, tol)?;
            worst = worst.max(rep.relative_gap);
            failures += usize::from(!rep.pass);
            csv.row(&[
                trial.to_string(),
                "f2".to_string(),
                x.to_string(),
                fmt(rep.direct),
                fmt(rep.formula),
                fmt(rep.relative_gap),
                rep.pass.to_string(),
            ])?;
            jsonl.record("representation_f2", &rep)?;
        }
    }
    csv.finish()?;
    jsonl.finish()?;

    let warnings = if failures > 0 {
        vec![format!("{failures} representation checks failed")]
    } else {
        Vec::new()
    };
    let summary = format!(
        "sensitivity: {} trials ({}), worst relative gap {worst:.3e}, failures {failures}\n",
        section.trials, section.check
    );
    if failures > 0 {
        bail!("representation identities failed on {failures} trials: they are exact, so this is a solver or indexing bug");
    }
    Ok(Outcome { warnings, summary })
}

fn green(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<Outcome> {
    let section = config.green.as_ref().unwrap();
    let torus = config.env.validate().map_err(|e| anyhow!("{e}"))?;
    if torus.dim() < 2 {
        bail!("green experiment needs dimension >= 2");
    }
    let mut csv = out.csv("green_norms.csv", &["distance", "gradient_l2_norm"])?;
    let mut jsonl = out.jsonl("records.jsonl")?;
    let mut pairs = Vec::new();
    for &k in &section.offsets {
        let x = torus.index(&[k, 0, 0]);
        let gd = green_difference(&torus, x)?;
        let norm = gd.gradient.l2_norm();
        csv.row(&[fmt(k as f64), fmt(norm)])?;
        pairs.push((k as f64, norm));
        if k == *section.offsets.last().unwrap() {
            let profile = gradient_decay_profile(&torus, &gd);
            jsonl.record("decay_profile", &profile)?;
        }
    }
    csv.finish()?;

    // representation check on one sampled environment
    let env = Environment::sample(&sample_spec(&config.env, 0))?;
    let bundle = compute_corrector(&env, 0, config.solver.tol.min(1e-9))?;
    let x = torus.index(&[section.offsets[0], 0, 0]);
    let rep = representation_phi_check(&torus, &bundle, x, config.solver.tol)?;
    jsonl.record("green_representation", &rep)?;
    jsonl.finish()?;

    let summary = format!(
        "green: norms at {} offsets; representation gap {:.3e} (pass: {})\n",
        section.offsets.len(),
        rep.relative_gap,
        rep.pass
    );
    let warnings = if rep.pass {
        Vec::new()
    } else {
        vec!["green representation check failed".into()]
    };
    Ok(Outcome { warnings, summary })
}

fn meyers(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<Outcome> {
    let tol = config.solver.tol;
    let d = config.env.dimension;
    let env = Environment::sample(&sample_spec(&config.env, 0))?;
    let torus = env.torus();
    let n = torus.vertex_count();

    let rd = compute_r_diamond(&env, diamond_check_constant(d))?;
    let bundle = compute_corrector(&env, 0, tol)?;
    let mut f = VectorField::zeros(d, n);
    for x in 0..n {
        f.set(0, x, env.conductance(0, x));
    }

    let mut jsonl = out.jsonl("records.jsonl")?;
    let mut warnings = Vec::new();

    // reverse Hölder + Gehring pipeline
    let (u_field, v_field, s) = meyers_fields(&env, &bundle.grad_phi, &f, &rd)?;
    let gehring = gehring_probe(torus, &u_field, &v_field, 1.0 / s)?;
    let beta_hat = s * gehring.q_bar;
    jsonl.record("gehring", &gehring)?;
    jsonl.record(
        "meyers",
        serde_json::json!({"s": s, "q_bar": gehring.q_bar, "beta_hat": beta_hat}),
    )?;
    if !gehring.applicable {
        warnings.push("reverse-Hölder input inequality not satisfied on the grid".into());
    }
    if beta_hat <= 1.0 {
        warnings.push(format!("Meyers exponent beta {beta_hat:.3} did not exceed 1"));
    }

    // Caccioppoli + hole filling + averaged Sobolev probes on the instance
    let mut probes: Vec<ProbeReport> = Vec::new();
    for r in [4.0, 8.0] {
        probes.push(check_caccioppoli(&env, &bundle.phi, &f, 0, r)?);
    }
    let mut harmonic = bundle.grad_phi.clone();
    for x in 0..n {
        harmonic.set(0, x, harmonic.at(0, x) + 1.0);
    }
    let hole = check_hole_filling(&env, &harmonic, 0, (config.env.box_side / 4) as f64, &rd)?;
    jsonl.record("hole_filling", &hole)?;
    if !hole.pass {
        warnings.push(format!("hole-filling exponent {:.3} not positive", hole.alpha_hat));
    }
    let sobolev = avg_sobolev_probe(torus, &bundle.phi, 8.0, 0.5, 3.0, 1.5)?;
    jsonl.record("avg_sobolev", &sobolev)?;
    if !sobolev.pass {
        warnings.push(format!(
            "averaged Sobolev constant {:.3} beyond the calibrated cap",
            sobolev.constant
        ));
    }
    let mut csv = out.csv("probes.csv", &["probe", "lhs", "rhs", "ratio", "pass"])?;
    for p in &probes {
        csv.row(&[
            p.probe.clone(),
            fmt(p.lhs),
            fmt(p.rhs),
            fmt(p.ratio),
            p.pass.to_string(),
        ])?;
        jsonl.record("probe", p)?;
        if !p.pass {
            warnings.push(format!("{} probe failed with ratio {:.3}", p.probe, p.ratio));
        }
    }
    csv.finish()?;
    jsonl.finish()?;

    let summary = format!(
        "meyers: s = {s:.4}, q_bar = {:.4}, beta_hat = {beta_hat:.4}\nhole-filling exponent {:.3}; Sobolev constant {:.3}\n",
        gehring.q_bar, hole.alpha_hat, sobolev.constant
    );
    Ok(Outcome { warnings, summary })
}

fn spectral_gap(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<Outcome> {
    let section = config.spectral_gap.clone().unwrap_or_default();
    let torus = config.env.validate().map_err(|e| anyhow!("{e}"))?;
    let observable = match section.observable.as_str() {
        "single-edge" => Observable::SingleEdge { edge: section.edge },
        _ => {
            let mut g = VectorField::zeros(torus.dim(), torus.vertex_count());
            g.set(0, section.edge % torus.vertex_count(), 1.0);
            Observable::F1 { direction: 0, g }
        }
    };
    let mode = match section.mode.as_str() {
        "exhaustive" => SpectralGapMode::Exhaustive,
        _ => SpectralGapMode::MonteCarlo {
            n_samples: config.ensemble.n_samples,
        },
    };
    let report = spectral_gap_check(&observable, &config.env, mode, config.solver.tol)?;

    let mut jsonl = out.jsonl("records.jsonl")?;
    jsonl.record("spectral_gap", &report)?;
    jsonl.finish()?;
    let mut csv = out.csv("spectral_gap.csv", &["p", "lhs", "rhs", "ratio"])?;
    csv.row(&[
        "variance".into(),
        fmt(report.variance),
        fmt(report.bound),
        fmt(if report.bound > 0.0 {
            report.variance / report.bound
        } else {
            0.0
        }),
    ])?;
    for &(p, lhs, rhs, ratio) in &report.moment_checks {
        csv.row(&[fmt(p), fmt(lhs), fmt(rhs), fmt(ratio)])?;
    }
    csv.finish()?;

    let margin = report.bound - report.variance;
    let summary = format!(
        "spectral-gap ({}, {}): Var {:.6e} <= bound {:.6e} (margin {margin:.3e}); {} configurations\n",
        section.mode, section.observable, report.variance, report.bound, report.configurations
    );
    if !report.pass {
        bail!(
            "spectral-gap inequality failed: Var {} > bound {}",
            report.variance,
            report.bound
        );
    }
    Ok(Outcome {
        warnings: Vec::new(),
        summary,
    })
}

/// Write the sampled environment of ensemble member 0 in the binary format.
pub fn env_dump(config: &ExperimentConfig, out: &OutputDir) -> anyhow::Result<String> {
    let env = Environment::sample(&config.env).context("sampling environment")?;
    let path = out.path("environment.rcme");
    rcmlab_core::io::write_environment(&path, &env)?;
    Ok(format!(
        "wrote {} ({} edges)",
        path.display(),
        env.edges().len()
    ))
}
