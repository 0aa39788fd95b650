//! Plot-data emission: turns a results directory into per-figure CSVs with
//! uniform `(x, y, ci_lo, ci_hi)` columns.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use serde_json::Value;

pub fn emit_plot_data(results_dir: &Path) -> anyhow::Result<Vec<String>> {
    if !results_dir.is_dir() {
        bail!("results directory {} does not exist", results_dir.display());
    }
    let mut emitted = Vec::new();

    let records = read_jsonl(results_dir)?;
    let hash = records
        .iter()
        .find(|r| r["record"] == "header")
        .and_then(|r| r["config_hash"].as_str())
        .unwrap_or("unknown")
        .to_string();

    // C_R vs R, one file per p
    let cr_norms: Vec<&Value> = records.iter().filter(|r| r["record"] == "cr_norm").collect();
    if !cr_norms.is_empty() {
        let mut by_p: BTreeMap<u64, Vec<&Value>> = BTreeMap::new();
        for rec in cr_norms {
            let p = rec["p"].as_f64().unwrap_or(0.0);
            by_p.entry(p.to_bits()).or_default().push(rec);
        }
        for (bits, rows) in by_p {
            let p = f64::from_bits(bits);
            let name = format!("figure_cr_vs_r_p{p}.csv");
            let mut w = figure_writer(results_dir, &name, &hash, &["x", "y", "ci_lo", "ci_hi"])?;
            for rec in rows {
                writeln!(
                    w,
                    "{},{},{},{}",
                    rec["radius"], rec["phi"]["value"], rec["phi"]["ci_lo"], rec["phi"]["ci_hi"]
                )?;
            }
            w.flush()?;
            emitted.push(name);
        }
    }

    // growth curve with the shape reference column
    let growth_src = results_dir.join("growth_curve.csv");
    if growth_src.is_file() {
        let name = "figure_growth.csv";
        let content = std::fs::read_to_string(&growth_src)?;
        let mut lines = content.lines();
        let _hash_line = lines.next();
        let header = lines.next().unwrap_or_default();
        let reference_name = header.split(',').nth(4).unwrap_or("reference");
        let mut w = figure_writer(
            results_dir,
            name,
            &hash,
            &["x", "y", "ci_lo", "ci_hi", reference_name],
        )?;
        for line in lines {
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        emitted.push(name.to_string());
    }

    // r_diamond tail histogram
    let tail_src = results_dir.join("rdiamond_tail.csv");
    if tail_src.is_file() {
        let name = "figure_rdiamond_tail.csv";
        let content = std::fs::read_to_string(&tail_src)?;
        let mut w = figure_writer(results_dir, name, &hash, &["x", "y", "ci_lo", "ci_hi"])?;
        for line in content.lines().skip(2) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() == 3 {
                writeln!(w, "{},{},{},{}", cols[0], cols[2], cols[2], cols[2])?;
            }
        }
        w.flush()?;
        emitted.push(name.to_string());
    }

    // hole-filling energy sweep
    if let Some(hole) = records.iter().find(|r| r["record"] == "hole_filling") {
        let name = "figure_holefilling.csv";
        let mut w = figure_writer(results_dir, name, &hash, &["x", "y", "ci_lo", "ci_hi"])?;
        if let Some(pairs) = hole["energies"].as_array() {
            for pair in pairs {
                let r = &pair[0];
                let e = &pair[1];
                writeln!(w, "{r},{e},{e},{e}")?;
            }
        }
        w.flush()?;
        emitted.push(name.to_string());
    }

    // Green gradient norms
    let green_src = results_dir.join("green_norms.csv");
    if green_src.is_file() {
        let name = "figure_green_norm.csv";
        let content = std::fs::read_to_string(&green_src)?;
        let mut w = figure_writer(results_dir, name, &hash, &["x", "y", "ci_lo", "ci_hi"])?;
        for line in content.lines().skip(2) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() == 2 {
                writeln!(w, "{},{},{},{}", cols[0], cols[1], cols[1], cols[1])?;
            }
        }
        w.flush()?;
        emitted.push(name.to_string());
    }

    if emitted.is_empty() {
        bail!(
            "no plottable results found in {}: run an experiment first",
            results_dir.display()
        );
    }
    Ok(emitted)
}

fn read_jsonl(dir: &Path) -> anyhow::Result<Vec<Value>> {
    let path = dir.join("records.jsonl");
    if !path.is_file() {
        return Ok(Vec::new());
    }
    let reader = BufReader::new(File::open(&path)?);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(
            serde_json::from_str(&line)
                .with_context(|| format!("malformed JSON line in {}", path.display()))?,
        );
    }
    Ok(records)
}

fn figure_writer(
    dir: &Path,
    name: &str,
    hash: &str,
    columns: &[&str],
) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "# config_hash={hash} schema=v1")?;
    writeln!(w, "{}", columns.join(","))?;
    Ok(w)
}
