//! End-to-end CLI tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn rcmlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcmlab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const CLT_SMOKE: &str = r#"
[experiment]
kind = "clt-scan"
output_dir = "out"

[env]
dimension = 2
box_side = 32
seed = 11

[env.distribution]
kind = "uniform"
lambda = 0.5

[solver]
tol = 1e-7

[ensemble]
n_samples = 8

[clt]
radii = [2.0, 3.0, 4.0]
p_list = [2.0]
"#;

#[test]
fn validate_accepts_good_configs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "good.toml", CLT_SMOKE);
    let out = rcmlab(&["validate", &config], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("OK"));
}

#[test]
fn malformed_config_names_the_key_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = CLT_SMOKE.replace("seed = 11", "seed = \"eleven\"");
    let config = write_config(dir.path(), "bad.toml", &bad);
    let out = rcmlab(&["validate", &config], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("seed") || stderr.contains("integer"),
        "diagnostic does not name the key: {stderr}"
    );

    // unknown keys are rejected too
    let unknown = CLT_SMOKE.replace("[clt]", "[clt]\nwarp_drive = 9");
    let config = write_config(dir.path(), "unknown.toml", &unknown);
    let out = rcmlab(&["validate", &config], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warp_drive"));
}

#[test]
fn clt_scan_smoke_produces_stamped_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "clt.toml", CLT_SMOKE);
    let out = rcmlab(&["run", &config], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("slope"), "summary lacks slope: {stdout}");

    let results = dir.path().join("out");
    for file in ["cr_samples.csv", "records.jsonl", "summary.txt"] {
        assert!(results.join(file).is_file(), "{file} missing");
    }
    let csv = std::fs::read_to_string(results.join("cr_samples.csv")).unwrap();
    assert!(csv.starts_with("# config_hash="), "hash header missing");
    let jsonl = std::fs::read_to_string(results.join("records.jsonl")).unwrap();
    assert!(jsonl.lines().next().unwrap().contains("config_hash"));
}

#[test]
fn reruns_are_bitwise_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "clt.toml", CLT_SMOKE);
    assert!(rcmlab(&["run", &config], dir.path()).status.success());
    let first_csv = std::fs::read(dir.path().join("out/cr_samples.csv")).unwrap();
    let first_jsonl = std::fs::read(dir.path().join("out/records.jsonl")).unwrap();
    assert!(rcmlab(&["run", &config], dir.path()).status.success());
    assert_eq!(first_csv, std::fs::read(dir.path().join("out/cr_samples.csv")).unwrap());
    assert_eq!(
        first_jsonl,
        std::fs::read(dir.path().join("out/records.jsonl")).unwrap()
    );
}

#[test]
fn spectral_gap_exhaustive_records_margin() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[experiment]
kind = "spectral-gap"
output_dir = "out"

[env]
dimension = 1
box_side = 4
seed = 0

[env.distribution]
kind = "bernoulli"
p = 0.5
lo = 1.0
hi = 2.0

[solver]
tol = 1e-10

[spectral_gap]
mode = "exhaustive"
observable = "f1"
edge = 1
"#;
    let config = write_config(dir.path(), "sg.toml", body);
    let out = rcmlab(&["run", &config], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("margin"), "{stdout}");
    assert!(stdout.contains("16 configurations"), "{stdout}");
}

#[test]
fn heavy_tail_moments_exit_with_warning_code() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[experiment]
kind = "clt-scan"
output_dir = "out"

[env]
dimension = 2
box_side = 32
seed = 3

[env.distribution]
kind = "pareto-symmetric"
gamma_star = 8.0

[ensemble]
n_samples = 6

[clt]
radii = [2.0, 4.0]
p_list = [2.0, 8.0]
"#;
    let config = write_config(dir.path(), "heavy.toml", body);
    let out = rcmlab(&["run", &config], dir.path());
    assert_eq!(out.status.code(), Some(2), "expected pass-with-warnings");
    assert!(String::from_utf8_lossy(&out.stdout).contains("NON-CONVERGENT"));
}

#[test]
fn env_dump_writes_the_binary_format() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "clt.toml", CLT_SMOKE);
    let out = rcmlab(&["env-dump", &config], dir.path());
    assert!(out.status.success());
    let bytes = std::fs::read(dir.path().join("out/environment.rcme")).unwrap();
    assert_eq!(&bytes[0..4], b"RCME");
    let d = u16::from_le_bytes([bytes[4], bytes[5]]) as usize;
    let l = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    assert_eq!((d, l), (2, 32));
    assert_eq!(bytes.len(), 16 + 8 * d * l * l);
}

#[test]
fn plot_emits_figures_and_rejects_empty_dirs() {
    let dir = tempfile::tempdir().unwrap();
    // missing dir: error names it
    let out = rcmlab(&["plot", "does-not-exist"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does-not-exist"));

    // after a clt run: one figure per p
    let config = write_config(dir.path(), "clt.toml", CLT_SMOKE);
    assert!(rcmlab(&["run", &config], dir.path()).status.success());
    let out = rcmlab(&["plot", "out"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let figure = dir.path().join("out/figure_cr_vs_r_p2.csv");
    let content = std::fs::read_to_string(&figure).unwrap();
    let mut lines = content.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    assert_eq!(lines.next().unwrap(), "x,y,ci_lo,ci_hi");
    assert_eq!(lines.count(), 3); // three radii
}

#[test]
fn growth_plot_includes_reference_curve() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[experiment]
kind = "growth"
output_dir = "out"

[env]
dimension = 2
box_side = 32
seed = 7

[env.distribution]
kind = "uniform"
lambda = 0.5

[ensemble]
n_samples = 6

[growth]
offsets = [1, 2, 4]
"#;
    let config = write_config(dir.path(), "growth.toml", body);
    let run = rcmlab(&["run", &config], dir.path());
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(rcmlab(&["plot", "out"], dir.path()).status.success());
    let content = std::fs::read_to_string(dir.path().join("out/figure_growth.csv")).unwrap();
    // d=2 reference column is the sqrt-log shape
    assert!(content.lines().nth(1).unwrap().contains("sqrt_log1p"));
}
