use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use causal_tunnel::output::parse_snapshot_csv;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causal-tunnel"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = "
[lattice]
length = 25.6
sites = 64

[barrier]
kappa = 1.6

[packet]
x0 = -6.0
w_sigma = 2.0

[time]
t_max = 1.0
snapshot_every = 0.5
";

#[test]
fn malformed_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[barrier]\nheight = 2.5\nsmoothnes = 0.4\n");
    let out = bin(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("smoothnes"), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn invalid_value_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[lattice]\nsites = 500\n");
    let out = bin(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn free_kg_run_has_no_antiparticle_density() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[lattice]\nsites = 256\n[time]\nt_max = 1.0\nsnapshot_every = 0.5\n",
    );
    let out_dir = dir.path().join("out");
    let out = bin(&[
        "run",
        "--preset",
        "free",
        "--model",
        "kg",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for i in 0..3 {
        let text = fs::read_to_string(out_dir.join(format!("snapshot_{i:04}.csv"))).unwrap();
        let t = parse_snapshot_csv(&text).unwrap();
        assert_eq!(t.model, "kg");
        assert_eq!(t.x.len(), 256);
        assert!(t.rho_minus.iter().all(|v| v.abs() < 1e-10));
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["passed"], true);
    assert_eq!(manifest["config"]["model"], "klein-gordon");
    assert_eq!(manifest["config"]["preset"], "free");
    assert!(manifest["build"]["git_revision"].is_string());
    assert!(manifest["reproducibility"]["threads"].as_u64().unwrap() >= 1);
}

#[test]
fn verify_free_dirac_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("kappa = 1.6", "V0 = 0.0"));
    let report = dir.path().join("report.json");
    let out = bin(&["verify", "--config", &cfg, "--report", report.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["passed"], true);
    assert_eq!(r["model"], "dirac");
    let inv = &r["invariants"];
    for key in ["max_pseudo_unitarity", "max_completeness", "max_commutator_offdiag", "max_diagonal_error"] {
        assert!(inv[key].as_f64().unwrap() < 1e-10, "{key}: {}", inv[key]);
    }
}

#[test]
fn verify_kg_barrier_completeness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = bin(&["verify", "--config", &cfg, "--model", "kg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["model"], "kg");
    assert!(r["invariants"]["max_completeness"].as_f64().unwrap() < 1e-8);
}

#[test]
fn broken_metric_fails_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = bin(&["verify", "--config", &cfg, "--break-metric"]);
    assert_eq!(out.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["passed"], false);
    assert_eq!(r["break_metric"], true);
}

#[test]
fn lightcone_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{SMALL}\n[intervention]\ncenter = -6.0\namplitude_scale = 1000.0\n"),
    );
    let out_dir = dir.path().join("lc");
    let out = bin(&["lightcone", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("max growth"), "{stdout}");
    for f in ["lightcone.csv", "lightcone_half_dt.csv", "lightcone.json"] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }
    let text = fs::read_to_string(out_dir.join("lightcone.csv")).unwrap();
    assert!(text.starts_with("t,x_plus,sup_outside,sup_inside,ratio,leakage_budget\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn presets_list_and_show() {
    let out = bin(&["presets", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["free", "subklein", "klein", "paper-dirac", "paper-kg"] {
        assert!(text.contains(name), "{name}");
    }
    let out = bin(&["presets", "show", "paper-kg"]);
    assert!(out.status.success());
    let shown = String::from_utf8_lossy(&out.stdout);
    let cfg = causal_tunnel::RunConfig::from_toml_str(&shown).unwrap();
    assert_eq!(cfg, causal_tunnel::scenarios::preset("paper-kg").unwrap());
    assert_eq!(bin(&["presets", "show", "nope"]).status.code(), Some(2));
}
