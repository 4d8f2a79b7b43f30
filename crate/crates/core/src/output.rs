//! Snapshot CSV/JSON files, the light-cone report, and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::causality::{LightConeReport, MicrocausalityReport};
use crate::config::{OutputFormat, RunConfig};
use crate::densities::DensityField;
use crate::error::{Error, Result};
use crate::freebasis::ParticleModel;
use crate::lattice::Lattice;
use crate::runner::{thread_count, InterventionSummary, InvariantReport, RunOutcome};

pub const SNAPSHOT_COLUMNS: [&str; 6] = ["x", "rho_plus", "rho_minus", "rho", "rho_plus_vac", "rho_minus_vac"];
pub const LIGHTCONE_COLUMNS: [&str; 6] = ["t", "x_plus", "sup_outside", "sup_inside", "ratio", "leakage_budget"];

/// Snapshot file body: `# t=`, `# model=` header lines, then one row per
/// site with 17 significant digits.
pub fn snapshot_csv(lattice: &Lattice, model: ParticleModel, field: &DensityField) -> String {
    let mut out = String::with_capacity(lattice.sites() * 6 * 25);
    let _ = writeln!(out, "# t={:.16e}", field.time);
    let _ = writeln!(out, "# model={}", model.short_name());
    out.push_str(&SNAPSHOT_COLUMNS.join(","));
    out.push('\n');
    for j in 0..lattice.sites() {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            lattice.position(j),
            field.rho_plus[j],
            field.rho_minus[j],
            field.rho[j],
            field.rho_plus_vac[j],
            field.rho_minus_vac[j]
        );
    }
    out
}

/// Parsed snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotTable {
    pub time: f64,
    pub model: String,
    pub x: Vec<f64>,
    pub rho_plus: Vec<f64>,
    pub rho_minus: Vec<f64>,
    pub rho: Vec<f64>,
    pub rho_plus_vac: Vec<f64>,
    pub rho_minus_vac: Vec<f64>,
}

pub fn parse_snapshot_csv(text: &str) -> Result<SnapshotTable> {
    let bad = |msg: String| Error::Mismatch(format!("snapshot csv: {msg}"));
    let mut time = None;
    let mut model = None;
    let mut header_seen = false;
    let mut cols: [Vec<f64>; 6] = Default::default();
    for (i, line) in text.lines().enumerate() {
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            if let Some(t) = meta.strip_prefix("t=") {
                time = Some(t.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", i + 1)))?);
            } else if let Some(m) = meta.strip_prefix("model=") {
                model = Some(m.to_string());
            }
            continue;
        }
        if !header_seen {
            if line != SNAPSHOT_COLUMNS.join(",") {
                return Err(bad(format!("unexpected header `{line}`")));
            }
            header_seen = true;
            continue;
        }
        let values: Vec<&str> = line.split(',').collect();
        if values.len() != 6 {
            return Err(bad(format!("line {} has {} fields", i + 1, values.len())));
        }
        for (col, v) in cols.iter_mut().zip(values) {
            col.push(v.parse().map_err(|e| bad(format!("line {}: {e}", i + 1)))?);
        }
    }
    let [x, rho_plus, rho_minus, rho, rho_plus_vac, rho_minus_vac] = cols;
    Ok(SnapshotTable {
        time: time.ok_or_else(|| bad("missing `# t=` line".into()))?,
        model: model.ok_or_else(|| bad("missing `# model=` line".into()))?,
        x,
        rho_plus,
        rho_minus,
        rho,
        rho_plus_vac,
        rho_minus_vac,
    })
}

pub fn lightcone_csv(reports: &[LightConeReport]) -> String {
    let mut out = LIGHTCONE_COLUMNS.join(",");
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.time, r.x_plus, r.sup_outside, r.sup_inside, r.ratio, r.leakage_budget
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotSummary {
    pub index: usize,
    pub time: f64,
    pub charge: f64,
    pub antiparticle_number: f64,
    pub vacuum_particle_number: f64,
    pub vacuum_antiparticle_number: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pseudo_unitarity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub microcausality: Option<MicrocausalityReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildStamp {
    pub package: &'static str,
    pub version: &'static str,
    pub git_revision: String,
}

impl BuildStamp {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            git_revision: git_revision(),
        }
    }
}

/// `git rev-parse HEAD` of the working directory, or `"unknown"`.
pub fn git_revision() -> String {
    std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "unknown".to_string())
}

/// Reduction settings that, together with the config, fix every output bit.
#[derive(Debug, Clone, Serialize)]
pub struct Reproducibility {
    pub threads: usize,
    /// Mode columns per partial sum in the vacuum reductions; partials are
    /// combined in a fixed order.
    pub reduction_chunk: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub build: BuildStamp,
    pub config: RunConfig,
    pub invariants: InvariantReport,
    pub passed: bool,
    pub snapshots: Vec<SnapshotSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervention: Option<InterventionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lightcone_passed: Option<bool>,
    pub wrap_limit: Option<f64>,
    pub wall_clock_seconds: f64,
    pub reproducibility: Reproducibility,
    pub files: Vec<PathBuf>,
}

fn summaries(outcome: &RunOutcome) -> Vec<SnapshotSummary> {
    outcome
        .snapshots
        .iter()
        .enumerate()
        .map(|(index, s)| SnapshotSummary {
            index,
            time: s.field.time,
            charge: s.field.charge,
            antiparticle_number: s.field.antiparticle_number,
            vacuum_particle_number: s.field.vacuum_particle_number(),
            vacuum_antiparticle_number: s.field.vacuum_antiparticle_number(),
            pseudo_unitarity: s.pseudo_unitarity,
            microcausality: s.microcausality.clone(),
        })
        .collect()
}

impl Manifest {
    pub fn new(outcome: &RunOutcome, files: Vec<PathBuf>) -> Self {
        Self {
            build: BuildStamp::current(),
            config: outcome.config.clone(),
            invariants: outcome.invariants.clone(),
            passed: outcome.invariants.passed(),
            snapshots: summaries(outcome),
            intervention: outcome.intervention.clone(),
            lightcone_passed: outcome.lightcone.as_ref().map(|r| r.iter().all(|x| x.passed)),
            wrap_limit: outcome.config.wrap_limit(),
            wall_clock_seconds: outcome.wall_clock_seconds,
            reproducibility: Reproducibility {
                threads: thread_count(),
                reduction_chunk: crate::densities::REDUCTION_CHUNK,
            },
            files,
        }
    }
}

/// Machine-readable outcome of the identity suite.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub build: BuildStamp,
    pub model: String,
    pub sites: usize,
    pub break_metric: bool,
    pub snapshots: Vec<SnapshotSummary>,
    pub invariants: InvariantReport,
    pub passed: bool,
}

impl VerifyReport {
    pub fn new(outcome: &RunOutcome) -> Self {
        Self {
            build: BuildStamp::current(),
            model: outcome.config.model().short_name().to_string(),
            sites: outcome.lattice.sites(),
            break_metric: outcome.config.verify.break_metric,
            snapshots: summaries(outcome),
            invariants: outcome.invariants.clone(),
            passed: outcome.invariants.passed(),
        }
    }
}

fn write(path: PathBuf, body: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, body)?;
    files.push(path);
    Ok(())
}

/// Writes every artifact of `outcome` under `dir` and returns the manifest.
pub fn write_outcome(outcome: &RunOutcome, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let lattice = &outcome.lattice;
    let model = outcome.config.model();
    let formats = &outcome.config.outputs.formats;
    let mut files = Vec::new();
    for (i, s) in outcome.snapshots.iter().enumerate() {
        let runs = std::iter::once(("snapshot", &s.field)).chain(s.intervened.as_ref().map(|f| ("intervened", f)));
        for (stem, field) in runs {
            if formats.contains(&OutputFormat::Csv) {
                write(
                    dir.join(format!("{stem}_{i:04}.csv")),
                    &snapshot_csv(lattice, model, field),
                    &mut files,
                )?;
            }
            if formats.contains(&OutputFormat::Json) {
                write(
                    dir.join(format!("{stem}_{i:04}.json")),
                    &serde_json::to_string(field)?,
                    &mut files,
                )?;
            }
        }
    }
    if let Some(reports) = &outcome.lightcone {
        write(dir.join("lightcone.csv"), &lightcone_csv(reports), &mut files)?;
    }
    let manifest_path = dir.join("manifest.json");
    files.push(manifest_path.clone());
    let manifest = Manifest::new(outcome, files);
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}
