//! Named presets and the physics expectations attached to them.

use serde::Serialize;

use crate::config::RunConfig;
use crate::densities::DensityField;
use crate::error::{Error, Result};
use crate::freebasis::{dispersion, Species};
use crate::lattice::Lattice;
use crate::runner::RunOutcome;

/// Property a scenario run is expected to show.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Expectation {
    /// `rho_-` and both vacuum densities below `tol` everywhere.
    FreeNull { tol: f64 },
    /// Centroid velocity of the packet density within `rel_tol` of
    /// `p0 / E(p0)`.
    GroupVelocity { rel_tol: f64 },
    /// `N_-(t) > threshold` and nondecreasing over snapshots with `t >= from`.
    PairCreation { threshold: f64, from: f64 },
    /// `N_-(t) < threshold` at every snapshot.
    NoPairCreation { threshold: f64 },
    /// Packet charge beyond the barrier's right edge exceeds `threshold` at
    /// the final snapshot.
    Transmission { threshold: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioCheck {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    pub config: RunConfig,
    pub expectations: Vec<Expectation>,
}

impl Scenario {
    pub fn evaluate(&self, outcome: &RunOutcome) -> Vec<ScenarioCheck> {
        self.expectations.iter().map(|e| evaluate(e, outcome)).collect()
    }
}

pub const PRESET_NAMES: [&str; 5] = ["free", "subklein", "klein", "paper-dirac", "paper-kg"];

/// Every preset with its description.
pub fn catalogue() -> Vec<Scenario> {
    PRESET_NAMES.iter().map(|n| scenario(n).expect("listed presets exist")).collect()
}

pub fn preset(name: &str) -> Result<RunConfig> {
    scenario(name).map(|s| s.config)
}

pub fn scenario(name: &str) -> Result<Scenario> {
    let mut cfg = RunConfig {
        preset: Some(name.to_string()),
        ..RunConfig::default()
    };
    let (description, expectations) = match name {
        "free" => {
            cfg.barrier.height = 0.0;
            cfg.verify.microcausality = true;
            (
                "no barrier: nothing but the packet moves",
                vec![
                    Expectation::FreeNull { tol: 1e-10 },
                    Expectation::GroupVelocity { rel_tol: 0.01 },
                ],
            )
        }
        "subklein" => {
            cfg.barrier.height = 0.5;
            // E(p0) = 1.28 < V0 + m: the packet is reflected
            cfg.packet.p0 = 0.8;
            cfg.verify.microcausality = true;
            (
                "barrier below the pair threshold, sub-barrier packet",
                vec![Expectation::NoPairCreation { threshold: 1e-6 }],
            )
        }
        "klein" => {
            cfg.verify.microcausality = true;
            cfg.intervention.enabled = true;
            cfg.intervention.amplitude_scale = 1e3;
            (
                "Klein regime at desk scale with an amplified intervention",
                vec![
                    Expectation::PairCreation { threshold: 1e-6, from: 2.0 },
                    Expectation::Transmission { threshold: 1e-6 },
                ],
            )
        }
        "paper-dirac" | "paper-kg" => {
            if name == "paper-kg" {
                cfg.model = Species::KleinGordon;
            }
            cfg.lattice.length = 100.0;
            cfg.lattice.sites = 2048;
            cfg.barrier.smoothness = 0.2;
            cfg.time.dt = 137e-6;
            cfg.time.t_max = 0.137;
            cfg.time.snapshot_every = 0.137;
            cfg.intervention.enabled = true;
            (
                "L=100, N=2048, kappa=0.2 with a single snapshot at t=0.137",
                Vec::new(),
            )
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}` (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(Scenario {
        name: PRESET_NAMES.iter().find(|n| **n == name).copied().unwrap_or("custom"),
        description,
        config: cfg,
        expectations,
    })
}

/// Packet part of the charge density, `rho - (rho_+^vac - rho_-^vac)`.
pub fn packet_charge_density(field: &DensityField) -> Vec<f64> {
    field
        .rho
        .iter()
        .zip(field.vacuum_charge_density())
        .map(|(r, v)| r - v)
        .collect()
}

/// Charge-weighted mean position of the packet.
pub fn packet_centroid(lattice: &Lattice, field: &DensityField) -> f64 {
    let rho = packet_charge_density(field);
    let q: f64 = rho.iter().sum();
    rho.iter()
        .enumerate()
        .map(|(j, r)| r * lattice.position(j))
        .sum::<f64>()
        / q
}

pub fn evaluate(expectation: &Expectation, outcome: &RunOutcome) -> ScenarioCheck {
    let fields = outcome.fields();
    let lattice = &outcome.lattice;
    let check = |name: &str, value: f64, threshold: f64, passed: bool| ScenarioCheck {
        name: name.to_string(),
        value,
        threshold,
        passed,
    };
    match *expectation {
        Expectation::FreeNull { tol } => {
            let worst = fields
                .iter()
                .flat_map(|f| f.rho_minus.iter().chain(&f.rho_plus_vac).chain(&f.rho_minus_vac))
                .fold(0.0f64, |m, v| m.max(v.abs()));
            check("free null: max |rho_-|, |rho_vac|", worst, tol, worst < tol)
        }
        Expectation::GroupVelocity { rel_tol } => {
            let (first, last) = (fields[0], fields[fields.len() - 1]);
            let span = last.time - first.time;
            let v = (packet_centroid(lattice, last) - packet_centroid(lattice, first)) / span;
            let p0 = outcome.config.packet.p0;
            let vg = p0 / dispersion(p0);
            let rel = (v - vg).abs() / vg;
            check("group velocity: |v - p0/E| / (p0/E)", rel, rel_tol, rel < rel_tol)
        }
        Expectation::PairCreation { threshold, from } => {
            let n: Vec<f64> = fields
                .iter()
                .filter(|f| f.time >= from - 1e-12)
                .map(|f| f.antiparticle_number)
                .collect();
            let min = n.iter().copied().fold(f64::INFINITY, f64::min);
            let monotone = n.windows(2).all(|w| w[1] >= w[0]);
            check(
                "pair creation: min N_- (nondecreasing)",
                min,
                threshold,
                !n.is_empty() && min > threshold && monotone,
            )
        }
        Expectation::NoPairCreation { threshold } => {
            let max = fields.iter().map(|f| f.antiparticle_number).fold(0.0, f64::max);
            check("no pair creation: max N_-", max, threshold, max < threshold)
        }
        Expectation::Transmission { threshold } => {
            let last = fields[fields.len() - 1];
            let edge = outcome.config.barrier.right_edge();
            let rho = packet_charge_density(last);
            let transmitted = lattice.dx()
                * rho
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| lattice.position(*j) > edge)
                    .map(|(_, r)| r)
                    .sum::<f64>();
            check(
                "transmission: packet charge beyond the barrier",
                transmitted,
                threshold,
                transmitted > threshold,
            )
        }
    }
}
