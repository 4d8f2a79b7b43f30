//! Run configuration. Files are TOML with one table per section; any section
//! or key may be omitted and falls back to the desk-scale defaults, or to the
//! named preset when the file sets `preset = "<name>"`.
//!
//! ```toml
//! preset = "klein"
//! model = "kg"
//!
//! [time]
//! t_max = 6.0
//!
//! [intervention]
//! amplitude_scale = 1000.0
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{step_count, wrap_guard};
use crate::freebasis::{ParticleModel, Species};
use crate::lattice::Lattice;
use crate::potentials::{BarrierParams, InterventionParams};
use crate::scenarios;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Preset the file was layered on, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub model: Species,
    pub lattice: LatticeConfig,
    pub time: TimeConfig,
    pub barrier: BarrierParams,
    pub packet: PacketConfig,
    pub intervention: InterventionConfig,
    pub outputs: OutputConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: None,
            model: Species::Dirac,
            lattice: LatticeConfig::default(),
            time: TimeConfig::default(),
            barrier: BarrierParams {
                smoothness: 0.4,
                ..BarrierParams::default()
            },
            packet: PacketConfig::default(),
            intervention: InterventionConfig::default(),
            outputs: OutputConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub length: f64,
    pub sites: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            length: 50.0,
            sites: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_max: f64,
    pub snapshot_every: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_max: 10.0,
            snapshot_every: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketConfig {
    pub x0: f64,
    pub p0: f64,
    pub w_sigma: f64,
}

impl Default for PacketConfig {
    fn default() -> Self {
        Self {
            x0: -15.0,
            // E(p0) = 2.5 mc^2, the barrier height
            p0: (2.5f64 * 2.5 - 1.0).sqrt(),
            w_sigma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterventionConfig {
    pub enabled: bool,
    #[serde(alias = "D")]
    pub width: f64,
    pub center: f64,
    pub amplitude_scale: f64,
    pub argument_scale: f64,
}

impl Default for InterventionConfig {
    fn default() -> Self {
        let p = InterventionParams::default();
        Self {
            enabled: false,
            width: p.width,
            center: p.center,
            amplitude_scale: p.amplitude_scale,
            argument_scale: p.argument_scale,
        }
    }
}

impl InterventionConfig {
    pub fn params(&self) -> InterventionParams {
        InterventionParams {
            width: self.width,
            center: self.center,
            amplitude_scale: self.amplitude_scale,
            argument_scale: self.argument_scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// `U^dagger Sigma U = Sigma` at every snapshot.
    pub pseudo_unitarity: bool,
    /// Bogoliubov completeness and the equal-time commutator at every
    /// snapshot. Costs two dense `2N x 2N` products per snapshot.
    pub microcausality: bool,
    /// Test hook: evaluate the identities with the wrong statistics sign so
    /// that they must fail.
    pub break_metric: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            pseudo_unitarity: true,
            microcausality: false,
            break_metric: false,
        }
    }
}

impl RunConfig {
    /// Parses a config file body. Unknown keys and type errors are reported
    /// with their line.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::parse(text, None)
    }

    /// Parses a config body layered over `preset` (which takes precedence
    /// over a `preset` key in the text).
    pub fn parse(text: &str, preset: Option<&str>) -> Result<Self> {
        // the first pass checks the file on its own, so errors carry spans
        let plain: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        // the second layers it over the preset (or the desk defaults) so that
        // partial sections inherit the base values
        let base = match preset.or(plain.preset.as_deref()) {
            Some(name) => scenarios::preset(name)?,
            None => RunConfig::default(),
        };
        let mut merged = toml::Table::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
        let overlay: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        merge_tables(&mut merged, canonical_keys(overlay));
        if let Some(name) = preset {
            merged.insert("preset".into(), toml::Value::String(name.into()));
        }
        merged.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path, preset: Option<&str>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, preset).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn model(&self) -> ParticleModel {
        ParticleModel::from_species(self.model)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.lattice.length, self.lattice.sites)
    }

    /// Snapshot times `0, every, 2 every, ...` up to and including `t_max`.
    pub fn snapshot_times(&self) -> Result<Vec<f64>> {
        let dt = self.time.dt;
        let last = step_count(self.time.t_max, dt)?;
        let stride = step_count(self.time.snapshot_every, dt)?;
        if stride == 0 {
            return Err(Error::param("time.snapshot_every", "must be positive"));
        }
        let mut steps: Vec<usize> = (0..=last).step_by(stride).collect();
        if *steps.last().unwrap() != last {
            steps.push(last);
        }
        Ok(steps.into_iter().map(|s| s as f64 * dt).collect())
    }

    /// Checks every parameter against the owning module's invariants.
    pub fn validate(&self) -> Result<()> {
        let lattice = self.lattice()?;
        self.snapshot_times()?;
        self.barrier.sample(&lattice)?;
        let p = &self.packet;
        if !(p.w_sigma > 0.0 && p.w_sigma.is_finite()) {
            return Err(Error::param("packet.w_sigma", "must be positive"));
        }
        if !p.x0.is_finite() || !p.p0.is_finite() {
            return Err(Error::param("packet", "x0 and p0 must be finite"));
        }
        if p.x0.abs() >= 0.5 * lattice.length() {
            return Err(Error::param("packet.x0", "lies outside the box"));
        }
        if self.intervention.enabled {
            self.intervention.params().validate(Some(&self.barrier))?;
        }
        if self.outputs.formats.is_empty() {
            return Err(Error::param("outputs.formats", "list at least one format"));
        }
        Ok(())
    }

    /// Latest safe time against periodic wrap-around, when `t_max` exceeds it.
    pub fn wrap_limit(&self) -> Option<f64> {
        let lattice = self.lattice().ok()?;
        wrap_guard(&lattice, self.time.t_max, self.packet.x0, self.barrier.width)
    }
}

/// Field aliases accepted in files, by section.
const ALIASES: [(&str, &str, &str); 4] = [
    ("barrier", "V0", "height"),
    ("barrier", "d", "width"),
    ("barrier", "kappa", "smoothness"),
    ("intervention", "D", "width"),
];

fn canonical_keys(mut table: toml::Table) -> toml::Table {
    for (section, alias, name) in ALIASES {
        if let Some(toml::Value::Table(t)) = table.get_mut(section) {
            if let Some(v) = t.remove(alias) {
                t.insert(name.to_string(), v);
            }
        }
    }
    table
}

fn merge_tables(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}
