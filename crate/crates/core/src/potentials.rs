//! Smooth barrier and the compact intervention profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Smoothed rectangular barrier
/// `V(x) = V0/2 [tanh((x + d/2)/kappa) - tanh((x - d/2)/kappa)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BarrierParams {
    /// Height `V0` in `mc^2`.
    #[serde(alias = "V0")]
    pub height: f64,
    /// Width `d` in Compton wavelengths.
    #[serde(alias = "d")]
    pub width: f64,
    /// Edge smoothness `kappa` in Compton wavelengths.
    #[serde(alias = "kappa")]
    pub smoothness: f64,
}

impl Default for BarrierParams {
    fn default() -> Self {
        Self {
            height: 2.5,
            width: 3.0,
            smoothness: 0.2,
        }
    }
}

impl BarrierParams {
    pub fn validate(&self) -> Result<()> {
        if !self.height.is_finite() {
            return Err(Error::param("barrier.height", "must be finite"));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::param("barrier.width", "must be positive"));
        }
        if !(self.smoothness > 0.0 && self.smoothness.is_finite()) {
            return Err(Error::param("barrier.smoothness", "must be positive"));
        }
        Ok(())
    }

    pub fn left_edge(&self) -> f64 {
        -0.5 * self.width
    }

    pub fn right_edge(&self) -> f64 {
        0.5 * self.width
    }

    pub fn at(&self, x: f64) -> f64 {
        barrier_profile(x, self)
    }

    /// Samples the barrier on the lattice. The edges must span at least four
    /// sites (`kappa >= 4 dx`) for the spectral step to resolve them.
    pub fn sample(&self, lattice: &Lattice) -> Result<Vec<f64>> {
        self.validate()?;
        if self.height != 0.0 && self.smoothness < 4.0 * lattice.dx() {
            return Err(Error::param(
                "barrier.smoothness",
                format!(
                    "kappa = {} is below 4 dx = {}",
                    self.smoothness,
                    4.0 * lattice.dx()
                ),
            ));
        }
        Ok(lattice.positions().into_iter().map(|x| self.at(x)).collect())
    }
}

pub fn barrier_profile(x: f64, params: &BarrierParams) -> f64 {
    let h = 0.5 * params.width;
    let k = params.smoothness;
    0.5 * params.height * (((x + h) / k).tanh() - ((x - h) / k).tanh())
}

/// Intervention `f(x) = a sin^13(s (x - c))` on the window `|x - c| <= D/2`,
/// with `F(x) = sqrt(1 + f(x))` multiplying the packet amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterventionParams {
    /// Support width `D`.
    #[serde(alias = "D")]
    pub width: f64,
    /// Support center `c`.
    pub center: f64,
    /// Amplitude multiplier `a >= 0`.
    pub amplitude_scale: f64,
    /// Sine argument multiplier `s`.
    pub argument_scale: f64,
}

impl Default for InterventionParams {
    fn default() -> Self {
        Self {
            width: 1.0,
            center: -15.0,
            amplitude_scale: 1.0,
            argument_scale: 1.0,
        }
    }
}

impl InterventionParams {
    pub fn left_edge(&self) -> f64 {
        self.center - 0.5 * self.width
    }

    /// Right edge `x_+` of the support, where the light cone starts.
    pub fn right_edge(&self) -> f64 {
        self.center + 0.5 * self.width
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() <= 0.5 * self.width
    }

    pub fn validate(&self, barrier: Option<&BarrierParams>) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::param("intervention.width", "must be positive"));
        }
        if !self.center.is_finite() {
            return Err(Error::param("intervention.center", "must be finite"));
        }
        if !(self.amplitude_scale >= 0.0 && self.amplitude_scale.is_finite()) {
            return Err(Error::param(
                "intervention.amplitude_scale",
                "must be nonnegative",
            ));
        }
        if !self.argument_scale.is_finite() {
            return Err(Error::param("intervention.argument_scale", "must be finite"));
        }
        if let Some(b) = barrier {
            if self.right_edge() >= b.left_edge() {
                return Err(Error::param(
                    "intervention.center",
                    format!(
                        "support ends at {} which is not left of the barrier edge {}",
                        self.right_edge(),
                        b.left_edge()
                    ),
                ));
            }
        }
        // 1 + f >= 0 over the support; |sin^13| <= sin^13 of the largest argument
        // reached, bounded by 1.
        let worst = self.max_abs_f();
        if worst > 1.0 {
            return Err(Error::param(
                "intervention.amplitude_scale",
                format!("1 + f reaches {} < 0", 1.0 - worst),
            ));
        }
        Ok(())
    }

    /// `max |f|` over the support.
    pub fn max_abs_f(&self) -> f64 {
        let half = 0.5 * self.width * self.argument_scale.abs();
        let peak = if half >= std::f64::consts::FRAC_PI_2 {
            1.0
        } else {
            half.sin()
        };
        self.amplitude_scale * peak.powi(13)
    }
}

/// Returns `(f(x), F(x))`; fails if `1 + f(x) < 0`.
pub fn intervention_profile(x: f64, params: &InterventionParams) -> Result<(f64, f64)> {
    if !params.contains(x) {
        return Ok((0.0, 1.0));
    }
    let f = params.amplitude_scale * (params.argument_scale * (x - params.center)).sin().powi(13);
    if 1.0 + f < 0.0 {
        return Err(Error::param(
            "intervention.amplitude_scale",
            format!("1 + f({x}) = {} is negative", 1.0 + f),
        ));
    }
    Ok((f, (1.0 + f).sqrt()))
}

/// Samples `f` on the lattice.
pub fn sample_intervention(lattice: &Lattice, params: &InterventionParams) -> Result<Vec<f64>> {
    lattice
        .positions()
        .into_iter()
        .map(|x| intervention_profile(x, params).map(|(f, _)| f))
        .collect()
}
