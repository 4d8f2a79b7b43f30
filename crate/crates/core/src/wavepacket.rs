//! Single-particle Gaussian packets built from positive-band modes, and the
//! local intervention `chi -> F chi` followed by re-projection.

use log::warn;

use crate::error::{Error, Result};
use crate::freebasis::{metric_density, BandBasis};
use crate::lattice::Lattice;
use crate::linalg::{C64, ZERO};
use crate::potentials::{intervention_profile, InterventionParams};
use crate::spectral::Spectral;

/// Positive-band amplitudes `G_k` and the lattice amplitude
/// `chi(x) = sum_k G_k v_k(x)`.
#[derive(Debug, Clone)]
pub struct WavePacket {
    pub amplitudes: Vec<C64>,
    pub chi: Vec<C64>,
    pub x0: f64,
    pub p0: f64,
    /// Spatial width parameter of the Gaussian.
    pub width: f64,
}

impl WavePacket {
    /// Builds a packet from arbitrary positive-band amplitudes, normalizing
    /// them to unit norm.
    pub fn from_amplitudes(basis: &BandBasis, mut amplitudes: Vec<C64>, x0: f64, p0: f64, width: f64) -> Result<Self> {
        let n = basis.lattice().sites();
        if amplitudes.len() != n {
            return Err(Error::Mismatch(format!(
                "{} amplitudes for {n} modes",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::param("packet", "amplitudes vanish"));
        }
        for g in &mut amplitudes {
            *g /= norm;
        }
        let spectral = Spectral::new(basis.lattice());
        let chi = spectral.synthesize(basis, &amplitudes, &vec![ZERO; n]);
        Ok(Self {
            amplitudes,
            chi,
            x0,
            p0,
            width,
        })
    }

    /// `chi^dagger sigma chi` on the lattice.
    pub fn density(&self, basis: &BandBasis) -> Vec<f64> {
        metric_density(basis.model(), &self.chi)
    }

    /// Metric-weighted mean position.
    pub fn mean_position(&self, basis: &BandBasis) -> f64 {
        let lattice = basis.lattice();
        let rho = self.density(basis);
        let q: f64 = rho.iter().sum();
        rho.iter()
            .enumerate()
            .map(|(j, r)| r * lattice.position(j))
            .sum::<f64>()
            / q
    }
}

/// Gaussian packet `G_k ~ exp(-(p_k - p0)^2 w^2) exp(-i x0 p_k)`.
pub fn gaussian_packet(basis: &BandBasis, x0: f64, p0: f64, width: f64) -> Result<WavePacket> {
    let lattice = basis.lattice();
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::param("packet.w_sigma", "must be positive"));
    }
    if !x0.is_finite() || !p0.is_finite() {
        return Err(Error::param("packet", "x0 and p0 must be finite"));
    }
    if !lattice.resolves_packet(p0, width) {
        warn!(
            "aliasing guard: pi/dx = {:.3} does not exceed p0 + 6/w = {:.3}",
            lattice.max_momentum(),
            p0.abs() + 6.0 / width
        );
    }
    let amplitudes: Vec<C64> = lattice
        .momenta()
        .into_iter()
        .map(|p| C64::from_polar((-(p - p0).powi(2) * width * width).exp(), -x0 * p))
        .collect();
    let packet = WavePacket::from_amplitudes(basis, amplitudes, x0, p0, width)?;
    if let Some(tail) = boundary_tail(lattice, &packet.density(basis)) {
        warn!("packet density {tail:.3e} at the lattice boundary exceeds 1e-10");
    }
    Ok(packet)
}

fn boundary_tail(lattice: &Lattice, rho: &[f64]) -> Option<f64> {
    let n = lattice.sites();
    let tail = rho[0].abs().max(rho[n - 1].abs());
    (tail > 1e-10).then_some(tail)
}

/// Outcome of reshaping a packet inside the intervention region.
#[derive(Debug, Clone)]
pub struct InterventionResult {
    /// The re-projected, renormalized packet.
    pub packet: WavePacket,
    /// `F chi` before projection.
    pub reshaped: Vec<C64>,
    /// `f` sampled on the lattice.
    pub profile: Vec<f64>,
    /// Magnitude of the metric norm carried by the discarded negative band.
    pub leakage: f64,
    /// `dx sum_{x in D} f chi^dagger sigma chi`.
    pub condi_residual: f64,
    /// Factor applied to the projected amplitudes to restore unit norm.
    pub renormalization: f64,
}

/// Multiplies `chi` by `F = sqrt(1 + f)`, keeps the positive-band part, and
/// renormalizes.
pub fn apply_intervention(
    packet: &WavePacket,
    basis: &BandBasis,
    intervention: &InterventionParams,
) -> Result<InterventionResult> {
    let lattice = basis.lattice();
    let n = lattice.sites();
    let mut reshaped = packet.chi.clone();
    let mut profile = vec![0.0; n];
    for j in 0..n {
        let (f, big_f) = intervention_profile(lattice.position(j), intervention)?;
        profile[j] = f;
        reshaped[j] *= big_f;
        reshaped[n + j] *= big_f;
    }
    let rho = packet.density(basis);
    let condi_residual = lattice.dx() * profile.iter().zip(&rho).map(|(f, r)| f * r).sum::<f64>();

    let spectral = Spectral::new(lattice);
    let (plus, minus) = spectral.overlaps(basis, &reshaped);
    let leakage: f64 = minus.iter().map(|z| z.norm_sqr()).sum();
    let kept: f64 = plus.iter().map(|z| z.norm_sqr()).sum();
    let renormalization = 1.0 / kept.sqrt();
    let projected = WavePacket::from_amplitudes(basis, plus, packet.x0, packet.p0, packet.width)?;
    Ok(InterventionResult {
        packet: projected,
        reshaped,
        profile,
        leakage,
        condi_residual,
        renormalization,
    })
}
