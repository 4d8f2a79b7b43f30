//! Space-time resolved charge densities of a one-particle state over the
//! evolving vacuum.
//!
//! With `P_+`/`P_-` the free band projectors and `U` the propagator,
//!
//! ```text
//! rho_+(x) = sum_q |P_+ U w_q|_sigma^2(x) + |P_+ U chi|_sigma^2(x)
//! rho_-(x) = eps sum_q |P_- U v_q|_sigma^2(x) - |P_- U chi|_sigma^2(x)
//! rho      = rho_+ - rho_-
//! ```
//!
//! where `|psi|_sigma^2 = psi^dagger sigma psi`. The mode sums are the vacuum
//! (pair) parts and do not depend on the packet.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{check_shared, Propagator};
use crate::freebasis::{metric_density, Band, BandBasis};
use crate::linalg::{CMatrix, C64};
use crate::spectral::{band_projectors, Spectral};
use crate::wavepacket::WavePacket;

/// Mode columns per reduction chunk. Partial sums are combined in chunk
/// order, so results do not depend on the thread count.
pub const REDUCTION_CHUNK: usize = 32;

/// Packet-independent pair densities.
#[derive(Debug, Clone, Serialize)]
pub struct VacuumDensity {
    pub time: f64,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl VacuumDensity {
    pub fn zero(time: f64, sites: usize) -> Self {
        Self {
            time,
            plus: vec![0.0; sites],
            minus: vec![0.0; sites],
        }
    }

    /// `<0| rho(x) |0> = rho_+^vac - rho_-^vac`.
    pub fn charge_density(&self) -> Vec<f64> {
        self.plus.iter().zip(&self.minus).map(|(p, m)| p - m).collect()
    }
}

/// Packet contributions to `rho_+` and `rho_-`.
#[derive(Debug, Clone, Serialize)]
pub struct PacketDensity {
    pub time: f64,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityField {
    pub time: f64,
    pub dx: f64,
    pub rho_plus: Vec<f64>,
    pub rho_minus: Vec<f64>,
    pub rho: Vec<f64>,
    pub rho_plus_vac: Vec<f64>,
    pub rho_minus_vac: Vec<f64>,
    /// `dx sum rho`.
    pub charge: f64,
    /// `dx sum rho_-`.
    pub antiparticle_number: f64,
}

impl DensityField {
    pub fn combine(vacuum: &VacuumDensity, packet: &PacketDensity, dx: f64) -> Result<Self> {
        if vacuum.plus.len() != packet.plus.len() {
            return Err(Error::Mismatch("vacuum and packet densities differ in length".into()));
        }
        if (vacuum.time - packet.time).abs() > 1e-12 * vacuum.time.abs().max(1.0) {
            return Err(Error::Mismatch(format!(
                "vacuum at t={} combined with packet at t={}",
                vacuum.time, packet.time
            )));
        }
        let rho_plus: Vec<f64> = vacuum.plus.iter().zip(&packet.plus).map(|(a, b)| a + b).collect();
        let rho_minus: Vec<f64> = vacuum.minus.iter().zip(&packet.minus).map(|(a, b)| a + b).collect();
        let rho: Vec<f64> = rho_plus.iter().zip(&rho_minus).map(|(p, m)| p - m).collect();
        let charge = dx * rho.iter().sum::<f64>();
        let antiparticle_number = dx * rho_minus.iter().sum::<f64>();
        Ok(Self {
            time: vacuum.time,
            dx,
            rho_plus,
            rho_minus,
            rho,
            rho_plus_vac: vacuum.plus.clone(),
            rho_minus_vac: vacuum.minus.clone(),
            charge,
            antiparticle_number,
        })
    }

    /// Builds the full field from a propagator snapshot.
    pub fn from_propagator(propagator: &Propagator, basis: &BandBasis, packet: &WavePacket) -> Result<Self> {
        let vac = vacuum_density(propagator, basis)?;
        let evolved = propagator.apply(&packet.chi);
        let pk = packet_density(&evolved, basis, propagator.time())?;
        Self::combine(&vac, &pk, basis.lattice().dx())
    }

    /// `dx sum rho_+^vac`.
    pub fn vacuum_particle_number(&self) -> f64 {
        self.dx * self.rho_plus_vac.iter().sum::<f64>()
    }

    /// `dx sum rho_-^vac`.
    pub fn vacuum_antiparticle_number(&self) -> f64 {
        self.dx * self.rho_minus_vac.iter().sum::<f64>()
    }

    pub fn vacuum_charge_density(&self) -> Vec<f64> {
        self.rho_plus_vac
            .iter()
            .zip(&self.rho_minus_vac)
            .map(|(p, m)| p - m)
            .collect()
    }
}

/// `Q = dx sum_j rho(x_j)`.
pub fn total_charge(field: &DensityField) -> f64 {
    field.dx * field.rho.iter().sum::<f64>()
}

/// Pair densities from a propagator snapshot.
pub fn vacuum_density(propagator: &Propagator, basis: &BandBasis) -> Result<VacuumDensity> {
    check_shared(propagator, basis)?;
    let modes = propagator.mode_columns(basis);
    vacuum_density_from_modes(propagator.time(), basis, &modes)
}

/// Pair densities from precomputed columns `U v_k`, `U w_k`
/// (see [`Propagator::mode_columns`]).
pub fn vacuum_density_from_modes(time: f64, basis: &BandBasis, modes: &CMatrix) -> Result<VacuumDensity> {
    let n = basis.lattice().sites();
    if modes.dim() != 2 * n {
        return Err(Error::Mismatch("mode matrix dimension".into()));
    }
    let model = basis.model();
    let eps = model.statistic();
    let spectral = Spectral::new(basis.lattice());
    let to_plus = band_projectors(basis, Band::Positive);
    let to_minus = band_projectors(basis, Band::Negative);

    // rho_+^vac sums P_+ U w_q (columns n..2n); rho_-^vac sums P_- U v_q (columns 0..n)
    let chunk_sum = |start: usize| -> (Vec<f64>, Vec<f64>) {
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        let mut scratch = spectral.scratch();
        let mut buf = vec![C64::new(0.0, 0.0); 2 * n];
        for q in start..(start + REDUCTION_CHUNK).min(n) {
            buf.copy_from_slice(modes.column(n + q));
            spectral.project_in_place(&to_plus, &mut buf, &mut scratch);
            for (acc, d) in plus.iter_mut().zip(metric_density(model, &buf)) {
                *acc += d;
            }
            buf.copy_from_slice(modes.column(q));
            spectral.project_in_place(&to_minus, &mut buf, &mut scratch);
            for (acc, d) in minus.iter_mut().zip(metric_density(model, &buf)) {
                *acc += eps * d;
            }
        }
        (plus, minus)
    };

    let starts: Vec<usize> = (0..n).step_by(REDUCTION_CHUNK).collect();
    #[cfg(feature = "parallel")]
    let partials: Vec<(Vec<f64>, Vec<f64>)> = {
        use rayon::prelude::*;
        starts.par_iter().map(|&s| chunk_sum(s)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<(Vec<f64>, Vec<f64>)> = starts.iter().map(|&s| chunk_sum(s)).collect();

    let mut out = VacuumDensity::zero(time, n);
    for (p, m) in partials {
        for j in 0..n {
            out.plus[j] += p[j];
            out.minus[j] += m[j];
        }
    }
    Ok(out)
}

/// Packet terms `(|P_+ psi|^2_sigma, -|P_- psi|^2_sigma)` for the evolved
/// packet `psi = U chi`.
pub fn packet_density(evolved: &[C64], basis: &BandBasis, time: f64) -> Result<PacketDensity> {
    let n = basis.lattice().sites();
    if evolved.len() != 2 * n {
        return Err(Error::Mismatch("evolved packet length".into()));
    }
    let spectral = Spectral::new(basis.lattice());
    let model = basis.model();
    let plus_state = spectral.project(basis, evolved, Band::Positive);
    let minus_state = spectral.project(basis, evolved, Band::Negative);
    Ok(PacketDensity {
        time,
        plus: metric_density(model, &plus_state),
        minus: metric_density(model, &minus_state).into_iter().map(|d| -d).collect(),
    })
}

/// `rho_+` for amplitudes `packet` at the propagator's time.
pub fn density_plus(propagator: &Propagator, basis: &BandBasis, packet: &WavePacket) -> Result<Vec<f64>> {
    Ok(DensityField::from_propagator(propagator, basis, packet)?.rho_plus)
}

/// `rho_-` for amplitudes `packet` at the propagator's time.
pub fn density_minus(propagator: &Propagator, basis: &BandBasis, packet: &WavePacket) -> Result<Vec<f64>> {
    Ok(DensityField::from_propagator(propagator, basis, packet)?.rho_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{bogoliubov_blocks, evolve};
    use crate::freebasis::ParticleModel;
    use crate::lattice::Lattice;
    use crate::potentials::BarrierParams;
    use crate::wavepacket::gaussian_packet;

    fn setup(model: ParticleModel) -> (Lattice, BandBasis, WavePacket, Vec<f64>) {
        let lattice = Lattice::new(25.6, 64).unwrap();
        let basis = BandBasis::new(&lattice, model);
        let packet = gaussian_packet(&basis, -5.0, 1.0, 1.0).unwrap();
        let v = BarrierParams { height: 2.5, width: 3.0, smoothness: 1.6 }.sample(&lattice).unwrap();
        (lattice, basis, packet, v)
    }

    #[test]
    fn time_zero_has_no_pairs() {
        for model in [ParticleModel::dirac(), ParticleModel::klein_gordon()] {
            let (lattice, basis, packet, _) = setup(model);
            let id = Propagator::identity(&lattice, model, 1e-3);
            let f = DensityField::from_propagator(&id, &basis, &packet).unwrap();
            assert!(f.rho_plus_vac.iter().all(|d| d.abs() < 1e-14));
            assert!(f.rho_minus_vac.iter().all(|d| d.abs() < 1e-14));
            assert!(f.rho_minus.iter().all(|d| d.abs() < 1e-14));
            assert!((f.charge - 1.0).abs() < 1e-12);
            assert!((lattice.dx() * f.rho_plus.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(total_charge(&f), f.charge);
        }
    }

    #[test]
    fn free_evolution_has_no_antiparticles() {
        for model in [ParticleModel::dirac(), ParticleModel::klein_gordon()] {
            let (lattice, basis, packet, _) = setup(model);
            let prop = evolve(&lattice, model, &[0.0; 64], 1.0, 1e-3, &[1.0]).unwrap().remove(0);
            let f = DensityField::from_propagator(&prop, &basis, &packet).unwrap();
            assert!(f.rho_minus.iter().all(|d| d.abs() < 1e-10));
            assert!(f.rho_plus_vac.iter().all(|d| d.abs() < 1e-10));
            assert!((lattice.dx() * f.rho_plus.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn barrier_conserves_charge_and_pairs_balance() {
        for model in [ParticleModel::dirac(), ParticleModel::klein_gordon()] {
            let (lattice, basis, packet, v) = setup(model);
            let prop = evolve(&lattice, model, &v, 2.0, 1e-3, &[2.0]).unwrap().remove(0);
            let f = DensityField::from_propagator(&prop, &basis, &packet).unwrap();
            assert!((f.charge - 1.0).abs() < 1e-10, "{model:?}: {}", f.charge);
            assert!(f.vacuum_antiparticle_number() > 1e-8);
            assert!((f.vacuum_particle_number() - f.vacuum_antiparticle_number()).abs() < 1e-8);
            let b = bogoliubov_blocks(&prop, &basis).unwrap();
            assert!((f.vacuum_particle_number() - b.vw_weight()).abs() < 1e-10);
            assert!((f.vacuum_antiparticle_number() - b.wv_weight()).abs() < 1e-10);
            for (a, b) in f.rho.iter().zip(f.rho_plus.iter().zip(&f.rho_minus)) {
                assert_eq!(*a, b.0 - b.1);
            }
        }
    }

    #[test]
    fn dirac_packet_norm_splits_between_bands() {
        let (lattice, basis, packet, v) = setup(ParticleModel::dirac());
        let prop = evolve(&lattice, basis.model(), &v, 2.0, 1e-3, &[2.0]).unwrap().remove(0);
        let psi = prop.apply(&packet.chi);
        let pk = packet_density(&psi, &basis, 2.0).unwrap();
        let dx = lattice.dx();
        let plus: f64 = dx * pk.plus.iter().sum::<f64>();
        let minus: f64 = -dx * pk.minus.iter().sum::<f64>();
        assert!((plus + minus - 1.0).abs() < 1e-10);
        assert!(minus > 0.0);
    }
}
