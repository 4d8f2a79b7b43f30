//! Browser demo: barrier and intervention profiles, a packet-only scattering
//! animation with the intervention's light cone, and the vacuum pair-creation
//! curve `N_-(t)` on a small lattice.
//!
//! The computational parts are plain Rust so they can be tested natively; the
//! `#[wasm_bindgen]` layer only converts arguments and errors.

use causal_tunnel::densities::{packet_density, vacuum_density};
use causal_tunnel::evolution::{Evolver, SplitStepper};
use causal_tunnel::freebasis::BandBasis;
use causal_tunnel::linalg::C64;
use causal_tunnel::potentials::sample_intervention;
use causal_tunnel::Result as CtResult;
use causal_tunnel::wavepacket::{apply_intervention, gaussian_packet};
use causal_tunnel::{BarrierParams, InterventionParams, Lattice, ParticleModel, Species};
use wasm_bindgen::prelude::*;

const LENGTH: f64 = 50.0;
const PACKET_X0: f64 = -15.0;
const PACKET_WIDTH: f64 = 1.0;
/// Packet energy `E(p0) = 2.5`.
const PACKET_P0: f64 = 2.291_287_847_477_92;

pub fn species(kg: bool) -> Species {
    if kg {
        Species::KleinGordon
    } else {
        Species::Dirac
    }
}

/// Barrier with the smallest edge smoothness the lattice resolves.
pub fn demo_barrier(lattice: &Lattice, height: f64) -> BarrierParams {
    BarrierParams {
        height,
        width: 3.0,
        smoothness: (4.0 * lattice.dx()).max(0.4),
    }
}

pub fn demo_intervention(amplitude: f64) -> InterventionParams {
    InterventionParams {
        center: PACKET_X0,
        amplitude_scale: amplitude,
        ..InterventionParams::default()
    }
}

/// Static profiles on a shared grid.
#[derive(Debug, Clone)]
pub struct Profiles {
    pub x: Vec<f64>,
    pub barrier: Vec<f64>,
    pub intervention: Vec<f64>,
    pub packet: Vec<f64>,
    pub intervened: Vec<f64>,
    pub leakage: f64,
}

pub fn profiles(kg: bool, sites: usize, height: f64, amplitude: f64) -> CtResult<Profiles> {
    let lattice = Lattice::new(LENGTH, sites)?;
    let basis = BandBasis::new(&lattice, ParticleModel::from_species(species(kg)));
    let barrier = demo_barrier(&lattice, height);
    let params = demo_intervention(amplitude);
    params.validate(Some(&barrier))?;
    let packet = gaussian_packet(&basis, PACKET_X0, PACKET_P0, PACKET_WIDTH)?;
    let reshaped = apply_intervention(&packet, &basis, &params)?;
    Ok(Profiles {
        x: lattice.positions(),
        barrier: barrier.sample(&lattice)?,
        intervention: sample_intervention(&lattice, &params)?,
        packet: packet.density(&basis),
        intervened: reshaped.packet.density(&basis),
        leakage: reshaped.leakage,
    })
}

/// Original and intervened packets stepped side by side without the vacuum,
/// which is common to both and drops out of their difference.
pub struct Scatter {
    basis: BandBasis,
    stepper: SplitStepper,
    original: Vec<C64>,
    intervened: Vec<C64>,
    scratch: Vec<C64>,
    steps: usize,
    window: (f64, f64),
}

impl Scatter {
    pub fn new(kg: bool, sites: usize, height: f64, amplitude: f64, dt: f64) -> CtResult<Self> {
        let lattice = Lattice::new(LENGTH, sites)?;
        let model = ParticleModel::from_species(species(kg));
        let basis = BandBasis::new(&lattice, model);
        let barrier = demo_barrier(&lattice, height);
        let params = demo_intervention(amplitude);
        params.validate(Some(&barrier))?;
        let packet = gaussian_packet(&basis, PACKET_X0, PACKET_P0, PACKET_WIDTH)?;
        let reshaped = apply_intervention(&packet, &basis, &params)?;
        let stepper = SplitStepper::new(&lattice, model, &barrier.sample(&lattice)?, dt)?;
        Ok(Self {
            scratch: stepper.scratch(),
            original: packet.chi,
            intervened: reshaped.packet.chi,
            basis,
            stepper,
            steps: 0,
            window: (params.left_edge(), params.right_edge()),
        })
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.stepper.dt()
    }

    pub fn advance(&mut self, steps: usize) {
        self.stepper.advance(&mut self.original, steps, &mut self.scratch);
        self.stepper.advance(&mut self.intervened, steps, &mut self.scratch);
        self.steps += steps;
    }

    /// Packet charge densities `(rho, rho~)` at the current time.
    pub fn densities(&self) -> CtResult<(Vec<f64>, Vec<f64>)> {
        let t = self.time();
        let charge = |chi: &[C64]| {
            packet_density(chi, &self.basis, t).map(|d| d.plus.iter().zip(&d.minus).map(|(p, m)| p - m).collect())
        };
        Ok((charge(&self.original)?, charge(&self.intervened)?))
    }

    /// Edges of the forward light cone of the intervention window.
    pub fn cone(&self) -> (f64, f64) {
        let t = self.time();
        (self.window.0 - t, self.window.1 + t)
    }

    pub fn positions(&self) -> Vec<f64> {
        self.basis.lattice().positions()
    }
}

/// `(t, N_-(t))` for the vacuum alone on a 64-site lattice, where the full
/// propagator is cheap enough to build in the browser.
pub fn pair_curve(kg: bool, height: f64, t_max: f64, samples: usize) -> CtResult<Vec<(f64, f64)>> {
    let lattice = Lattice::new(25.6, 64)?;
    let model = ParticleModel::from_species(species(kg));
    let basis = BandBasis::new(&lattice, model);
    let barrier = BarrierParams {
        height,
        width: 3.0,
        smoothness: 1.6,
    };
    let dt = 5e-3;
    let stride = ((t_max / samples.max(1) as f64) / dt).round().max(1.0) as usize;
    let mut evolver = Evolver::new(&lattice, model, &barrier.sample(&lattice)?, dt)?;
    let mut curve = vec![(0.0, 0.0)];
    for k in 1..=samples {
        let t = (k * stride) as f64 * dt;
        let prop = evolver.advance_to(t)?;
        let vac = vacuum_density(prop, &basis)?;
        curve.push((t, lattice.dx() * vac.minus.iter().sum::<f64>()));
    }
    Ok(curve)
}

fn js(e: causal_tunnel::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = Profiles)]
pub struct JsProfiles(Profiles);

#[wasm_bindgen(js_class = Profiles)]
impl JsProfiles {
    #[wasm_bindgen(constructor)]
    pub fn new(kg: bool, sites: usize, height: f64, amplitude: f64) -> Result<JsProfiles, JsError> {
        profiles(kg, sites, height, amplitude).map(JsProfiles).map_err(js)
    }
    pub fn x(&self) -> Vec<f64> {
        self.0.x.clone()
    }
    pub fn barrier(&self) -> Vec<f64> {
        self.0.barrier.clone()
    }
    pub fn intervention(&self) -> Vec<f64> {
        self.0.intervention.clone()
    }
    pub fn packet(&self) -> Vec<f64> {
        self.0.packet.clone()
    }
    pub fn intervened(&self) -> Vec<f64> {
        self.0.intervened.clone()
    }
    pub fn leakage(&self) -> f64 {
        self.0.leakage
    }
}

#[wasm_bindgen(js_name = Scatter)]
pub struct JsScatter {
    inner: Scatter,
    rho: Vec<f64>,
    rho_tilde: Vec<f64>,
}

#[wasm_bindgen(js_class = Scatter)]
impl JsScatter {
    #[wasm_bindgen(constructor)]
    pub fn new(kg: bool, sites: usize, height: f64, amplitude: f64, dt: f64) -> Result<JsScatter, JsError> {
        let inner = Scatter::new(kg, sites, height, amplitude, dt).map_err(js)?;
        let (rho, rho_tilde) = inner.densities().map_err(js)?;
        Ok(JsScatter { inner, rho, rho_tilde })
    }
    /// Steps both packets and refreshes the cached densities.
    pub fn advance(&mut self, steps: usize) -> Result<(), JsError> {
        self.inner.advance(steps);
        (self.rho, self.rho_tilde) = self.inner.densities().map_err(js)?;
        Ok(())
    }
    pub fn time(&self) -> f64 {
        self.inner.time()
    }
    pub fn x(&self) -> Vec<f64> {
        self.inner.positions()
    }
    pub fn rho(&self) -> Vec<f64> {
        self.rho.clone()
    }
    pub fn rho_tilde(&self) -> Vec<f64> {
        self.rho_tilde.clone()
    }
    pub fn cone_left(&self) -> f64 {
        self.inner.cone().0
    }
    pub fn cone_right(&self) -> f64 {
        self.inner.cone().1
    }
}

/// Flattened `[t0, n0, t1, n1, ...]`.
#[wasm_bindgen(js_name = pairCurve)]
pub fn js_pair_curve(kg: bool, height: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let curve = pair_curve(kg, height, t_max, samples).map_err(js)?;
    Ok(curve.into_iter().flat_map(|(t, n)| [t, n]).collect())
}
