//! Split-step spectral propagation of the full lattice basis under
//! `H = H0 + V(x)`, and the Bogoliubov blocks of the resulting propagator.
//!
//! States are component-major vectors of length `2N`. A [`Propagator`] holds
//! `U(t) e_b` for each of the `2N` unit vectors `e_b`, so its column-major
//! matrix is `U(t)` in the position-component basis.

pub mod dense;

use log::warn;

use crate::error::{Error, Result};
use crate::freebasis::{free_hamiltonian, Band, BandBasis, ParticleModel};
use crate::lattice::Lattice;
use crate::linalg::{CMatrix, Mat2, C64, I, ZERO};
use crate::spectral::{band_projectors, Spectral};

/// `exp(-i H0(p) dt) = cos(E dt) - i sin(E dt) H0(p)/E`, using `H0^2 = E^2`.
pub fn kinetic_phase(model: ParticleModel, p: f64, dt: f64) -> Mat2 {
    let h = free_hamiltonian(model, p);
    let e = crate::freebasis::dispersion(p);
    let (s, c) = (e * dt).sin_cos();
    Mat2::IDENTITY.scale(C64::from(c)) + h.scale(-I * (s / e))
}

/// Site-wise phases `exp(-i V(x_j) dt)`, identical on both components.
pub fn potential_phase(potential: &[f64], dt: f64) -> Vec<C64> {
    potential
        .iter()
        .map(|&v| C64::from_polar(1.0, -v * dt))
        .collect()
}

/// Number of steps of size `dt` that make up `t`.
pub fn step_count(t: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("time.dt", "must be positive"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("time", format!("invalid time {t}")));
    }
    let n = (t / dt).round();
    if (n * dt - t).abs() > 1e-9 * t.max(dt) {
        return Err(Error::NotStepMultiple { time: t, dt });
    }
    Ok(n as usize)
}

/// Latest time before the fastest front launched from `max(|x0|, d/2)` can
/// wrap around the periodic box, or `None` if `t_max` stays below it.
pub fn wrap_guard(lattice: &Lattice, t_max: f64, x0: f64, barrier_width: f64) -> Option<f64> {
    let allowed = 0.5 * lattice.length() - x0.abs().max(0.5 * barrier_width);
    (t_max >= allowed).then_some(allowed)
}

/// Strang step `P(dt/2) K(dt) P(dt/2)` with `K` applied in momentum space.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    lattice: Lattice,
    model: ParticleModel,
    dt: f64,
    spectral: Spectral,
    /// Kinetic factors per canonical mode, with the `1/N` of the inverse
    /// transform folded in.
    kinetic: Vec<Mat2>,
    half_potential: Vec<C64>,
    full_potential: Vec<C64>,
}

impl SplitStepper {
    pub fn new(lattice: &Lattice, model: ParticleModel, potential: &[f64], dt: f64) -> Result<Self> {
        if potential.len() != lattice.sites() {
            return Err(Error::Mismatch(format!(
                "potential has {} samples for {} sites",
                potential.len(),
                lattice.sites()
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("time.dt", "must be positive"));
        }
        if potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("potential", "must be finite"));
        }
        let inv_n = C64::from(1.0 / lattice.sites() as f64);
        Ok(Self {
            lattice: *lattice,
            model,
            dt,
            spectral: Spectral::new(lattice),
            kinetic: lattice
                .momenta()
                .into_iter()
                .map(|p| kinetic_phase(model, p, dt).scale(inv_n))
                .collect(),
            half_potential: potential_phase(potential, 0.5 * dt),
            full_potential: potential_phase(potential, dt),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn model(&self) -> ParticleModel {
        self.model
    }

    fn apply_potential(phases: &[C64], state: &mut [C64]) {
        let n = phases.len();
        let (upper, lower) = state.split_at_mut(n);
        for ((a, b), ph) in upper.iter_mut().zip(lower.iter_mut()).zip(phases) {
            *a *= ph;
            *b *= ph;
        }
    }

    /// Advances one state by `steps` Strang steps. Adjacent potential
    /// half-steps are merged into full steps.
    pub fn advance(&self, state: &mut [C64], steps: usize, scratch: &mut [C64]) {
        debug_assert_eq!(state.len(), self.lattice.dim());
        if steps == 0 {
            return;
        }
        let n = self.lattice.sites();
        Self::apply_potential(&self.half_potential, state);
        for s in 0..steps {
            self.spectral.forward(state, scratch);
            for (k, m) in self.kinetic.iter().enumerate() {
                let [a, b] = m.apply([state[k], state[n + k]]);
                state[k] = a;
                state[n + k] = b;
            }
            self.spectral.inverse(state, scratch);
            let phases = if s + 1 == steps {
                &self.half_potential
            } else {
                &self.full_potential
            };
            Self::apply_potential(phases, state);
        }
    }

    /// Advances every `2N`-long column of `columns` by `steps` steps.
    pub fn advance_columns(&self, columns: &mut [C64], steps: usize) {
        let dim = self.lattice.dim();
        assert_eq!(columns.len() % dim, 0, "column buffer is not a multiple of 2N");
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            columns
                .par_chunks_mut(dim)
                .for_each_init(|| self.spectral.scratch(), |scratch, col| {
                    self.advance(col, steps, scratch)
                });
        }
        #[cfg(not(feature = "parallel"))]
        {
            let mut scratch = self.spectral.scratch();
            for col in columns.chunks_mut(dim) {
                self.advance(col, steps, &mut scratch);
            }
        }
    }

    pub fn scratch(&self) -> Vec<C64> {
        self.spectral.scratch()
    }
}

/// `U(t)` over the full position-component basis.
#[derive(Debug, Clone)]
pub struct Propagator {
    lattice: Lattice,
    model: ParticleModel,
    time: f64,
    dt: f64,
    steps: usize,
    matrix: CMatrix,
}

impl Propagator {
    pub fn identity(lattice: &Lattice, model: ParticleModel, dt: f64) -> Self {
        Self {
            lattice: *lattice,
            model,
            time: 0.0,
            dt,
            steps: 0,
            matrix: CMatrix::identity(lattice.dim()),
        }
    }

    /// Wraps an externally computed matrix (for oracle comparisons).
    pub fn from_matrix(
        lattice: &Lattice,
        model: ParticleModel,
        time: f64,
        matrix: CMatrix,
    ) -> Result<Self> {
        if matrix.dim() != lattice.dim() {
            return Err(Error::Mismatch(format!(
                "matrix dimension {} for lattice dimension {}",
                matrix.dim(),
                lattice.dim()
            )));
        }
        Ok(Self {
            lattice: *lattice,
            model,
            time,
            dt: 0.0,
            steps: 0,
            matrix,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn model(&self) -> ParticleModel {
        self.model
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `U(t) psi`.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        self.matrix.matvec(psi)
    }

    fn sigma_diagonal(&self, metric: [f64; 2]) -> Vec<f64> {
        let n = self.lattice.sites();
        (0..2 * n).map(|i| metric[i / n]).collect()
    }

    /// `max |U^dagger Sigma U - Sigma|` with `Sigma` the site-wise metric.
    pub fn pseudo_unitarity_residual(&self) -> f64 {
        self.pseudo_unitarity_residual_with(self.model.metric())
    }

    /// Same check against an arbitrary metric diagonal.
    pub fn pseudo_unitarity_residual_with(&self, metric: [f64; 2]) -> f64 {
        let sigma = self.sigma_diagonal(metric);
        let mut su = self.matrix.clone();
        su.scale_rows(&sigma);
        let gram = self.matrix.adjoint().matmul(&su);
        gram.max_abs_diff_diag(&sigma)
    }

    /// Columns `U v_k` (first `N`) and `U w_k` (last `N`) in canonical mode
    /// order.
    pub fn mode_columns(&self, basis: &BandBasis) -> CMatrix {
        let n = self.lattice.sites();
        let dim = 2 * n;
        let spectral = Spectral::new(&self.lattice);
        let mut scratch = spectral.scratch();
        let scale = 1.0 / self.lattice.length().sqrt();
        let x0 = self.lattice.position(0);
        let phases: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(scale, self.lattice.momentum(k) * x0))
            .collect();
        let src = self.matrix.as_slice();
        let mut out = CMatrix::zeros(dim);
        let dst = out.as_mut_slice();
        let mut row = vec![ZERO; dim];
        for r in 0..dim {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = src[b * dim + r];
            }
            // sum_j U[r, (c, j)] e^{i p_k x_j} for both components c
            spectral.inverse(&mut row, &mut scratch);
            for k in 0..n {
                let (a, b) = (row[k], row[n + k]);
                let u = basis.spinor(k, Band::Positive);
                let w = basis.spinor(k, Band::Negative);
                dst[k * dim + r] = phases[k] * (u[0] * a + u[1] * b);
                dst[(n + k) * dim + r] = phases[k] * (w[0] * a + w[1] * b);
            }
        }
        out
    }
}

/// Marches the identity forward and hands out snapshots.
#[derive(Debug)]
pub struct Evolver {
    stepper: SplitStepper,
    current: Propagator,
}

impl Evolver {
    pub fn new(lattice: &Lattice, model: ParticleModel, potential: &[f64], dt: f64) -> Result<Self> {
        let stepper = SplitStepper::new(lattice, model, potential, dt)?;
        Ok(Self {
            current: Propagator::identity(lattice, model, dt),
            stepper,
        })
    }

    pub fn current(&self) -> &Propagator {
        &self.current
    }

    pub fn stepper(&self) -> &SplitStepper {
        &self.stepper
    }

    /// Advances to time `t` (a step multiple not earlier than the current time).
    pub fn advance_to(&mut self, t: f64) -> Result<&Propagator> {
        let target = step_count(t, self.stepper.dt())?;
        if target < self.current.steps {
            return Err(Error::param(
                "snapshots",
                format!("time {t} precedes the current time {}", self.current.time),
            ));
        }
        let delta = target - self.current.steps;
        self.stepper
            .advance_columns(self.current.matrix.as_mut_slice(), delta);
        self.current.steps = target;
        self.current.time = target as f64 * self.stepper.dt();
        Ok(&self.current)
    }

    pub fn into_current(self) -> Propagator {
        self.current
    }
}

/// Propagates the full basis to `t_final`, returning a snapshot at each
/// requested time (sorted ascending, each a step multiple, none beyond
/// `t_final`).
pub fn evolve(
    lattice: &Lattice,
    model: ParticleModel,
    potential: &[f64],
    t_final: f64,
    dt: f64,
    snapshots: &[f64],
) -> Result<Vec<Propagator>> {
    let final_steps = step_count(t_final, dt)?;
    let mut times = snapshots.to_vec();
    times.sort_by(f64::total_cmp);
    for &t in &times {
        if step_count(t, dt)? > final_steps {
            return Err(Error::param(
                "snapshots",
                format!("snapshot {t} lies beyond t_final = {t_final}"),
            ));
        }
    }
    let mut evolver = Evolver::new(lattice, model, potential, dt)?;
    let mut out = Vec::with_capacity(times.len());
    for t in times {
        out.push(evolver.advance_to(t)?.clone());
    }
    Ok(out)
}

/// Warns if the configuration lets fronts wrap around the box.
pub fn check_wrap_guard(lattice: &Lattice, t_max: f64, x0: f64, barrier_width: f64) -> Option<f64> {
    let hit = wrap_guard(lattice, t_max, x0, barrier_width);
    if let Some(t) = hit {
        warn!("wrap-around guard: fronts may reach the periodic boundary from t = {t:.3} (t_max = {t_max})");
    }
    hit
}

/// Overlaps `<a_k, sigma U b_k'>` between free modes, arranged as a
/// `2N x 2N` matrix with rows/columns `v_0..v_{N-1}, w_0..w_{N-1}`.
#[derive(Debug, Clone)]
pub struct BogoliubovBlocks {
    sites: usize,
    statistic: f64,
    matrix: CMatrix,
}

impl BogoliubovBlocks {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn vv(&self, k: usize, kp: usize) -> C64 {
        self.matrix.get(k, kp)
    }

    pub fn vw(&self, k: usize, kp: usize) -> C64 {
        self.matrix.get(k, self.sites + kp)
    }

    pub fn wv(&self, k: usize, kp: usize) -> C64 {
        self.matrix.get(self.sites + k, kp)
    }

    pub fn ww(&self, k: usize, kp: usize) -> C64 {
        self.matrix.get(self.sites + k, self.sites + kp)
    }

    fn block_sq_norm(&self, row_off: usize, col_off: usize) -> f64 {
        let n = self.sites;
        let mut s = 0.0;
        for c in 0..n {
            for r in 0..n {
                s += self.matrix.get(row_off + r, col_off + c).norm_sqr();
            }
        }
        s
    }

    /// `sum |B_vw|^2`: integrated vacuum particle number.
    pub fn vw_weight(&self) -> f64 {
        self.block_sq_norm(0, self.sites)
    }

    /// `sum |B_wv|^2`: integrated vacuum antiparticle number.
    pub fn wv_weight(&self) -> f64 {
        self.block_sq_norm(self.sites, 0)
    }

    /// `max |B eta B^dagger eta - 1|` with `eta = diag(1, epsilon)`.
    pub fn completeness_residual(&self) -> f64 {
        self.completeness_residual_with(self.statistic)
    }

    pub fn completeness_residual_with(&self, statistic: f64) -> f64 {
        let n = self.sites;
        let eta: Vec<f64> = (0..2 * n)
            .map(|i| if i < n { 1.0 } else { statistic })
            .collect();
        let mut b_eta = self.matrix.clone();
        b_eta.scale_columns(&eta);
        let mut prod = b_eta.matmul(&self.matrix.adjoint());
        prod.scale_columns(&eta);
        prod.max_abs_diff_diag(&vec![1.0; 2 * n])
    }
}

/// Bogoliubov blocks of `propagator` in the free basis.
pub fn bogoliubov_blocks(propagator: &Propagator, basis: &BandBasis) -> Result<BogoliubovBlocks> {
    let modes = propagator.mode_columns(basis);
    bogoliubov_blocks_from_modes(propagator, basis, &modes)
}

/// Same as [`bogoliubov_blocks`] reusing precomputed [`Propagator::mode_columns`].
pub fn bogoliubov_blocks_from_modes(
    propagator: &Propagator,
    basis: &BandBasis,
    modes: &CMatrix,
) -> Result<BogoliubovBlocks> {
    check_shared(propagator, basis)?;
    let n = basis.lattice().sites();
    let spectral = Spectral::new(basis.lattice());
    let mut matrix = CMatrix::zeros(2 * n);
    for b in 0..2 * n {
        let (plus, minus) = spectral.overlaps(basis, modes.column(b));
        let col = matrix.column_mut(b);
        col[..n].copy_from_slice(&plus);
        col[n..].copy_from_slice(&minus);
    }
    Ok(BogoliubovBlocks {
        sites: n,
        statistic: basis.model().statistic(),
        matrix,
    })
}

pub(crate) fn check_shared(propagator: &Propagator, basis: &BandBasis) -> Result<()> {
    if propagator.lattice() != basis.lattice() || propagator.model() != basis.model() {
        return Err(Error::Mismatch(
            "propagator and basis use different lattices or models".into(),
        ));
    }
    Ok(())
}

/// Spectral projection `P_+ = sum_k v_k <v_k, sigma .>` or
/// `P_- = epsilon sum_k w_k <w_k, sigma .>`.
pub fn band_project(state: &[C64], basis: &BandBasis, band: Band) -> Result<Vec<C64>> {
    if state.len() != basis.lattice().dim() {
        return Err(Error::Mismatch(format!(
            "state of length {} on a lattice of dimension {}",
            state.len(),
            basis.lattice().dim()
        )));
    }
    let spectral = Spectral::new(basis.lattice());
    let projectors = band_projectors(basis, band);
    let mut out = state.to_vec();
    let mut scratch = spectral.scratch();
    spectral.project_in_place(&projectors, &mut out, &mut scratch);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freebasis::{dispersion, metric_density};
    use crate::potentials::BarrierParams;

    fn small_barrier(lattice: &Lattice, height: f64) -> Vec<f64> {
        BarrierParams {
            height,
            width: 3.0,
            smoothness: 1.6,
        }
        .sample(lattice)
        .unwrap()
    }

    #[test]
    fn kinetic_phase_properties() {
        let d = ParticleModel::dirac();
        assert!((kinetic_phase(d, 1.3, 0.0) - Mat2::IDENTITY).max_abs() < 1e-15);
        let dt = 0.01;
        let m = kinetic_phase(d, 0.0, dt);
        let expect = Mat2([
            [C64::from_polar(1.0, -dt), ZERO],
            [ZERO, C64::from_polar(1.0, dt)],
        ]);
        assert!((m - expect).max_abs() < 1e-16);
        let kg = ParticleModel::klein_gordon();
        let s3 = Mat2::diag(1.0, -1.0);
        for i in -50..=50 {
            let p = 0.61 * i as f64;
            let m = kinetic_phase(kg, p, 1e-3);
            let r = m.adjoint() * s3 * m - s3;
            assert!(r.max_abs() < 1e-15, "p={p}: {}", r.max_abs());
            let md = kinetic_phase(d, p, 0.37);
            assert!((md.adjoint() * md - Mat2::IDENTITY).max_abs() < 1e-15);
        }
    }

    #[test]
    fn potential_phase_values() {
        assert!(potential_phase(&[0.0; 4], 0.1).iter().all(|z| *z == C64::from(1.0)));
        assert!(potential_phase(&[2.0; 4], 0.0).iter().all(|z| *z == C64::from(1.0)));
        let v = BarrierParams::default().at(0.0);
        let ph = potential_phase(&[v], 1e-3)[0];
        let expect = C64::from_polar(1.0, -2.5 * 7.5f64.tanh() * 1e-3);
        assert!((ph - expect).norm() < 1e-16);
    }

    #[test]
    fn step_counts() {
        assert_eq!(step_count(10.0, 1e-3).unwrap(), 10_000);
        assert_eq!(step_count(0.0, 1e-3).unwrap(), 0);
        assert!(step_count(1.00005, 1e-3).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let lattice = Lattice::new(20.0, 16).unwrap();
        let props = evolve(&lattice, ParticleModel::dirac(), &[0.0; 16], 0.0, 1e-3, &[0.0]).unwrap();
        assert_eq!(props[0].matrix(), &CMatrix::identity(32));
    }

    #[test]
    fn free_modes_pick_up_energy_phase() {
        let lattice = Lattice::new(20.0, 32).unwrap();
        for model in [ParticleModel::dirac(), ParticleModel::klein_gordon()] {
            let basis = BandBasis::new(&lattice, model);
            let t = 0.5;
            let prop = evolve(&lattice, model, &[0.0; 32], t, 1e-3, &[t]).unwrap().remove(0);
            let modes = prop.mode_columns(&basis);
            let mut worst: f64 = 0.0;
            for k in 0..32 {
                let e = dispersion(lattice.momentum(k));
                for (band, col, sign) in [(Band::Positive, k, -1.0), (Band::Negative, 32 + k, 1.0)] {
                    let v = basis.mode_function(k, band);
                    let phase = C64::from_polar(1.0, sign * e * t);
                    for (a, b) in modes.column(col).iter().zip(&v) {
                        worst = worst.max((a - b * phase).norm());
                    }
                }
            }
            assert!(worst < 1e-10, "{model:?}: {worst}");
        }
    }

    #[test]
    fn blocks_at_time_zero_and_free() {
        let lattice = Lattice::new(20.0, 32).unwrap();
        let basis = BandBasis::new(&lattice, ParticleModel::dirac());
        let id = Propagator::identity(&lattice, basis.model(), 1e-3);
        let b0 = bogoliubov_blocks(&id, &basis).unwrap();
        assert!(b0.matrix().max_abs_diff_diag(&[1.0; 64]) < 1e-12);
        let t = 0.4;
        let prop = evolve(&lattice, basis.model(), &[0.0; 32], t, 1e-3, &[t]).unwrap().remove(0);
        let b = bogoliubov_blocks(&prop, &basis).unwrap();
        for k in 0..32 {
            for kp in 0..32 {
                let e = dispersion(lattice.momentum(k));
                let expect = if k == kp { C64::from_polar(1.0, -e * t) } else { ZERO };
                assert!((b.vv(k, kp) - expect).norm() < 1e-10);
                assert!(b.vw(k, kp).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn barrier_mixes_bands_and_preserves_metric() {
        let lattice = Lattice::new(25.6, 64).unwrap();
        let v = small_barrier(&lattice, 2.5);
        for model in [ParticleModel::dirac(), ParticleModel::klein_gordon()] {
            let basis = BandBasis::new(&lattice, model);
            let prop = evolve(&lattice, model, &v, 2.0, 1e-3, &[2.0]).unwrap().remove(0);
            assert!(prop.pseudo_unitarity_residual() < 1e-10);
            let b = bogoliubov_blocks(&prop, &basis).unwrap();
            assert!(b.vw_weight() > 1e-8);
            assert!(b.completeness_residual() < 1e-8);
            assert!((b.vw_weight() - b.wv_weight()).abs() < 1e-8);
        }
    }

    #[test]
    fn projections_complete_and_idempotent() {
        let lattice = Lattice::new(16.0, 64).unwrap();
        for model in [ParticleModel::dirac(), ParticleModel::klein_gordon()] {
            let basis = BandBasis::new(&lattice, model);
            let state: Vec<C64> = (0..128)
                .map(|i| C64::new((i as f64 * 1.3).sin(), (i as f64 * 0.7).cos()))
                .collect();
            let p = band_project(&state, &basis, Band::Positive).unwrap();
            let m = band_project(&state, &basis, Band::Negative).unwrap();
            let worst = state
                .iter()
                .zip(p.iter().zip(&m))
                .map(|(s, (a, b))| (a + b - s).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-10);
            let pp = band_project(&p, &basis, Band::Positive).unwrap();
            assert!(pp.iter().zip(&p).all(|(a, b)| (a - b).norm() < 1e-10));
            let v = basis.mode_function(3, Band::Positive);
            let w = basis.mode_function(3, Band::Negative);
            let pv = band_project(&v, &basis, Band::Positive).unwrap();
            let pw = band_project(&w, &basis, Band::Positive).unwrap();
            assert!(pv.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-12));
            assert!(pw.iter().all(|a| a.norm() < 1e-12));
        }
    }

    #[test]
    fn single_state_matches_propagator_column_action() {
        let lattice = Lattice::new(25.6, 64).unwrap();
        let v = small_barrier(&lattice, 1.0);
        let model = ParticleModel::klein_gordon();
        let stepper = SplitStepper::new(&lattice, model, &v, 1e-3).unwrap();
        let psi: Vec<C64> = (0..128).map(|i| C64::new((0.2 * i as f64).sin(), 0.0)).collect();
        let mut evolved = psi.clone();
        stepper.advance(&mut evolved, 500, &mut stepper.scratch());
        let prop = evolve(&lattice, model, &v, 0.5, 1e-3, &[0.5]).unwrap().remove(0);
        let via = prop.apply(&psi);
        assert!(evolved.iter().zip(&via).all(|(a, b)| (a - b).norm() < 1e-11));
        // charge of a single state is conserved
        let q0: f64 = metric_density(model, &psi).iter().sum();
        let q1: f64 = metric_density(model, &evolved).iter().sum();
        assert!((q0 - q1).abs() < 1e-10 * q0.abs().max(1.0));
    }

    #[test]
    fn wrap_guard_detects_fronts() {
        let lattice = Lattice::new(50.0, 512).unwrap();
        assert_eq!(wrap_guard(&lattice, 9.0, -15.0, 3.0), None);
        assert_eq!(wrap_guard(&lattice, 10.0, -15.0, 3.0), Some(10.0));
    }
}
