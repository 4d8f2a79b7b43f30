//! Drives a configured run: propagator, densities at every snapshot, the
//! invariant checks, and the paired intervention comparison.

use std::time::Instant;

use log::{info, warn};
use serde::Serialize;

use crate::causality::{
    lightcone_test, microcausality_check_with, LightConeReport, LightConeTolerance, MicrocausalityReport,
    OutsideRegion,
};
use crate::config::RunConfig;
use crate::densities::{packet_density, vacuum_density_from_modes, DensityField, VacuumDensity};
use crate::error::Result;
use crate::evolution::{bogoliubov_blocks_from_modes, check_wrap_guard, step_count, Evolver, SplitStepper};
use crate::freebasis::BandBasis;
use crate::lattice::Lattice;
use crate::potentials::InterventionParams;
use crate::wavepacket::{apply_intervention, gaussian_packet, WavePacket};

/// Pass thresholds for the per-run invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub pseudo_unitarity: f64,
    pub charge: f64,
    /// Completeness, `dx`-scaled commutator off-diagonal, and diagonal error.
    pub microcausality: f64,
    pub vacuum_balance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pseudo_unitarity: 1e-10,
            charge: 1e-6,
            microcausality: 1e-8,
            vacuum_balance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotRecord {
    pub field: DensityField,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervened: Option<DensityField>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pseudo_unitarity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub microcausality: Option<MicrocausalityReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterventionSummary {
    pub params: InterventionParams,
    pub leakage: f64,
    pub condi_residual: f64,
    pub renormalization: f64,
    pub max_abs_f: f64,
}

/// Worst values of each invariant over the run, and the ones out of
/// tolerance.
#[derive(Debug, Clone, Default, Serialize)]
pub struct InvariantReport {
    pub max_pseudo_unitarity: Option<f64>,
    pub max_charge_error: f64,
    pub max_vacuum_imbalance: f64,
    pub max_completeness: Option<f64>,
    /// `dx * max |C(x, y)|` over `x != y`.
    pub max_commutator_offdiag: Option<f64>,
    pub max_diagonal_error: Option<f64>,
    pub breaches: Vec<String>,
}

impl InvariantReport {
    fn collect(records: &[SnapshotRecord], dx: f64, tol: &Tolerances) -> Self {
        let fold = |xs: Vec<f64>| xs.into_iter().reduce(f64::max);
        let pu = fold(records.iter().filter_map(|r| r.pseudo_unitarity).collect());
        let mc: Vec<&MicrocausalityReport> = records.iter().filter_map(|r| r.microcausality.as_ref()).collect();
        let mut report = Self {
            max_pseudo_unitarity: pu,
            max_charge_error: records.iter().map(|r| (r.field.charge - 1.0).abs()).fold(0.0, f64::max),
            max_vacuum_imbalance: records
                .iter()
                .map(|r| (r.field.vacuum_particle_number() - r.field.vacuum_antiparticle_number()).abs())
                .fold(0.0, f64::max),
            max_completeness: fold(mc.iter().map(|m| m.completeness_residual).collect()),
            max_commutator_offdiag: fold(mc.iter().map(|m| m.commutator_delta_residual * dx).collect()),
            max_diagonal_error: fold(mc.iter().map(|m| m.diagonal_error).collect()),
            breaches: Vec::new(),
        };
        let mut check = |name: &str, value: Option<f64>, limit: f64| {
            if let Some(v) = value {
                if !(v < limit) {
                    report.breaches.push(format!("{name} = {v:.3e} exceeds {limit:.0e}"));
                }
            }
        };
        check("pseudo-unitarity residual", pu, tol.pseudo_unitarity);
        check("|Q - 1|", Some(report.max_charge_error), tol.charge);
        check("vacuum plus/minus imbalance", Some(report.max_vacuum_imbalance), tol.vacuum_balance);
        check("completeness residual", report.max_completeness, tol.microcausality);
        check("commutator off-diagonal (x dx)", report.max_commutator_offdiag, tol.microcausality);
        check("commutator diagonal error", report.max_diagonal_error, tol.microcausality);
        report
    }

    pub fn passed(&self) -> bool {
        self.breaches.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub lattice: Lattice,
    pub packet: WavePacket,
    pub snapshots: Vec<SnapshotRecord>,
    pub intervention: Option<InterventionSummary>,
    pub lightcone: Option<Vec<LightConeReport>>,
    pub invariants: InvariantReport,
    pub wall_clock_seconds: f64,
}

impl RunOutcome {
    /// Original-run fields in snapshot order.
    pub fn fields(&self) -> Vec<&DensityField> {
        self.snapshots.iter().map(|s| &s.field).collect()
    }

    pub fn final_field(&self) -> &DensityField {
        &self.snapshots.last().expect("runs have at least one snapshot").field
    }

    pub fn intervention_window(&self) -> Option<(f64, f64)> {
        self.intervention
            .as_ref()
            .map(|s| (s.params.left_edge(), s.params.right_edge()))
    }
}

/// Worker threads used by the parallel column sweeps.
pub fn thread_count() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs the configuration end to end.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    run_with(config, &Tolerances::default())
}

/// Same as [`run`] with microcausality and pseudo-unitarity checks forced on.
pub fn verify(config: &RunConfig) -> Result<RunOutcome> {
    let mut cfg = config.clone();
    cfg.verify.pseudo_unitarity = true;
    cfg.verify.microcausality = true;
    run_with(&cfg, &Tolerances::default())
}

pub fn run_with(config: &RunConfig, tol: &Tolerances) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let lattice = config.lattice()?;
    let model = config.model();
    let basis = BandBasis::new(&lattice, model);
    let potential = config.barrier.sample(&lattice)?;
    let times = config.snapshot_times()?;
    check_wrap_guard(&lattice, config.time.t_max, config.packet.x0, config.barrier.width);

    let p = &config.packet;
    let packet = gaussian_packet(&basis, p.x0, p.p0, p.w_sigma)?;
    let intervened = if config.intervention.enabled {
        let params = config.intervention.params();
        let r = apply_intervention(&packet, &basis, &params)?;
        info!(
            "intervention: leakage {:.3e}, condi residual {:.3e}",
            r.leakage, r.condi_residual
        );
        Some((
            InterventionSummary {
                params,
                leakage: r.leakage,
                condi_residual: r.condi_residual,
                renormalization: r.renormalization,
                max_abs_f: params.max_abs_f(),
            },
            r.packet,
        ))
    } else {
        None
    };

    let statistic = if config.verify.break_metric {
        warn!("break_metric is set: identities are evaluated with the wrong statistics sign");
        -model.statistic()
    } else {
        model.statistic()
    };

    let mut evolver = Evolver::new(&lattice, model, &potential, config.time.dt)?;
    let mut records = Vec::with_capacity(times.len());
    for &t in &times {
        let prop = evolver.advance_to(t)?;
        let modes = prop.mode_columns(&basis);
        let vac = vacuum_density_from_modes(t, &basis, &modes)?;
        let field = DensityField::combine(&vac, &packet_density(&prop.apply(&packet.chi), &basis, t)?, lattice.dx())?;
        let intervened_field = match &intervened {
            Some((_, pk)) => Some(DensityField::combine(
                &vac,
                &packet_density(&prop.apply(&pk.chi), &basis, t)?,
                lattice.dx(),
            )?),
            None => None,
        };
        let pseudo_unitarity = config.verify.pseudo_unitarity.then(|| {
            let metric = model.metric();
            if statistic == model.statistic() {
                prop.pseudo_unitarity_residual()
            } else {
                prop.pseudo_unitarity_residual_with([metric[0], -metric[1]])
            }
        });
        let microcausality = if config.verify.microcausality {
            let blocks = bogoliubov_blocks_from_modes(prop, &basis, &modes)?;
            Some(microcausality_check_with(prop, &blocks, &basis, statistic)?)
        } else {
            None
        };
        info!(
            "t = {t:.4}: Q - 1 = {:.2e}, N- = {:.4e}",
            field.charge - 1.0,
            field.antiparticle_number
        );
        records.push(SnapshotRecord {
            field,
            intervened: intervened_field,
            pseudo_unitarity,
            microcausality,
        });
    }

    let (intervention, lightcone) = match intervened {
        Some((summary, _)) => {
            let originals: Vec<DensityField> = records.iter().map(|r| r.field.clone()).collect();
            let changed: Vec<DensityField> = records.iter().filter_map(|r| r.intervened.clone()).collect();
            let reports = lightcone_test(
                &lattice,
                &originals,
                &changed,
                (summary.params.left_edge(), summary.params.right_edge()),
                OutsideRegion::RightOf(config.barrier.right_edge()),
                summary.leakage,
                LightConeTolerance::default(),
            )?;
            (Some(summary), Some(reports))
        }
        None => (None, None),
    };

    let invariants = InvariantReport::collect(&records, lattice.dx(), tol);
    for b in &invariants.breaches {
        warn!("invariant breach: {b}");
    }
    Ok(RunOutcome {
        config: config.clone(),
        lattice,
        packet,
        snapshots: records,
        intervention,
        lightcone,
        invariants,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Light-cone comparison from the two packets alone.
///
/// The vacuum terms are identical in both runs and drop out of `rho~ - rho`,
/// so only the packet columns need to be propagated. This makes step-size
/// studies cheap.
pub fn packet_lightcone(config: &RunConfig, dt: f64) -> Result<Vec<LightConeReport>> {
    config.validate()?;
    let lattice = config.lattice()?;
    let model = config.model();
    let basis = BandBasis::new(&lattice, model);
    let potential = config.barrier.sample(&lattice)?;
    let params = config.intervention.params();
    params.validate(Some(&config.barrier))?;
    let p = &config.packet;
    let packet = gaussian_packet(&basis, p.x0, p.p0, p.w_sigma)?;
    let reshaped = apply_intervention(&packet, &basis, &params)?;
    let stepper = SplitStepper::new(&lattice, model, &potential, dt)?;
    let mut scratch = stepper.scratch();
    let mut a = packet.chi.clone();
    let mut b = reshaped.packet.chi.clone();
    let (mut originals, mut changed) = (Vec::new(), Vec::new());
    let mut done = 0;
    for t in config.snapshot_times()? {
        let target = step_count(t, dt)?;
        stepper.advance(&mut a, target - done, &mut scratch);
        stepper.advance(&mut b, target - done, &mut scratch);
        done = target;
        let vac = VacuumDensity::zero(t, lattice.sites());
        originals.push(DensityField::combine(&vac, &packet_density(&a, &basis, t)?, lattice.dx())?);
        changed.push(DensityField::combine(&vac, &packet_density(&b, &basis, t)?, lattice.dx())?);
    }
    lightcone_test(
        &lattice,
        &originals,
        &changed,
        (params.left_edge(), params.right_edge()),
        OutsideRegion::RightOf(config.barrier.right_edge()),
        reshaped.leakage,
        LightConeTolerance::default(),
    )
}

/// Step-halving study of the light-cone test.
#[derive(Debug, Clone, Serialize)]
pub struct LightConeStudy {
    pub dt: f64,
    pub base: Vec<LightConeReport>,
    pub halved: Vec<LightConeReport>,
    /// Largest `sup_outside(dt/2) - sup_outside(dt)` over snapshots.
    pub max_growth: f64,
}

impl LightConeStudy {
    /// `sup_outside` does not grow under halving, within `slack`.
    pub fn monotone(&self, slack: f64) -> bool {
        self.max_growth <= slack
    }
}

pub fn lightcone_study(config: &RunConfig) -> Result<LightConeStudy> {
    let dt = config.time.dt;
    let base = packet_lightcone(config, dt)?;
    let halved = packet_lightcone(config, 0.5 * dt)?;
    let max_growth = base
        .iter()
        .zip(&halved)
        .map(|(a, b)| b.sup_outside - a.sup_outside)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(LightConeStudy {
        dt,
        base,
        halved,
        max_growth,
    })
}
