//! Causality diagnostics: the intervention light-cone comparison, the
//! equal-time commutator identities, and the correlation identity for a
//! density probe outside the cone.

use serde::Serialize;

use crate::densities::DensityField;
use crate::error::{Error, Result};
use crate::evolution::{check_shared, BogoliubovBlocks, Propagator};
use crate::freebasis::BandBasis;
use crate::lattice::Lattice;

/// Absolute floor of the light-cone pass criterion (density units).
pub const LIGHTCONE_TOL_ABS: f64 = 1e-10;
/// Relative allowance against the in-cone difference.
pub const LIGHTCONE_TOL_REL: f64 = 1e-4;
/// Floor added to the correlation identity bound.
pub const CORRELATION_TOL: f64 = 1e-10;

/// Sites flagged `true` lie outside the future cone of the window
/// `[x_minus, x_plus]` at time `t` (c = 1). On the periodic box the cone
/// includes its images, so a site counts as outside only if its periodic
/// distance to the window exceeds `t`.
pub fn lightcone_mask(lattice: &Lattice, window: (f64, f64), t: f64) -> Vec<bool> {
    let l = lattice.length();
    lattice
        .positions()
        .into_iter()
        .map(|x| outside_cone(x, window, l, t))
        .collect()
}

fn outside_cone(x: f64, (lo, hi): (f64, f64), length: f64, t: f64) -> bool {
    let right = (x - hi).rem_euclid(length);
    let left = (lo - x).rem_euclid(length);
    let in_window = x >= lo && x <= hi;
    !in_window && right.min(left) > t
}

/// Which outside-cone sites enter `sup_outside`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OutsideRegion {
    /// Sites right of the cone (`x > x_plus + t`) and right of the given
    /// barrier edge.
    RightOf(f64),
    /// Every outside-cone site.
    FullAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LightConeTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for LightConeTolerance {
    fn default() -> Self {
        Self {
            abs: LIGHTCONE_TOL_ABS,
            rel: LIGHTCONE_TOL_REL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LightConeReport {
    pub time: f64,
    pub x_plus: f64,
    /// `max |rho~ - rho|` over the selected outside-cone sites.
    pub sup_outside: f64,
    /// `max |rho~ - rho|` over inside-cone sites.
    pub sup_inside: f64,
    /// `sup_inside / sup_outside`, infinite when nothing leaks out.
    pub ratio: f64,
    /// Intervention projection leakage times the peak `|rho|` of the
    /// original run at this time.
    pub leakage_budget: f64,
    pub outside_sites: usize,
    pub inside_sites: usize,
    pub passed: bool,
}

/// Compares densities of the original and intervened runs snapshot by
/// snapshot.
pub fn lightcone_test(
    lattice: &Lattice,
    original: &[DensityField],
    intervened: &[DensityField],
    window: (f64, f64),
    region: OutsideRegion,
    leakage: f64,
    tolerance: LightConeTolerance,
) -> Result<Vec<LightConeReport>> {
    if original.len() != intervened.len() {
        return Err(Error::Mismatch(format!(
            "{} original snapshots vs {} intervened",
            original.len(),
            intervened.len()
        )));
    }
    let positions = lattice.positions();
    original
        .iter()
        .zip(intervened)
        .map(|(a, b)| {
            if (a.time - b.time).abs() > 1e-12 * a.time.abs().max(1.0) {
                return Err(Error::Mismatch(format!(
                    "snapshot times {} and {} differ",
                    a.time, b.time
                )));
            }
            if a.rho.len() != lattice.sites() || b.rho.len() != lattice.sites() || a.dx != b.dx {
                return Err(Error::Mismatch("density fields on different lattices".into()));
            }
            let mask = lightcone_mask(lattice, window, a.time);
            let mut sup_outside: f64 = 0.0;
            let mut sup_inside: f64 = 0.0;
            let (mut n_out, mut n_in) = (0, 0);
            for (j, &outside) in mask.iter().enumerate() {
                let diff = (b.rho[j] - a.rho[j]).abs();
                if outside {
                    let selected = match region {
                        OutsideRegion::RightOf(edge) => {
                            positions[j] > edge && positions[j] > window.1 + a.time
                        }
                        OutsideRegion::FullAxis => true,
                    };
                    if selected {
                        sup_outside = sup_outside.max(diff);
                        n_out += 1;
                    }
                } else {
                    sup_inside = sup_inside.max(diff);
                    n_in += 1;
                }
            }
            let peak = a.rho.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            let leakage_budget = leakage * peak;
            let ratio = if sup_outside > 0.0 {
                sup_inside / sup_outside
            } else {
                f64::INFINITY
            };
            let passed =
                sup_outside <= tolerance.abs + tolerance.rel * sup_inside + leakage_budget;
            Ok(LightConeReport {
                time: a.time,
                x_plus: window.1,
                sup_outside,
                sup_inside,
                ratio,
                leakage_budget,
                outside_sites: n_out,
                inside_sites: n_in,
                passed,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MicrocausalityReport {
    pub time: f64,
    /// `max |B eta B^dagger eta - 1|`.
    pub completeness_residual: f64,
    /// Largest `|C(x, y)|` entry with `x != y`; compare against `tol / dx`.
    pub commutator_delta_residual: f64,
    /// Largest `dx |C(x, x) - 1/dx|` entry.
    pub diagonal_error: f64,
    /// `max |U^dagger Sigma U - Sigma|`.
    pub pseudo_unitarity_residual: f64,
}

impl MicrocausalityReport {
    /// All residuals below `tol` (the off-diagonal one against `tol / dx`).
    pub fn within(&self, tol: f64, dx: f64) -> bool {
        self.completeness_residual < tol
            && self.commutator_delta_residual < tol / dx
            && self.diagonal_error < tol
    }
}

/// Evaluates the equal-time identities for a propagator snapshot.
///
/// The field (anti)commutator is rebuilt from the evolved free modes as
/// `C(x, y) = sum_k [U v_k(x) (U v_k(y))^dagger + eps U w_k(x) (U w_k(y))^dagger] sigma`
/// and compared with `delta_xy / dx`.
pub fn microcausality_check(
    propagator: &Propagator,
    blocks: &BogoliubovBlocks,
    basis: &BandBasis,
) -> Result<MicrocausalityReport> {
    microcausality_check_with(propagator, blocks, basis, basis.model().statistic())
}

/// [`microcausality_check`] with an explicit statistics sign, so callers can
/// verify that a wrong metric is detected.
pub fn microcausality_check_with(
    propagator: &Propagator,
    blocks: &BogoliubovBlocks,
    basis: &BandBasis,
    statistic: f64,
) -> Result<MicrocausalityReport> {
    check_shared(propagator, basis)?;
    let lattice = basis.lattice();
    let n = lattice.sites();
    if blocks.sites() != n {
        return Err(Error::Mismatch("blocks and basis differ in size".into()));
    }
    let dx = lattice.dx();
    let metric = basis.model().metric();
    let eta: Vec<f64> = (0..2 * n).map(|i| if i < n { 1.0 } else { statistic }).collect();
    let sigma: Vec<f64> = (0..2 * n).map(|i| metric[i / n]).collect();

    let modes = propagator.mode_columns(basis);
    let mut weighted = modes.clone();
    weighted.scale_columns(&eta);
    let mut c = weighted.matmul(&modes.adjoint());
    c.scale_columns(&sigma);

    let mut off: f64 = 0.0;
    let mut diag: f64 = 0.0;
    for col in 0..2 * n {
        let y = col % n;
        for row in 0..2 * n {
            let x = row % n;
            let z = c.get(row, col);
            if x != y {
                off = off.max(z.norm());
            } else {
                let target = if row == col { 1.0 / dx } else { 0.0 };
                diag = diag.max((z - target).norm() * dx);
            }
        }
    }
    Ok(MicrocausalityReport {
        time: propagator.time(),
        completeness_residual: blocks.completeness_residual_with(statistic),
        commutator_delta_residual: off,
        diagonal_error: diag,
        pseudo_unitarity_residual: propagator
            .pseudo_unitarity_residual_with(if statistic == basis.model().statistic() {
                metric
            } else {
                [metric[0], -metric[1]]
            }),
    })
}

/// One evaluation of the correlation identity at an outside-cone probe.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationProbe {
    pub time: f64,
    pub position: f64,
    pub rho: f64,
    pub rho_vac: f64,
    pub correlation: f64,
    pub residual: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Evaluates `C = rho(t', x') + rho_vac(t', x') * condi_residual` and the
/// residual `|C - rho|` for a probe outside the cone of `window`.
pub fn correlation_check(
    lattice: &Lattice,
    field: &DensityField,
    condi_residual: f64,
    position: f64,
    window: (f64, f64),
) -> Result<CorrelationProbe> {
    let time = field.time;
    if !outside_cone(position, window, lattice.length(), time) {
        return Err(Error::InsideLightCone { time, position });
    }
    let j = lattice.nearest_site(position);
    let rho = field.rho[j];
    let rho_vac = field.rho_plus_vac[j] - field.rho_minus_vac[j];
    let correlation = rho + rho_vac * condi_residual;
    let residual = (correlation - rho).abs();
    let bound = rho_vac.abs() * condi_residual.abs() + CORRELATION_TOL;
    Ok(CorrelationProbe {
        time,
        position: lattice.position(j),
        rho,
        rho_vac,
        correlation,
        residual,
        bound,
        passed: residual <= bound,
    })
}
