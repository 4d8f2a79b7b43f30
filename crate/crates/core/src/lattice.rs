//! Periodic one-dimensional lattice and its conjugate momentum grid.
//!
//! All quantities are in natural units: `hbar = c = m = 1`, so lengths are in
//! Compton wavelengths, momenta in `mc`, energies in `mc^2` and times in
//! Compton wavelengths over `c`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural-unit constants. Every interface in the crate exchanges quantities
/// expressed in these units only.
pub mod units {
    pub const HBAR: f64 = 1.0;
    pub const SPEED_OF_LIGHT: f64 = 1.0;
    pub const MASS: f64 = 1.0;
}

/// Uniform periodic grid of `sites` points spanning `[-L/2, L/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    length: f64,
    sites: usize,
}

impl Lattice {
    pub fn new(length: f64, sites: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        if sites < 8 {
            return Err(Error::InvalidLattice(format!(
                "need at least 8 sites, got {sites}"
            )));
        }
        if !sites.is_power_of_two() {
            return Err(Error::InvalidLattice(format!(
                "site count must be a power of two, got {sites}"
            )));
        }
        Ok(Self { length, sites })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Size of the two-component state space, `2N`.
    pub fn dim(&self) -> usize {
        2 * self.sites
    }

    pub fn dx(&self) -> f64 {
        self.length / self.sites as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn position(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.sites).map(|j| self.position(j)).collect()
    }

    /// Signed mode number of the `idx`-th entry in canonical transform order:
    /// `0, 1, .., N/2-1, -N/2, .., -1`.
    pub fn mode_number(&self, idx: usize) -> i64 {
        let n = self.sites as i64;
        let i = idx as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Momentum of the `idx`-th mode in canonical transform order.
    pub fn momentum(&self, idx: usize) -> f64 {
        self.mode_number(idx) as f64 * self.dp()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.sites).map(|k| self.momentum(k)).collect()
    }

    pub fn sorted_momenta(&self) -> Vec<f64> {
        (0..self.sites)
            .map(|s| self.momentum(self.sorted_to_canonical(s)))
            .collect()
    }

    /// Position in the ascending momentum list of canonical index `idx`.
    pub fn canonical_to_sorted(&self, idx: usize) -> usize {
        (idx + self.sites / 2) % self.sites
    }

    pub fn sorted_to_canonical(&self, sorted: usize) -> usize {
        (sorted + self.sites / 2) % self.sites
    }

    /// Largest momentum representable on the grid, `pi/dx`.
    pub fn max_momentum(&self) -> f64 {
        PI / self.dx()
    }

    /// Anti-aliasing guard for a Gaussian packet with mean momentum `p0` and
    /// spatial width `width`.
    pub fn resolves_packet(&self, p0: f64, width: f64) -> bool {
        self.max_momentum() > p0.abs() + 6.0 / width
    }

    /// Nearest site index to `x`, wrapping periodically.
    pub fn nearest_site(&self, x: f64) -> usize {
        let s = ((x + 0.5 * self.length) / self.dx()).round() as i64;
        s.rem_euclid(self.sites as i64) as usize
    }
}

/// Signed mode numbers of an `n`-point transform in canonical order.
pub fn canonical_mode_numbers(n: usize) -> Vec<i64> {
    let half = (n / 2) as i64;
    (0..n as i64).map(|i| if i < half { i } else { i - n as i64 }).collect()
}

/// Both orderings of the lattice grids.
#[derive(Debug, Clone)]
pub struct Grids {
    pub positions: Vec<f64>,
    /// Canonical transform order.
    pub momenta: Vec<f64>,
    /// Ascending order.
    pub sorted_momenta: Vec<f64>,
}

pub fn grids(lattice: &Lattice) -> Grids {
    Grids {
        positions: lattice.positions(),
        momenta: lattice.momenta(),
        sorted_momenta: lattice.sorted_momenta(),
    }
}
