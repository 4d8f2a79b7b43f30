//! Free positive- and negative-energy solutions of the one-dimensional Dirac
//! and Feshbach-Villars Klein-Gordon Hamiltonians.

use serde::{Deserialize, Serialize};

use crate::lattice::{units::MASS, Lattice};
use crate::linalg::{metric_dot, Mat2, Spinor, C64, I, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Species {
    Dirac,
    #[serde(alias = "kg")]
    KleinGordon,
}

/// Which Pauli matrix carries the momentum term of the Dirac Hamiltonian.
/// Observables do not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DiracAlpha {
    #[default]
    Sigma1,
    Sigma2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParticleModel {
    pub species: Species,
    pub alpha: DiracAlpha,
}

impl ParticleModel {
    pub const fn dirac() -> Self {
        Self {
            species: Species::Dirac,
            alpha: DiracAlpha::Sigma1,
        }
    }

    pub const fn dirac_with_alpha(alpha: DiracAlpha) -> Self {
        Self {
            species: Species::Dirac,
            alpha,
        }
    }

    pub const fn klein_gordon() -> Self {
        Self {
            species: Species::KleinGordon,
            alpha: DiracAlpha::Sigma1,
        }
    }

    pub fn from_species(species: Species) -> Self {
        match species {
            Species::Dirac => Self::dirac(),
            Species::KleinGordon => Self::klein_gordon(),
        }
    }

    /// Statistics sign: `+1` for fermions, `-1` for bosons.
    pub fn statistic(&self) -> f64 {
        match self.species {
            Species::Dirac => 1.0,
            Species::KleinGordon => -1.0,
        }
    }

    /// Diagonal of the inner-product metric: identity for Dirac, `sigma_3` for
    /// Klein-Gordon.
    pub fn metric(&self) -> [f64; 2] {
        match self.species {
            Species::Dirac => [1.0, 1.0],
            Species::KleinGordon => [1.0, -1.0],
        }
    }

    pub fn short_name(&self) -> &'static str {
        match self.species {
            Species::Dirac => "dirac",
            Species::KleinGordon => "kg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Positive,
    Negative,
}

/// Relativistic dispersion `E(p) = sqrt(p^2 + m^2)`.
pub fn dispersion(p: f64) -> f64 {
    (p * p + MASS * MASS).sqrt()
}

/// Free single-particle Hamiltonian at momentum `p`.
///
/// Dirac: `p alpha + m sigma_3` with `alpha` either `sigma_1` or `sigma_2`.
/// Klein-Gordon (Feshbach-Villars): `(sigma_3 + i sigma_2) p^2/2m + m sigma_3`.
/// In both cases `H0(p)^2 = E(p)^2`.
pub fn free_hamiltonian(model: ParticleModel, p: f64) -> Mat2 {
    let m = MASS;
    match model.species {
        Species::Dirac => match model.alpha {
            DiracAlpha::Sigma1 => Mat2::from_real([[m, p], [p, -m]]),
            DiracAlpha::Sigma2 => Mat2([[C64::from(m), -I * p], [I * p, C64::from(-m)]]),
        },
        Species::KleinGordon => {
            let k = p * p / (2.0 * m);
            Mat2::from_real([[m + k, k], [-k, -m - k]])
        }
    }
}

/// Eigenvector of [`free_hamiltonian`] with eigenvalue `+E` or `-E`, normalized
/// to metric norm `+1` (positive band) or `epsilon` (negative band).
pub fn band_spinor(model: ParticleModel, p: f64, band: Band) -> Spinor {
    let m = MASS;
    let e = dispersion(p);
    match model.species {
        Species::Dirac => {
            let norm = (2.0 * e * (e + m)).sqrt();
            let (a, b) = match (model.alpha, band) {
                (DiracAlpha::Sigma1, Band::Positive) => (C64::from(e + m), C64::from(p)),
                (DiracAlpha::Sigma1, Band::Negative) => (C64::from(-p), C64::from(e + m)),
                (DiracAlpha::Sigma2, Band::Positive) => (C64::from(e + m), I * p),
                (DiracAlpha::Sigma2, Band::Negative) => (I * p, C64::from(e + m)),
            };
            [a / norm, b / norm]
        }
        Species::KleinGordon => {
            let norm = 2.0 * (m * e).sqrt();
            let (a, b) = match band {
                Band::Positive => (m + e, m - e),
                Band::Negative => (m - e, m + e),
            };
            [C64::from(a / norm), C64::from(b / norm)]
        }
    }
}

/// Spectral band projector at one momentum: `u u^dagger sigma` for the
/// positive band and `epsilon w w^dagger sigma` for the negative band. The
/// two add up to the identity.
pub fn band_projector(model: ParticleModel, p: f64, band: Band) -> Mat2 {
    let u = band_spinor(model, p, band);
    let [s0, s1] = model.metric();
    let weight = match band {
        Band::Positive => 1.0,
        Band::Negative => model.statistic(),
    };
    (Mat2::outer(u, u) * Mat2::diag(s0, s1)).scale(C64::from(weight))
}

/// Free mode set on a lattice: spinor factors and energies indexed by the
/// canonical momentum order of [`Lattice::momentum`].
#[derive(Debug, Clone)]
pub struct BandBasis {
    lattice: Lattice,
    model: ParticleModel,
    positive: Vec<Spinor>,
    negative: Vec<Spinor>,
    energies: Vec<f64>,
}

impl BandBasis {
    pub fn new(lattice: &Lattice, model: ParticleModel) -> Self {
        let momenta = lattice.momenta();
        Self {
            lattice: *lattice,
            model,
            positive: momenta
                .iter()
                .map(|&p| band_spinor(model, p, Band::Positive))
                .collect(),
            negative: momenta
                .iter()
                .map(|&p| band_spinor(model, p, Band::Negative))
                .collect(),
            energies: momenta.iter().map(|&p| dispersion(p)).collect(),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn model(&self) -> ParticleModel {
        self.model
    }

    pub fn energy(&self, k: usize) -> f64 {
        self.energies[k]
    }

    pub fn spinor(&self, k: usize, band: Band) -> Spinor {
        match band {
            Band::Positive => self.positive[k],
            Band::Negative => self.negative[k],
        }
    }

    /// Lattice mode function `u(p_k) e^{i p_k x_j} / sqrt(N dx)`, stored
    /// component-major: the first `N` entries hold the upper component.
    pub fn mode_function(&self, k: usize, band: Band) -> Vec<C64> {
        let n = self.lattice.sites();
        let p = self.lattice.momentum(k);
        let u = self.spinor(k, band);
        let norm = 1.0 / (self.lattice.length()).sqrt();
        let mut out = vec![ZERO; 2 * n];
        for j in 0..n {
            let phase = C64::from_polar(norm, p * self.lattice.position(j));
            out[j] = u[0] * phase;
            out[n + j] = u[1] * phase;
        }
        out
    }

    /// Metric-weighted lattice inner product `dx sum_j a^dagger sigma b`.
    pub fn inner(&self, a: &[C64], b: &[C64]) -> C64 {
        metric_inner(&self.lattice, self.model, a, b)
    }
}

/// `dx sum_j a(x_j)^dagger sigma b(x_j)` for component-major lattice functions.
pub fn metric_inner(lattice: &Lattice, model: ParticleModel, a: &[C64], b: &[C64]) -> C64 {
    let n = lattice.sites();
    let [s0, s1] = model.metric();
    let mut acc = ZERO;
    for j in 0..n {
        acc += metric_dot([a[j], a[n + j]], [s0, s1], [b[j], b[n + j]]);
    }
    acc * lattice.dx()
}

/// Pointwise metric density `psi^dagger sigma psi` of a component-major state.
pub fn metric_density(model: ParticleModel, psi: &[C64]) -> Vec<f64> {
    let n = psi.len() / 2;
    let [s0, s1] = model.metric();
    (0..n)
        .map(|j| s0 * psi[j].norm_sqr() + s1 * psi[n + j].norm_sqr())
        .collect()
}
