//! Dense eigendecomposition propagator for the Dirac model, used to cross-check
//! the split-step scheme on small lattices.

use nalgebra::{DMatrix, SymmetricEigen};

use super::Propagator;
use crate::error::{Error, Result};
use crate::freebasis::{free_hamiltonian, ParticleModel, Species};
use crate::lattice::Lattice;
use crate::linalg::{CMatrix, C64, ZERO};

/// Largest lattice accepted by the dense path.
pub const MAX_DENSE_SITES: usize = 128;

/// Spectral decomposition `H = W diag(lambda) W^dagger` of the lattice Dirac
/// Hamiltonian with the same momentum grid as the split-step kinetic factor.
#[derive(Debug, Clone)]
pub struct DenseDiracPropagator {
    lattice: Lattice,
    model: ParticleModel,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

/// Dense `2N x 2N` lattice Hamiltonian `F^-1 H0(p) F + V`.
pub fn lattice_hamiltonian(lattice: &Lattice, model: ParticleModel, potential: &[f64]) -> DMatrix<C64> {
    let n = lattice.sites();
    let dim = 2 * n;
    let kinetic: Vec<_> = lattice
        .momenta()
        .into_iter()
        .map(|p| free_hamiltonian(model, p))
        .collect();
    let mut h = DMatrix::from_element(dim, dim, ZERO);
    let inv_n = 1.0 / n as f64;
    for j in 0..n {
        for jp in 0..n {
            let mut block = [[ZERO; 2]; 2];
            for (k, hk) in kinetic.iter().enumerate() {
                let phase = C64::from_polar(
                    inv_n,
                    2.0 * std::f64::consts::PI * lattice.mode_number(k) as f64 * (j as f64 - jp as f64)
                        / n as f64,
                );
                for (r, row) in block.iter_mut().enumerate() {
                    for (c, cell) in row.iter_mut().enumerate() {
                        *cell += hk.0[r][c] * phase;
                    }
                }
            }
            for r in 0..2 {
                for c in 0..2 {
                    h[(r * n + j, c * n + jp)] = block[r][c];
                }
            }
        }
        h[(j, j)] += potential[j];
        h[(n + j, n + j)] += potential[j];
    }
    h
}

impl DenseDiracPropagator {
    pub fn new(lattice: &Lattice, model: ParticleModel, potential: &[f64]) -> Result<Self> {
        if model.species != Species::Dirac {
            return Err(Error::Unsupported(
                "the dense oracle needs a Hermitian Hamiltonian (Dirac model only)".into(),
            ));
        }
        if lattice.sites() > MAX_DENSE_SITES {
            return Err(Error::Unsupported(format!(
                "dense oracle limited to {MAX_DENSE_SITES} sites, got {}",
                lattice.sites()
            )));
        }
        if potential.len() != lattice.sites() {
            return Err(Error::Mismatch("potential length".into()));
        }
        let h = lattice_hamiltonian(lattice, model, potential);
        let eig = SymmetricEigen::new(h);
        Ok(Self {
            lattice: *lattice,
            model,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `W exp(-i lambda t) W^dagger`.
    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        let dim = self.lattice.dim();
        let mut scaled = self.eigenvectors.clone();
        for (c, &lambda) in self.eigenvalues.iter().enumerate() {
            let phase = C64::from_polar(1.0, -lambda * t);
            for r in 0..dim {
                scaled[(r, c)] *= phase;
            }
        }
        let u = scaled * self.eigenvectors.adjoint();
        let data: Vec<C64> = u.as_slice().to_vec();
        Propagator::from_matrix(&self.lattice, self.model, t, CMatrix::from_columns(dim, data))
    }
}
