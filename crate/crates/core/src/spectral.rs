//! FFT plumbing between lattice functions and free-mode coefficients.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::freebasis::{band_projector, Band, BandBasis};
use crate::lattice::Lattice;
use crate::linalg::{Mat2, C64, ZERO};

/// Forward/inverse transforms for two-component lattice functions.
#[derive(Clone)]
pub struct Spectral {
    lattice: Lattice,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("lattice", &self.lattice)
            .finish_non_exhaustive()
    }
}

impl Spectral {
    pub fn new(lattice: &Lattice) -> Self {
        let mut planner = FftPlanner::new();
        let n = lattice.sites();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            lattice: *lattice,
            forward,
            inverse,
            scratch_len,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn scratch(&self) -> Vec<C64> {
        vec![ZERO; self.scratch_len]
    }

    /// Unnormalized forward transform of both components in place.
    pub fn forward(&self, state: &mut [C64], scratch: &mut [C64]) {
        self.forward.process_with_scratch(state, scratch);
    }

    /// Unnormalized inverse transform of both components in place.
    pub fn inverse(&self, state: &mut [C64], scratch: &mut [C64]) {
        self.inverse.process_with_scratch(state, scratch);
    }

    /// Transforms a single length-`N` buffer.
    pub fn forward_one(&self, buf: &mut [C64], scratch: &mut [C64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    pub fn inverse_one(&self, buf: &mut [C64], scratch: &mut [C64]) {
        self.inverse.process_with_scratch(buf, scratch);
    }

    /// Overlaps `(<v_k, sigma psi>, <w_k, sigma psi>)` for every mode `k`.
    pub fn overlaps(&self, basis: &BandBasis, psi: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let n = self.lattice.sites();
        let mut buf = psi.to_vec();
        let mut scratch = self.scratch();
        self.forward(&mut buf, &mut scratch);
        let [s0, s1] = basis.model().metric();
        let scale = self.lattice.dx() / self.lattice.length().sqrt();
        let x0 = self.lattice.position(0);
        let mut plus = vec![ZERO; n];
        let mut minus = vec![ZERO; n];
        for k in 0..n {
            let phase = C64::from_polar(scale, -self.lattice.momentum(k) * x0);
            let a = buf[k] * s0;
            let b = buf[n + k] * s1;
            let u = basis.spinor(k, Band::Positive);
            let w = basis.spinor(k, Band::Negative);
            plus[k] = phase * (u[0].conj() * a + u[1].conj() * b);
            minus[k] = phase * (w[0].conj() * a + w[1].conj() * b);
        }
        (plus, minus)
    }

    /// `sum_k plus_k v_k + minus_k w_k` as a lattice function.
    pub fn synthesize(&self, basis: &BandBasis, plus: &[C64], minus: &[C64]) -> Vec<C64> {
        let n = self.lattice.sites();
        let mut buf = vec![ZERO; 2 * n];
        let scale = 1.0 / self.lattice.length().sqrt();
        let x0 = self.lattice.position(0);
        for k in 0..n {
            let phase = C64::from_polar(scale, self.lattice.momentum(k) * x0);
            let u = basis.spinor(k, Band::Positive);
            let w = basis.spinor(k, Band::Negative);
            let (a, b) = (plus[k] * phase, minus[k] * phase);
            buf[k] = u[0] * a + w[0] * b;
            buf[n + k] = u[1] * a + w[1] * b;
        }
        let mut scratch = self.scratch();
        self.inverse(&mut buf, &mut scratch);
        buf
    }

    /// Spectral projection onto one band.
    pub fn project(&self, basis: &BandBasis, psi: &[C64], band: Band) -> Vec<C64> {
        let projectors = band_projectors(basis, band);
        let mut out = psi.to_vec();
        let mut scratch = self.scratch();
        self.project_in_place(&projectors, &mut out, &mut scratch);
        out
    }

    /// Applies precomputed per-mode projectors (see [`band_projectors`]) in place.
    pub fn project_in_place(&self, projectors: &[Mat2], psi: &mut [C64], scratch: &mut [C64]) {
        let n = self.lattice.sites();
        self.forward(psi, scratch);
        let inv_n = 1.0 / n as f64;
        for (k, proj) in projectors.iter().enumerate() {
            let [a, b] = proj.apply([psi[k], psi[n + k]]);
            psi[k] = a * inv_n;
            psi[n + k] = b * inv_n;
        }
        self.inverse(psi, scratch);
    }
}

/// Per-mode band projectors in canonical momentum order.
pub fn band_projectors(basis: &BandBasis, band: Band) -> Vec<Mat2> {
    let lattice = basis.lattice();
    (0..lattice.sites())
        .map(|k| band_projector(basis.model(), lattice.momentum(k), band))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freebasis::ParticleModel;

    #[test]
    fn overlaps_match_direct_inner_products() {
        let lattice = Lattice::new(10.0, 32).unwrap();
        for model in [ParticleModel::dirac(), ParticleModel::klein_gordon()] {
            let basis = BandBasis::new(&lattice, model);
            let sp = Spectral::new(&lattice);
            let psi: Vec<C64> = (0..64)
                .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            let (plus, minus) = sp.overlaps(&basis, &psi);
            for k in 0..32 {
                let v = basis.mode_function(k, Band::Positive);
                let w = basis.mode_function(k, Band::Negative);
                assert!((basis.inner(&v, &psi) - plus[k]).norm() < 1e-12);
                assert!((basis.inner(&w, &psi) - minus[k]).norm() < 1e-12);
            }
            // psi = sum c+ v + c- w with c- = eps <w, sigma psi>
            let eps = model.statistic();
            let minus_coef: Vec<C64> = minus.iter().map(|z| z * eps).collect();
            let back = sp.synthesize(&basis, &plus, &minus_coef);
            for (a, b) in back.iter().zip(&psi) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
