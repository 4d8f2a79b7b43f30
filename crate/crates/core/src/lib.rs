//! Second-quantized Dirac and Klein-Gordon fields on a periodic 1D lattice,
//! scattered off a smooth potential barrier.
//!
//! The single-particle propagator is built with a split-step Fourier scheme
//! and turned into Bogoliubov blocks, vacuum and wave-packet densities,
//! and causality diagnostics (a local intervention light-cone test and the
//! equal-time commutator identities).

pub mod causality;
pub mod config;
pub mod densities;
pub mod error;
pub mod evolution;
pub mod freebasis;
pub mod lattice;
pub mod linalg;
pub mod output;
pub mod potentials;
pub mod runner;
pub mod scenarios;
pub mod spectral;
pub mod wavepacket;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use freebasis::{BandBasis, ParticleModel, Species};
pub use lattice::Lattice;
pub use potentials::{BarrierParams, InterventionParams};
pub use runner::{run, verify, RunOutcome};
