//! Numerical workbench for open-quantum-system dynamics in cavity QED.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`] dense complex operators on a collective-spin ⊗ truncated-boson space,
//! * [`models`] concrete Hamiltonians and dissipators packaged as [`models::LindbladModel`],
//! * [`lindblad`] deterministic master-equation integration and closed-form oracles,
//! * [`trajectories`] Ito state-vector unraveling with dispersion-entropy diagnostics,
//! * [`spectra`] closed-form vacuum Rabi absorption spectra and peak extraction,
//! * [`decoherence`] cat states and collapse-time laws,
//! * [`mtparams`] the order-of-magnitude microtubule cavity estimation chain,
//! * [`holography`] a scalar internal-source far-field interference model,
//! * [`units`] SI constants, unit conversion and quantity-string parsing.
//!
//! All dynamics use ħ = 1 with frequencies in rad/s; SI conversion lives in
//! [`mtparams`] and [`units`].

pub mod decoherence;
pub mod error;
pub mod holography;
pub mod lindblad;
pub mod models;
pub mod mtparams;
pub mod qstate;
pub mod spectra;
pub mod trajectories;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
