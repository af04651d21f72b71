//! Simulation and analysis of generalized cat states of itinerant microwave
//! photons reflected from a cavity that hosts a dispersively coupled qubit.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: truncated Fock-space states, operators, entropy and fidelity.
//! - [`device`]: input-output model of the qubit-conditioned cavity reflection.
//! - [`protocol`]: ideal, lossy, lifetime-limited and readout-mixed photon states.
//! - [`homodyne`]: noisy heterodyne sampling and moment deconvolution.
//! - [`tomography`]: maximum-likelihood reconstruction from moments.
//! - [`metrics`]: Wigner function, photon statistics, squeezing, α-coherence.
//! - [`budget`]: per-source error budget sweeps.
//!
//! Internal units: angular rates in rad/µs, times in µs, photon flux in
//! photons/µs. Angles are radians.

#![forbid(unsafe_code)]

pub mod budget;
pub mod device;
pub mod error;
pub mod fock;
pub mod format;
pub mod homodyne;
pub mod metrics;
mod optim;
pub mod protocol;
pub mod tomography;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
