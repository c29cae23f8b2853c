//! Split-amplitude coupled cluster driven by externally supplied
//! wavefunction overlaps.
//!
//! The crate covers the full desk-scale pipeline: FCIDUMP parsing and
//! spin-orbital integrals ([`integrals`]), exact FCI/CASCI oracles and
//! overlap extraction ([`ci`]), cluster analysis and quantum-input
//! post-processing ([`cluster`]), CCSD/TCCSD/ec-CC solvers ([`cc`]), a
//! Gaussian shot-noise model for overlap measurement ([`noise`]), and
//! measurement-budget estimation ([`estimator`]). The [`cli`] module exposes
//! every workflow as a subcommand; the `examples/` directory shows each
//! capability as a standalone program.

pub mod cc;
pub mod ci;
pub mod cli;
pub mod cluster;
pub mod error;
pub mod estimator;
pub mod integrals;
pub mod io;
pub mod noise;

pub use error::{Result, SplitccError};
