//! System-level simulator for multi-cell mm-wave networks with hybrid
//! beamforming (HBF) MU-MIMO gNBs.
//!
//! The pipeline for one network realization is:
//!
//! 1. [`scenario`] places gNBs on a grid and UEs as a Poisson point process.
//! 2. [`channel`] produces LOS/NLOS propagation paths and assembles the
//!    4×4-panel channel matrices.
//! 3. [`codebook`] builds the per-panel sweep codebooks.
//! 4. [`beamsweep`] runs the exhaustive SSB sweep and yields candidate beam
//!    pair links (BPLs).
//! 5. [`csi`] quantizes path angles into estimated channels.
//! 6. [`allocation`] assigns BPLs (5G-NR baseline, distributed/centralized
//!    interference-aware allocation, exhaustive oracle, DBF and CBF
//!    references), driving the two-stage precoder in [`precoder`].
//! 7. [`metrics`] evaluates SINR/throughput against the true channels.
//!
//! [`runner`] wires the stages into Monte Carlo campaigns.

pub mod allocation;
pub mod beamsweep;
pub mod channel;
pub mod codebook;
pub mod csi;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod precoder;
pub mod radio;
pub mod runner;
pub mod scenario;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
