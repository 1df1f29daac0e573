//! Resource management for the downlink of a virtualized CoMP-NOMA
//! heterogeneous network.
//!
//! The crate models a multi-InP, multi-MVNO MISO downlink in which base
//! stations jointly transmit (CoMP) and subcarriers are shared by several
//! users through power-domain NOMA. On top of the signal model it provides
//! two solvers for the joint beamforming / subcarrier-assignment /
//! viewpoint-selection problem:
//!
//! * [`polyblock`] — a centralized global solver that rewrites the relaxed
//!   problem in canonical monotone form and runs polyblock outer
//!   approximation over it;
//! * [`sca`] — a semi-centralized solver alternating a beamforming and an
//!   assignment subproblem, each handled by successive convex approximation
//!   with dual subgradient updates.
//!
//! The [`rrm`] module accounts for the signaling overhead and per-BS
//! operational complexity of the two solvers and implements the threshold
//! rule that picks one of them as the active resource-management mode.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature for embedded use. IO, file formats and the experiment CLI
//! live in the companion `comp-noma-cli` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub use num_complex;

pub mod error;
pub mod index;
pub mod math;
pub mod monotone;
pub mod result;
pub mod polyblock;
pub mod rrm;
pub mod sca;
pub mod scenario;
pub mod sinr;

pub use error::{ConfigError, SolverError};
pub use index::EntryIndex;
pub use scenario::{ChannelState, NetworkScenario, ScenarioConfig};
pub use sinr::{AllocationState, ConstraintReport, Mode};
