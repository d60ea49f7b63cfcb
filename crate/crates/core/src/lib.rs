//! Single-excitation quantum state transfer in XX spin chains with a
//! mirror-symmetric power-law on-site potential.
//!
//! The pipeline is chain parameters ([`chain`]) to a tridiagonal
//! Hamiltonian, its eigendecomposition ([`eigen`]), time evolution
//! ([`dynamics`]), transfer figures of merit ([`metrics`]) and parameter
//! scans ([`experiments`]). [`table`] and [`cli`] handle output and the
//! `qst` command line.

pub mod chain;
pub mod cli;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod table;

pub use chain::{build_chain, build_fields, ChainConfig, ChainSpec, Hamiltonian1Ex, PotentialSpec};
pub use dynamics::{amplitude, evolve, integrate_oracle, Trajectory};
pub use eigen::{decompose, decompose_full, EigenDecomposition, Parity};
pub use error::{QstError, Result};
pub use metrics::{
    identify_dimer_modes, p_threshold, qst_drop, t_star_estimate, transfer_report, DimerModes, DimerStatus,
    TransferOptions, TransferReport,
};
