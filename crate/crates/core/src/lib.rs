//! Work statistics, steady states and cycle simulation for multi-qubit
//! information engines whose qubits couple to a thermal bath either
//! collectively (through the total spin) or independently.
//!
//! Units: hbar = k_B = 1; energies are in units of the level splitting when
//! `omega = 1`.

pub mod error;
pub mod specfun;
pub mod statmech;
pub mod closedform;
pub mod metrics;
pub mod dynamics;
pub mod engine;

pub use error::{Error, Result};
pub use statmech::{
    collective_advantage_ratio, magnetization_distribution, probability_ratio,
    work_statistics_direct, ComputationPath, CouplingMode, EngineSpec, Magnetization,
    MagnetizationDistribution, WorkStatistics,
};
