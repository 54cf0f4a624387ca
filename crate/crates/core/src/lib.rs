//! Storage, coherent rotation and release of weak light pulses in a medium
//! of four-level atoms.
//!
//! A signal pulse is slowed and stopped by switching off a control field
//! (electromagnetically induced transparency), the stored atomic coherence is
//! rotated by an additional control interaction, and the light is released
//! into one or two signal channels when the control returns. The crate
//! integrates the coupled density-matrix and envelope equations on a z grid
//! in the moving window frame and provides the closed-form polariton results
//! used to check the simulation.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod config;
pub mod density;
pub mod error;
pub mod field;
pub mod output;
pub mod polariton;
pub mod pulses;
pub mod scenario;
pub mod scheme;
pub mod units;

pub use config::{default_config, protocol_config, FieldCoupling, Scale, SimulationConfig};
pub use density::{DensityMatrix, C64};
pub use error::{Error, Result};
pub use scheme::{LevelScheme, Variant};
