//! Checkpointing and verification under silent errors.
//!
//! Analytic models for choosing checkpoint periods, chunk counts and
//! verification patterns on platforms where errors are detected late,
//! plus a Monte Carlo simulator that replays the same executions.
//!
//! ```
//! use ckptopt::firstorder::period_firstorder;
//! use ckptopt::model::{PlatformParams, YEAR};
//!
//! let rate = 1e5 / (100.0 * YEAR);
//! let p = PlatformParams::latency(600.0, 600.0, 0.0, rate, 30.0 * rate);
//! let t = period_firstorder(&p).unwrap();
//! assert!((t / 60.0 - 100.0).abs() < 1.0);
//! ```

pub mod cli;
pub mod error;
pub mod exact;
pub mod firstorder;
pub mod lambert;
pub mod model;
pub mod patterns;
pub mod risk;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
pub use model::{DistributionSpec, PlatformParams, WasteBreakdown, WorkloadSpec};
