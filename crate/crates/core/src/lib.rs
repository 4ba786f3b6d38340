//! Coset criteria for p-kernels in isogeny classes of p-divisible groups,
//! with a finite-field oracle for cross-checking.

pub mod affine;
pub mod calibration;
pub mod coset;
pub mod criterion;
pub mod error;
pub mod exec;
pub mod lab;
pub mod perm;
pub mod polygon;
pub mod semimodule;

/// Library version embedded in every table.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest supported height.
pub const MAX_RANK: usize = 12;

pub use affine::{AffineWeylElement, GroupOp, ReducedDecomposition};
pub use criterion::{adlv_nonempty, incidence_table, lifts_to, ConventionManifest, IncidenceTable, Limits};
pub use calibration::{calibrate, CalibrationOptions, CalibrationReport, OracleOptions};
pub use coset::{CosetEngine, CosetSet, FoldRule};
pub use error::{Error, Result};
pub use exec::Execution;
pub use perm::Permutation;
pub use polygon::{HodgeDatum, NewtonPolygon};
