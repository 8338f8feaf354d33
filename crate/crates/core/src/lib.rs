//! Fused-lasso changepoint detection with exact post-selection inference.
//!
//! The crate finds the knots of the 1D fused-lasso solution path (each knot
//! activates one level change), then tests every detected change with a
//! p-value that accounts for the selection, by conditioning the knot
//! statistic on the event that led to it. The conditional null is a
//! truncated normal whose limits are simply the neighboring knots, so the
//! test is exact and cheap.
//!
//! Layout:
//! - [`path`]: the solution-path solver and its segment statistics.
//! - [`selective`]: pivots, confidence intervals, and the polyhedral
//!   reconstruction of the selection event.
//! - [`oracle`]: independent reference implementations used for
//!   verification (exact solves with certificates, knot scans, samplers).
//! - [`experiments`]: reproducible simulation studies.
//! - [`stats`], [`signal`], [`error`]: support types.

pub mod error;
pub mod experiments;
pub mod oracle;
pub mod path;
pub mod selective;
pub mod signal;
pub mod stats;

pub use error::{Error, Result};
pub use path::{lars_path, FusedPath, PathStep, Termination};
pub use selective::{
    hit_leave_polyhedron, infer_path, selective_interval, spacing_pivot,
    truncated_normal_cdf, truncated_normal_survival, PolyhedralSystem, StepInference,
};
pub use signal::{Signal, SigmaSource};
pub use stats::estimate_sigma_mad;
