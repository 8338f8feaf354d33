//! Independent reference implementations: exact fixed-penalty solves with
//! optimality certificates, knot location by scan, and truncated-normal
//! sampling. The rest of the crate is tested against these; they deliberately
//! share no algorithmic machinery with the path solver.

pub mod dense;
pub mod flsa;
pub mod sampler;
pub mod scan;

pub use dense::{dense_lars_path, DenseStep, DENSE_LARS_MAX_N};
pub use flsa::{
    changepoints_of, flsa_certified, flsa_solve, kkt_certificate, FlsaSolution, KktReport,
    JUMP_THRESHOLD, KKT_TOLERANCE,
};
pub use sampler::tn_sample;
pub use scan::{knot_scan, KnotEvent};
