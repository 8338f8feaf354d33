//! Solution path of the 1D fused lasso: change of variables, segment cusum
//! statistics, and the knot-by-knot solver.

pub mod cusum;
pub mod reparam;
pub mod solver;

pub use cusum::{cusum, segment_residual};
pub use reparam::{center, design_column, design_column_norm_sq, design_inner_product, DifferenceOperator};
pub use solver::{lars_path, FusedPath, PathStep, Termination, TIE_TOLERANCE, ZERO_TOLERANCE};
