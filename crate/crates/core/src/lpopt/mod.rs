//! Linear programming: a dense two-phase simplex with certificates, and the
//! fragment-fitting programs built on it.
//!
//! Response functions are inputs here, never variables: jointly fitting
//! preparations and responses is bilinear. Fits therefore probe fixed
//! response families. A feasible fit exhibits a model; an infeasible verdict
//! only rules out models over that particular Λ and response assignment.

mod fit;
mod simplex;

pub use fit::{fit_preparations, max_overlap_fit, max_total_overlap_fit, OverlapFit, Responses};
pub use simplex::{solve_lp, Certificate, LinearProgram, LpSolution, LpStatus, Sense, Verification};
