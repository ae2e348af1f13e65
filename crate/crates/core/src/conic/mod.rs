//! Numerical backends for the two subproblems: a structured Hermitian SDP
//! solver and an exact scalar max-min quadratic solver.

mod psd;
mod scalar;
mod sdp;

pub use psd::psd_project;
pub use scalar::{solve_scalar_maxmin_quadratic, Quadratic, ScalarMaxMin};
pub use sdp::{solve_maxmin_sdp, GainMatrix, SdpProblem, SdpResiduals, SdpSolution};
