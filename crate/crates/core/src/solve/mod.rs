//! Nontrivial solutions of the discrete problem
//! `F(u) = A u - λu - g(u) = 0`, the critical-point equation of
//!
//! `J_λ(u) = ½ Σ hᵈ |∇⁺u|² + ½ Σ hᵈ q u² - (λ/2) Σ hᵈ u² - Σ hᵈ G(u)`,
//!
//! with `∇⁺` the forward difference and zero ghost values outside the box.
//! The discrete gradient of `J_λ` is exactly `hᵈ F(u)`.

mod branch;
mod functional;
mod newton;
mod probe;

pub use branch::{continue_branch, BranchOutcome, ContinuationBranch, ContinuationOptions};
pub use functional::{
    collapse_threshold, energy, energy_identity_bound, energy_identity_check, positivity_shift, residual,
    shifted_fixed_point_defect,
};
pub use newton::{eigen_seed, find_nontrivial, newton_solve, NewtonOptions};
pub use probe::{nonexistence_probe, ProbeOptions, ProbeRecord, ProbeVerdict, StateSummary};

use serde::Serialize;
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::operator::OperatorError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionState {
    pub lambda: f64,
    #[serde(skip)]
    pub u: Vec<f64>,
    /// Discrete `L²` norm of `F(u)`.
    pub residual: f64,
    /// `c_λ = J_λ(u)`.
    pub energy: f64,
    pub linf: f64,
    pub l2: f64,
    pub morse_m: usize,
    #[serde(rename = "morse_M")]
    pub morse_big_m: usize,
    /// Smallest `|eigenvalue|` of the linearization `A - λ - g'(u)`.
    pub margin: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolutionState {
    /// Whether the state is distinguishable from `u = 0` on its grid.
    pub fn is_nontrivial(&self, threshold: f64) -> bool {
        self.l2 >= threshold
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("Newton iteration did not converge after {iterations} iterations (best residual {:e} at lambda = {})", .best.residual, .best.lambda)]
    NonConvergence { iterations: usize, best: Box<SolutionState> },
    #[error("linearization is nearly singular at lambda = {} (margin {:e})", .state.lambda, .state.margin)]
    NearDegenerate { state: Box<SolutionState> },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
