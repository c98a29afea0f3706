//! Potentials `V = V₁ + V₂`, autonomous nonlinearities `g(t)` with their
//! hypothesis checks, and the pointwise inequalities used in the
//! Palais–Smale analysis.

mod hypotheses;
mod inequalities;
mod nonlinearity;
mod potential;

pub use hypotheses::{
    check_g6, check_hypotheses, G6Report, HypothesisCheck, HypothesisReport, SampleGrid, Thresholds,
};
pub use inequalities::{brezis_lieb_bound, brezis_lieb_pointwise_gap, fucik_f, FucikForm};
pub use nonlinearity::{build_example51, NonlinearitySpec, ScalarFn};
pub use potential::{PotentialSpec, Well, WellShape};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("domain error: {0}")]
    Domain(String),
}
