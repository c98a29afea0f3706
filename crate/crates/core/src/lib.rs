//! Numerical toolkit for asymptotically linear Schrödinger equations
//! `-Δu + V(x)u = λu + g(u)` whose nonlinearity resonates with the bottom
//! of the essential spectrum `σ₀ = lim V(x)`.
//!
//! * [`ladder`]: exact-rational bootstrap schedules for the `W^{2,q}` regularity
//!   iteration, with step counts and terminal regularity classes.
//! * [`model`]: potentials, nonlinearities and hypothesis checks.
//! * [`operator`]: finite-difference discretization of `-Δ + V` on a box,
//!   lowest eigenpairs, min-max and comparison checks, Morse indices.
//! * [`solve`]: residual and energy functionals, Newton iteration, natural
//!   continuation in `λ`, and a multi-start nonexistence probe.

pub mod ladder;
pub mod linalg;
pub mod model;
pub mod operator;
pub mod solve;
