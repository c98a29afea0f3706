use crate::linalg::{norm2, LinalgError};
use crate::model::NonlinearitySpec;
use crate::operator::{DiscreteOperator, Grid};

use super::SolutionState;

/// `F(u) = A u - λu - g(u)` nodewise.
pub fn residual(op: &DiscreteOperator, nl: &NonlinearitySpec, lambda: f64, u: &[f64]) -> Vec<f64> {
    let mut f = op.apply_vec(u);
    for (fi, &ui) in f.iter_mut().zip(u) {
        *fi -= lambda * ui + nl.g(ui);
    }
    f
}

/// `J_λ(u)` by edge sums, independent of the stencil in [`DiscreteOperator::apply`].
pub fn energy(op: &DiscreteOperator, nl: &NonlinearitySpec, lambda: f64, u: &[f64]) -> f64 {
    let g = &op.grid;
    let n = g.points_per_axis;
    let h = g.spacing();
    let w = g.cell_volume();
    let mut grad2 = 0.0;
    for p in 0..u.len() {
        for axis in 0..g.dim {
            let stride = g.stride(axis);
            let i = (p / stride) % n;
            let next = if i + 1 < n { u[p + stride] } else { 0.0 };
            let d = (next - u[p]) / h;
            grad2 += d * d;
            if i == 0 {
                // edge from the ghost node below
                let d0 = u[p] / h;
                grad2 += d0 * d0;
            }
        }
    }
    let mut quad = 0.0;
    let mut nonlinear = 0.0;
    for (p, &ui) in u.iter().enumerate() {
        quad += (op.potential[p] + op.shift - lambda) * ui * ui;
        nonlinear += nl.G(ui);
    }
    w * (0.5 * grad2 + 0.5 * quad - nonlinear)
}

/// `‖F(u)‖ · ‖u‖` in discrete `L²`: at a critical point the energy identity
/// deviation equals `½|⟨F(u), u⟩|`, so this bounds it.
pub fn energy_identity_bound(op: &DiscreteOperator, nl: &NonlinearitySpec, lambda: f64, u: &[f64]) -> f64 {
    let f = residual(op, nl, lambda, u);
    op.grid.l2_norm(&f) * op.grid.l2_norm(u)
}

/// `|c_λ - Σ hᵈ (½ g(u)u - G(u))|` for a state.
pub fn energy_identity_check(state: &SolutionState, op: &DiscreteOperator, nl: &NonlinearitySpec) -> f64 {
    let w = op.grid.cell_volume();
    let rhs: f64 = state.u.iter().map(|&t| 0.5 * nl.g(t) * t - nl.G(t)).sum::<f64>() * w;
    (state.energy - rhs).abs()
}

/// `‖u‖_{L²} < 10⁻⁶ (2L)^{d/2}` classifies a state as zero.
pub fn collapse_threshold(grid: &Grid) -> f64 {
    1e-6 * grid.volume().sqrt()
}

/// `m = max(0, 1 - μ₁) + 1`, so that `A + m ≥ 1 + ...` is positive definite.
pub fn positivity_shift(mu1: f64) -> f64 {
    (1.0 - mu1).max(0.0) + 1.0
}

/// `‖u - A_m⁻¹(λu + g(u) + m u)‖` in discrete `L²`: zero exactly at
/// solutions, without reference to the Newton Jacobian.
pub fn shifted_fixed_point_defect(
    op: &DiscreteOperator,
    nl: &NonlinearitySpec,
    lambda: f64,
    u: &[f64],
    m: f64,
) -> Result<f64, LinalgError> {
    let lu = op.to_band(-m, None).factor()?;
    let rhs: Vec<f64> = u.iter().map(|&t| lambda * t + nl.g(t) + m * t).collect();
    let image = lu.solve(&rhs)?;
    let diff: Vec<f64> = u.iter().zip(&image).map(|(a, b)| a - b).collect();
    Ok(norm2(&diff) * op.grid.cell_volume().sqrt())
}
