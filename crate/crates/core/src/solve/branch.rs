use serde::Serialize;

use crate::model::NonlinearitySpec;
use crate::operator::DiscreteOperator;

use super::functional::collapse_threshold;
use super::newton::{newton_solve, NewtonOptions};
use super::{SolutionState, SolveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchOutcome {
    ReachedSigma0,
    LostConvergence,
    CollapsedToZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub newton: NewtonOptions,
    /// Largest allowed `‖u_{i+1} - u_i‖_{L²}` relative to `‖u_i‖_{L²}`.
    pub max_relative_jump: f64,
    /// Margin above which a state counts as nondegenerate.
    pub nondegenerate_margin: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self { newton: NewtonOptions::default(), max_relative_jump: 0.5, nondegenerate_margin: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuationBranch {
    pub states: Vec<SolutionState>,
    pub schedule: Vec<f64>,
    pub outcome: BranchOutcome,
    pub sup_linf: f64,
    /// `λ` at which the branch stopped, if it stopped early.
    pub failed_at: Option<f64>,
    /// Largest `λ` up to which every state has margin above the
    /// nondegeneracy threshold.
    pub nondegenerate_through: Option<f64>,
    pub max_jump: f64,
}

enum Step {
    Ok(SolutionState),
    Collapsed(SolutionState),
    Failed,
}

fn attempt(
    op: &DiscreteOperator,
    nl: &NonlinearitySpec,
    lambda: f64,
    seed: &[f64],
    prev: Option<&SolutionState>,
    trivial: bool,
    opts: &ContinuationOptions,
) -> Result<Step, SolveError> {
    let state = match newton_solve(op, nl, lambda, seed, &opts.newton) {
        Ok(s) => s,
        Err(SolveError::NonConvergence { .. } | SolveError::NearDegenerate { .. }) => return Ok(Step::Failed),
        Err(e) => return Err(e),
    };
    let threshold = collapse_threshold(&op.grid);
    if !trivial && !state.is_nontrivial(threshold) {
        return Ok(Step::Collapsed(state));
    }
    if let Some(p) = prev {
        let diff: Vec<f64> = state.u.iter().zip(&p.u).map(|(a, b)| a - b).collect();
        if op.grid.l2_norm(&diff) > opts.max_relative_jump * p.l2.max(threshold) {
            return Ok(Step::Failed);
        }
    }
    Ok(Step::Ok(state))
}

/// Secant predictor through the last two states, evaluated at `lambda`.
fn predict(states: &[SolutionState], lambda: f64) -> Vec<f64> {
    match states {
        [.., a, b] => {
            let r = (lambda - b.lambda) / (b.lambda - a.lambda);
            b.u.iter().zip(&a.u).map(|(ub, ua)| ub + r * (ub - ua)).collect()
        }
        [b] => b.u.clone(),
        [] => unreachable!("predictor needs a state"),
    }
}

/// Natural-parameter continuation on `steps + 1` equally spaced values of
/// `λ` from `lambda_start` to `lambda_end`. A failed step is retried once
/// through its midpoint.
pub fn continue_branch(
    op: &DiscreteOperator,
    nl: &NonlinearitySpec,
    lambda_start: f64,
    lambda_end: f64,
    steps: usize,
    seed: &[f64],
    opts: &ContinuationOptions,
) -> Result<ContinuationBranch, SolveError> {
    if steps == 0 || lambda_start >= lambda_end || lambda_start.is_nan() || lambda_end.is_nan() {
        return Err(SolveError::Domain(format!(
            "need steps ≥ 1 and lambda_start < lambda_end, got {steps} steps on [{lambda_start}, {lambda_end}]"
        )));
    }
    let schedule: Vec<f64> = (0..=steps)
        .map(|i| lambda_start + (lambda_end - lambda_start) * i as f64 / steps as f64)
        .collect();
    let threshold = collapse_threshold(&op.grid);

    let first = newton_solve(op, nl, lambda_start, seed, &opts.newton)?;
    let trivial = !first.is_nontrivial(threshold);
    let mut states = vec![first];
    let mut outcome = BranchOutcome::ReachedSigma0;
    let mut failed_at = None;
    let mut max_jump: f64 = 0.0;

    for &lambda in &schedule[1..] {
        let prev = states.last().expect("non-empty");
        let mut step = attempt(op, nl, lambda, &predict(&states, lambda), Some(prev), trivial, opts)?;
        if matches!(step, Step::Failed) {
            let mid = 0.5 * (prev.lambda + lambda);
            if let Step::Ok(m) = attempt(op, nl, mid, &predict(&states, mid), Some(prev), trivial, opts)? {
                let seed = {
                    let pair = [prev.clone(), m.clone()];
                    predict(&pair, lambda)
                };
                step = attempt(op, nl, lambda, &seed, Some(&m), trivial, opts)?;
            }
        }
        match step {
            Step::Ok(s) => {
                let diff: Vec<f64> = s.u.iter().zip(&prev.u).map(|(a, b)| a - b).collect();
                max_jump = max_jump.max(op.grid.l2_norm(&diff));
                states.push(s);
            }
            Step::Collapsed(s) => {
                states.push(s);
                outcome = BranchOutcome::CollapsedToZero;
                failed_at = Some(lambda);
                break;
            }
            Step::Failed => {
                outcome = BranchOutcome::LostConvergence;
                failed_at = Some(lambda);
                break;
            }
        }
    }

    let sup_linf = states.iter().map(|s| s.linf).fold(0.0, f64::max);
    let nondegenerate_through = states
        .iter()
        .take_while(|s| s.margin > opts.nondegenerate_margin)
        .last()
        .map(|s| s.lambda);
    Ok(ContinuationBranch { states, schedule, outcome, sup_linf, failed_at, nondegenerate_through, max_jump })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PotentialSpec, Well, WellShape};
    use crate::operator::{assemble, Grid};

    #[test]
    fn trivial_branch() {
        let pot = PotentialSpec {
            sigma0: 0.0,
            wells: vec![Well { shape: WellShape::Square, depth: 3.0, radius: 1.0, center: vec![0.0] }],
        };
        let op = assemble(Grid::new(1, 6.0, 59).unwrap(), &pot, 0.0).unwrap();
        let nl = NonlinearitySpec::zero();
        let b = continue_branch(&op, &nl, -0.5, -0.1, 4, &vec![0.0; 59], &ContinuationOptions::default()).unwrap();
        assert_eq!(b.outcome, BranchOutcome::ReachedSigma0);
        assert_eq!(b.states.len(), 5);
        assert_eq!(b.sup_linf, 0.0);
        assert!(b.states.windows(2).all(|w| w[0].lambda < w[1].lambda));
    }

    #[test]
    fn rejects_empty_schedule() {
        let op = assemble(Grid::new(1, 6.0, 9).unwrap(), &PotentialSpec::constant(0.0), 0.0).unwrap();
        let nl = NonlinearitySpec::zero();
        let seed = vec![0.0; 9];
        assert!(continue_branch(&op, &nl, 0.0, 0.0, 3, &seed, &ContinuationOptions::default()).is_err());
        assert!(continue_branch(&op, &nl, 0.0, 1.0, 0, &seed, &ContinuationOptions::default()).is_err());
    }
}
