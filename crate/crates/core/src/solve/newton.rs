use crate::linalg::{norm_inf, scale};
use crate::model::NonlinearitySpec;
use crate::operator::{lowest_eigenpairs_with, morse_index_with, DiscreteOperator, EigenOptions};

use super::functional::{collapse_threshold, energy, residual};
use super::{SolutionState, SolveError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on `‖F(u)‖` (discrete `L²`).
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest damping factor tried in the backtracking line search.
    pub min_damping: f64,
    /// Eigenvalues of the linearization inside `(-morse_tol, morse_tol)`
    /// count as null directions.
    pub morse_tol: f64,
    /// Margin below which a converged state is reported as degenerate.
    pub degeneracy_floor: f64,
    pub eigen: EigenOptions,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 60,
            min_damping: 1.0 / 1024.0,
            morse_tol: 1e-9,
            degeneracy_floor: 1e-12,
            eigen: EigenOptions::default(),
        }
    }
}

fn raw_state(op: &DiscreteOperator, lambda: f64, u: Vec<f64>, res: f64, iterations: usize) -> SolutionState {
    SolutionState {
        lambda,
        linf: norm_inf(&u),
        l2: op.grid.l2_norm(&u),
        u,
        residual: res,
        energy: f64::NAN,
        morse_m: 0,
        morse_big_m: 0,
        margin: f64::NAN,
        iterations,
        converged: false,
    }
}

/// Damped Newton on `F` with Jacobian `A - λ - diag(g'(u))`, followed by
/// an eigensolve of that linearization for the Morse data.
pub fn newton_solve(
    op: &DiscreteOperator,
    nl: &NonlinearitySpec,
    lambda: f64,
    seed: &[f64],
    opts: &NewtonOptions,
) -> Result<SolutionState, SolveError> {
    if seed.len() != op.dofs() {
        return Err(SolveError::Domain(format!("seed has {} entries, grid has {}", seed.len(), op.dofs())));
    }
    if seed.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::Domain("seed contains non-finite values".into()));
    }
    let grid = op.grid;
    let mut u = seed.to_vec();
    let mut f = residual(op, nl, lambda, &u);
    let mut norm = grid.l2_norm(&f);
    let mut best = (norm, u.clone());
    let mut iterations = 0;

    while norm >= opts.tol {
        if iterations == opts.max_iter {
            return Err(SolveError::NonConvergence {
                iterations,
                best: Box::new(raw_state(op, lambda, best.1, best.0, iterations)),
            });
        }
        iterations += 1;
        let minus_gp: Vec<f64> = u.iter().map(|&t| -nl.gprime(t)).collect();
        let step = match op.to_band(lambda, Some(&minus_gp)).factor() {
            Ok(lu) => lu.solve(&f)?,
            Err(_) => {
                return Err(SolveError::NonConvergence {
                    iterations,
                    best: Box::new(raw_state(op, lambda, best.1, best.0, iterations)),
                })
            }
        };
        let mut t = 1.0;
        let mut accepted = false;
        while t >= opts.min_damping {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, d)| a - t * d).collect();
            let ft = residual(op, nl, lambda, &trial);
            let nt = grid.l2_norm(&ft);
            if nt.is_finite() && nt <= (1.0 - 1e-4 * t) * norm {
                u = trial;
                f = ft;
                norm = nt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(SolveError::NonConvergence {
                iterations,
                best: Box::new(raw_state(op, lambda, best.1, best.0, iterations)),
            });
        }
        if norm < best.0 {
            best = (norm, u.clone());
        }
    }

    let offset: Vec<f64> = u.iter().map(|&t| -lambda - nl.gprime(t)).collect();
    let morse = morse_index_with(&op.with_potential_offset(&offset), opts.morse_tol, &opts.eigen)?;
    let mut state = raw_state(op, lambda, u, norm, iterations);
    state.energy = energy(op, nl, lambda, &state.u);
    state.morse_m = morse.m;
    state.morse_big_m = morse.big_m;
    state.margin = morse.margin;
    state.converged = true;
    if morse.margin < opts.degeneracy_floor {
        return Err(SolveError::NearDegenerate { state: Box::new(state) });
    }
    Ok(state)
}

/// `amplitude · ψ_k / ‖ψ_k‖_∞` for the `k`-th eigenvector (1-based) of the
/// linearization at zero, `A - λ - g₀`, whose eigenvectors are those of `A`.
pub fn eigen_seed(op: &DiscreteOperator, k: usize, amplitude: f64, eigen: &EigenOptions) -> Result<Vec<f64>, SolveError> {
    if k == 0 {
        return Err(SolveError::Domain("eigenvector index is 1-based".into()));
    }
    let report = lowest_eigenpairs_with(op, k, eigen)?;
    let mut psi = report.eigenvectors[k - 1].clone();
    let m = norm_inf(&psi);
    scale(amplitude / m, &mut psi);
    Ok(psi)
}

/// Newton from `a · ψ_k` for each amplitude in turn; the first converged
/// state above the collapse threshold wins. `Ok(None)` if every attempt
/// collapsed or failed.
pub fn find_nontrivial(
    op: &DiscreteOperator,
    nl: &NonlinearitySpec,
    lambda: f64,
    k: usize,
    amplitudes: &[f64],
    opts: &NewtonOptions,
) -> Result<Option<SolutionState>, SolveError> {
    let unit = eigen_seed(op, k, 1.0, &opts.eigen)?;
    let threshold = collapse_threshold(&op.grid);
    for &a in amplitudes {
        let seed: Vec<f64> = unit.iter().map(|v| a * v).collect();
        match newton_solve(op, nl, lambda, &seed, opts) {
            Ok(state) if state.is_nontrivial(threshold) => return Ok(Some(state)),
            Ok(_) | Err(SolveError::NonConvergence { .. }) | Err(SolveError::NearDegenerate { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_example51, PotentialSpec, Well, WellShape};
    use crate::operator::{assemble, Grid};

    fn square_well(n: usize) -> DiscreteOperator {
        let pot = PotentialSpec {
            sigma0: 0.0,
            wells: vec![Well { shape: WellShape::Square, depth: 14.0, radius: 1.0, center: vec![0.0] }],
        };
        assemble(Grid::new(1, 12.0, n).unwrap(), &pot, 0.0).unwrap()
    }

    #[test]
    fn linear_problem_converges_to_zero() {
        let op = square_well(119);
        let nl = NonlinearitySpec::zero();
        let seed: Vec<f64> = (0..op.dofs()).map(|i| (i as f64 * 0.1).sin()).collect();
        let s = newton_solve(&op, &nl, -5.0, &seed, &NewtonOptions::default()).unwrap();
        assert!(s.l2 < 1e-10);
        assert!(s.iterations <= 2);
        let z = newton_solve(&op, &nl, -5.0, &vec![0.0; op.dofs()], &NewtonOptions::default()).unwrap();
        assert_eq!(z.iterations, 0);
        assert_eq!(z.l2, 0.0);
    }

    #[test]
    fn finds_third_mode_branch_state() {
        let op = square_well(239);
        let nl = build_example51(4.0).unwrap();
        let opts = NewtonOptions::default();
        let s = find_nontrivial(&op, &nl, -0.2, 3, &[1.0, 2.0, 4.0, 8.0], &opts).unwrap().unwrap();
        assert!(s.residual < 1e-10);
        assert!(s.energy > 0.0);
        assert_eq!((s.morse_m, s.morse_big_m), (3, 3));
    }

    #[test]
    fn rejects_bad_seed() {
        let op = square_well(19);
        let nl = NonlinearitySpec::zero();
        assert!(matches!(
            newton_solve(&op, &nl, 0.0, &[0.0; 3], &NewtonOptions::default()),
            Err(SolveError::Domain(_))
        ));
    }
}
