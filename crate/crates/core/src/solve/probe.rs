use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::{axpy, norm_inf, scale};
use crate::model::{NonlinearitySpec, SampleGrid};
use crate::operator::{lowest_eigenpairs_with, morse_index_with, DiscreteOperator};

use super::functional::collapse_threshold;
use super::newton::{newton_solve, NewtonOptions};
use super::{SolutionState, SolveError};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    pub newton: NewtonOptions,
    /// Max-norm amplitudes cycled through the seeds.
    pub amplitudes: Vec<f64>,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { newton: NewtonOptions::default(), amplitudes: vec![0.5, 2.0, 8.0, 32.0], seed: 0x9e0be }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    ConsistentWithNonexistence,
    NontrivialFound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    pub trial: usize,
    pub amplitude: f64,
    pub l2: f64,
    pub linf: f64,
    pub energy: f64,
    pub residual: f64,
    pub morse_m: usize,
}

impl StateSummary {
    fn new(trial: usize, amplitude: f64, s: &SolutionState) -> Self {
        Self {
            trial,
            amplitude,
            l2: s.l2,
            linf: s.linf,
            energy: s.energy,
            residual: s.residual,
            morse_m: s.morse_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub lambda: f64,
    pub sigma0: Option<f64>,
    /// Number of eigenvalues of `A` below `σ₀`.
    pub k: usize,
    pub mu_k: Option<f64>,
    /// `g₀ < g(t)/t` on the standard sample grid.
    pub strict_slope_premise: bool,
    /// `λ + g₀ > μ_k`.
    pub above_mu_k_premise: bool,
    pub lambda_at_most_sigma0: bool,
    pub trials: usize,
    pub converged: usize,
    pub collapsed: usize,
    pub counter_witnesses: Vec<StateSummary>,
    pub collapse_threshold: f64,
    pub verdict: ProbeVerdict,
}

impl ProbeRecord {
    pub fn premises_hold(&self) -> bool {
        self.strict_slope_premise && self.above_mu_k_premise && self.lambda_at_most_sigma0
    }
}

fn strict_slope_premise(nl: &NonlinearitySpec) -> bool {
    SampleGrid::standard()
        .points
        .iter()
        .filter(|t| t.abs() > 1e-9)
        .all(|&t| nl.g0 < nl.g(t) / t)
}

/// Multi-start Newton search for nontrivial solutions. Seeds are random
/// combinations of the first `k + 1` eigenvectors of `A` scaled to the
/// configured amplitudes.
pub fn nonexistence_probe(
    op: &DiscreteOperator,
    nl: &NonlinearitySpec,
    lambda: f64,
    trials: usize,
    opts: &ProbeOptions,
) -> Result<ProbeRecord, SolveError> {
    if opts.amplitudes.is_empty() {
        return Err(SolveError::Domain("probe needs at least one amplitude".into()));
    }
    let eig = &opts.newton.eigen;
    let (k, mu_k) = match op.sigma0 {
        Some(s) => {
            let below = morse_index_with(&op.with_constant_offset(-s), 0.0, eig)?;
            let k = below.m;
            (k, (k > 0).then(|| below.eigenvalues[k - 1] + s))
        }
        None => (0, None),
    };
    let basis = lowest_eigenpairs_with(op, (k + 1).min(op.dofs()), eig)?;
    let threshold = collapse_threshold(&op.grid);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut converged = 0;
    let mut collapsed = 0;
    let mut counter_witnesses = Vec::new();
    for trial in 0..trials {
        let amplitude = opts.amplitudes[trial % opts.amplitudes.len()];
        let mut seed = vec![0.0; op.dofs()];
        for psi in &basis.eigenvectors {
            axpy(rng.gen_range(-1.0..1.0), psi, &mut seed);
        }
        let m = norm_inf(&seed);
        if m > 0.0 {
            scale(amplitude / m, &mut seed);
        }
        let state = match newton_solve(op, nl, lambda, &seed, &opts.newton) {
            Ok(s) => s,
            Err(SolveError::NearDegenerate { state }) => *state,
            Err(SolveError::NonConvergence { .. }) => continue,
            Err(e) => return Err(e),
        };
        converged += 1;
        if state.is_nontrivial(threshold) {
            counter_witnesses.push(StateSummary::new(trial, amplitude, &state));
        } else {
            collapsed += 1;
        }
    }
    let verdict = if counter_witnesses.is_empty() {
        ProbeVerdict::ConsistentWithNonexistence
    } else {
        ProbeVerdict::NontrivialFound
    };
    Ok(ProbeRecord {
        lambda,
        sigma0: op.sigma0,
        k,
        mu_k,
        strict_slope_premise: strict_slope_premise(nl),
        above_mu_k_premise: mu_k.is_none_or(|m| lambda + nl.g0 > m),
        lambda_at_most_sigma0: op.sigma0.is_none_or(|s| lambda <= s),
        trials,
        converged,
        collapsed,
        counter_witnesses,
        collapse_threshold: threshold,
        verdict,
    })
}
