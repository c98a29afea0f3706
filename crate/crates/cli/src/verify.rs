//! The `verify` battery: every property suite, run against one config.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resonance_core::ladder::plan_ladder;
use resonance_core::model::{check_g6, check_hypotheses, SampleGrid};
use resonance_core::operator::{
    compare_spectra, lowest_eigenpairs_with, minmax_verify, EigenMethod, EigenOptions, MinmaxOptions,
};
use resonance_core::solve::{
    continue_branch, energy, energy_identity_check, find_nontrivial, nonexistence_probe, residual, BranchOutcome,
};
use serde::Serialize;

use crate::config::{ExperimentConfig, NonlinearityConfig};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.pass)
    }
}

fn suite(name: &str, pass: bool, detail: String) -> SuiteResult {
    SuiteResult { name: name.into(), pass, detail }
}

pub fn run(cfg: &ExperimentConfig) -> Result<VerifyReport, CliError> {
    let op = cfg.operator()?;
    let nl = cfg.nonlinearity();
    let eigen = cfg.eigen();
    let sigma0 = cfg.potential.sigma0;
    let k = cfg.solver.mode;
    let mut suites = Vec::new();

    let ladder = plan_ladder(cfg.grid.dim as u32, cfg.potential.integrability(cfg.grid.dim as u32));
    suites.push(match ladder {
        Ok(l) => suite("ladder", true, format!("case {}, j0 {}, terminal {}", l.case.as_str(), l.j0, l.terminal.as_str())),
        Err(e) => suite("ladder", false, e.to_string()),
    });

    let report = check_hypotheses(&nl, &SampleGrid::standard(), &cfg.thresholds);
    let failed = report.failed();
    suites.push(suite("hypotheses g1-g8", failed.is_empty(), format!("failed: {failed:?}")));

    let spectrum = lowest_eigenpairs_with(&op, k, &eigen)?;
    let g6 = check_g6(nl.g0, sigma0, &spectrum.eigenvalues);
    suites.push(suite(
        "g6 at sigma0",
        g6.some_i,
        format!("sigma0 + g0 = {}, some-i reading {}, all-i reading {}", sigma0 + nl.g0, g6.some_i, g6.all_i),
    ));

    if op.dofs() <= 2000 {
        let kk = (k + 2).min(op.dofs());
        let it = lowest_eigenpairs_with(&op, kk, &EigenOptions { method: EigenMethod::Iterative, ..eigen })?;
        let de = lowest_eigenpairs_with(&op, kk, &EigenOptions { method: EigenMethod::Dense, ..eigen })?;
        let worst = it
            .eigenvalues
            .iter()
            .zip(&de.eigenvalues)
            .map(|(a, b)| (a - b).abs() / b.abs().max(1e-300))
            .fold(0.0, f64::max);
        suites.push(suite("iterative vs dense", worst < 1e-8, format!("worst relative difference {worst:.2e}")));
    }

    let minmax = minmax_verify(&op, &spectrum, &MinmaxOptions { seed: cfg.seed, ..MinmaxOptions::default() });
    suites.push(suite("min-max", minmax.pass, format!("{} levels, {} trials", minmax.entries.len(), minmax.trials)));

    let shifted = compare_spectra(&op, &op.with_constant_offset(0.5), k, &eigen)?;
    let worst_shift = shifted.entries.iter().map(|e| (e.diff - 0.5).abs()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xc0);
    let bump: Vec<f64> = (0..op.dofs()).map(|_| rng.gen_range(0.0..1.0)).collect();
    let ordered = compare_spectra(&op, &op.with_potential_offset(&bump), k, &eigen)?;
    suites.push(suite(
        "comparison",
        shifted.pass() && worst_shift <= 1e-12 && ordered.pass(),
        format!("shift error {worst_shift:.1e}, {} ordering violations", ordered.violations.len()),
    ));

    let mut orders = Vec::new();
    for _ in 0..10 {
        let (su, sv) = (if rng.gen() { 1.0 } else { -1.0 }, if rng.gen() { 1.0 } else { -1.0 });
        let u: Vec<f64> = (0..op.dofs()).map(|_| su * rng.gen_range(0.1..1.0)).collect();
        let v: Vec<f64> = (0..op.dofs()).map(|_| sv * rng.gen_range(0.2..1.0)).collect();
        let lambda = sigma0 - 0.1;
        let exact = op.grid.inner(&residual(&op, &nl, lambda, &u), &v);
        let err = |t: f64| {
            let up: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + t * b).collect();
            let um: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - t * b).collect();
            ((energy(&op, &nl, lambda, &up) - energy(&op, &nl, lambda, &um)) / (2.0 * t) - exact).abs()
        };
        let (e1, e2) = (err(1e-3), err(1e-4));
        // A nonlinearity without third derivative leaves only round-off.
        orders.push(if e1 < 1e-11 { 2.0 } else { (e1 / e2).log10() });
    }
    let lo = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = orders.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    suites.push(suite(
        "gradient consistency",
        (1.8..=2.2).contains(&lo) && (1.8..=2.2).contains(&hi),
        format!("observed order in [{lo:.3}, {hi:.3}]"),
    ));

    if matches!(cfg.nonlinearity, NonlinearityConfig::Example51 { .. }) {
        let opts = cfg.continuation();
        let start = sigma0 - 0.2;
        match find_nontrivial(&op, &nl, start, k, &cfg.solver.amplitudes, &opts.newton)? {
            Some(seed) => {
                let branch = continue_branch(&op, &nl, start, sigma0, 20, &seed.u, &opts)?;
                let morse = branch.states.iter().all(|s| s.morse_m == k && s.morse_big_m == k);
                let margin = branch.states.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
                let identity = branch.states.iter().map(|s| energy_identity_check(s, &op, &nl)).fold(0.0, f64::max);
                let positive = branch.states.iter().all(|s| s.energy > 0.0);
                suites.push(suite(
                    "branch to sigma0",
                    branch.outcome == BranchOutcome::ReachedSigma0 && morse && margin > 1e-6 && identity < 1e-6 && positive,
                    format!(
                        "{} states, outcome {:?}, Morse index {k} throughout: {morse}, min margin {margin:.3e}, identity deviation {identity:.1e}, energies positive: {positive}",
                        branch.states.len(),
                        branch.outcome
                    ),
                ));
            }
            None => suites.push(suite("branch to sigma0", false, format!("no nontrivial seed at lambda = {start}"))),
        }

        let record = nonexistence_probe(&op, &nl, sigma0, 12, &cfg.probe())?;
        let consistent = if record.premises_hold() {
            record.counter_witnesses.is_empty()
        } else {
            // Outside the nonexistence regime the probe doubles as a
            // positive control.
            !record.counter_witnesses.is_empty()
        };
        suites.push(suite(
            "probe",
            consistent,
            format!(
                "premises hold: {}, {} nontrivial of {} converged",
                record.premises_hold(),
                record.counter_witnesses.len(),
                record.converged
            ),
        ));
    }

    Ok(VerifyReport { suites })
}
