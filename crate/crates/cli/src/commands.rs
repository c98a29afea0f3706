//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::Path;

use resonance_core::ladder::{evaluate_chain, parse_rational, plan_ladder, ExponentLadder, Integrability};
use resonance_core::model::{check_g6, check_hypotheses, HypothesisReport, SampleGrid};
use resonance_core::operator::{
    compare_spectra, lowest_eigenpairs_with, minmax_verify, ComparisonRecord, MinmaxOptions, MinmaxRecord,
    SpectrumReport,
};
use resonance_core::solve::{
    continue_branch, eigen_seed, energy_identity_check, find_nontrivial, newton_solve, nonexistence_probe,
    BranchOutcome, SolutionState,
};
use serde::Serialize;

use crate::cli::{Cli, Command, ConfigArg};
use crate::config::{ExperimentConfig, DEFAULT_CONFIG};
use crate::output::{resolve_out_dir, RunContext};
use crate::{verify, CliError};

pub fn run(cli: &Cli, argv: Vec<String>) -> Result<(), CliError> {
    match &cli.command {
        Command::Ladder { dim, p, v1_zero, json, table: _, bindings } => {
            ladder(cli.out.as_deref(), argv, *dim, p.as_deref(), *v1_zero, *json, bindings)
        }
        Command::Spectrum { config, k, compare } => {
            with_run(cli, argv, config, |cfg, ctx| spectrum(cfg, ctx, *k, compare.as_deref()))
        }
        Command::Solve { config, lambda, seed_mode } => {
            with_run(cli, argv, config, |cfg, ctx| solve(cfg, ctx, *lambda, seed_mode))
        }
        Command::Continue { config, from, to, steps } => {
            with_run(cli, argv, config, |cfg, ctx| continuation(cfg, ctx, *from, *to, *steps))
        }
        Command::Probe { config, lambda, trials } => {
            with_run(cli, argv, config, |cfg, ctx| probe(cfg, ctx, *lambda, *trials))
        }
        Command::Verify { config } => with_run(cli, argv, config, verify_command),
    }
}

fn load_config(arg: &ConfigArg) -> Result<(ExperimentConfig, String), CliError> {
    let text = match &arg.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?,
        None => DEFAULT_CONFIG.to_string(),
    };
    Ok((ExperimentConfig::parse(&text)?, text))
}

/// Loads the config, runs `body` against a fresh run directory and writes
/// the manifest whether or not the body succeeded.
fn with_run(
    cli: &Cli,
    argv: Vec<String>,
    config: &ConfigArg,
    body: impl FnOnce(&ExperimentConfig, &mut RunContext) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let (cfg, text) = load_config(config)?;
    let dir = resolve_out_dir(cli.out.as_deref(), cfg.output.dir.as_deref());
    let mut ctx = RunContext::new(dir, argv, Some(&text), Some(cfg.seed))?;
    let result = body(&cfg, &mut ctx);
    let dir = ctx.dir.clone();
    ctx.finish()?;
    if result.is_ok() {
        println!("reports written to {}", dir.display());
    }
    result
}

fn parse_bindings(ladder: &ExponentLadder, raw: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let labels = ladder.chain.labels();
    let mut out = BTreeMap::new();
    for item in raw {
        let (label, value) = item
            .rsplit_once('=')
            .ok_or_else(|| CliError::Usage(format!("binding {item:?} is not LABEL=VALUE")))?;
        let label = label.trim().to_string();
        if !labels.contains(&label) {
            return Err(CliError::Usage(format!("no chain constant {label:?}; the chain has {}", labels.join(", "))));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("binding {item:?}: {value:?} is not a number")))?;
        out.insert(label, value);
    }
    Ok(out)
}

fn ladder(
    out: Option<&Path>,
    argv: Vec<String>,
    dim: u32,
    p: Option<&str>,
    v1_zero: bool,
    json: bool,
    raw_bindings: &[String],
) -> Result<(), CliError> {
    let v1 = match (v1_zero, p) {
        (true, _) => Integrability::Vanishing,
        (false, Some(text)) => Integrability::Lp(parse_rational(text)?),
        (false, None) => return Err(CliError::Usage("give --p P or --v1-zero".into())),
    };
    let mut ladder = plan_ladder(dim, v1)?;
    let bindings = parse_bindings(&ladder, raw_bindings)?;
    for factor in &mut ladder.chain.factors {
        if let Some(v) = bindings.get(&factor.label()) {
            factor.value = Some(*v);
        }
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&ladder)?);
    } else {
        print!("{}", ladder_table(&ladder));
    }
    if let Some(dir) = out {
        let mut ctx = RunContext::new(dir.to_path_buf(), argv, None, None)?;
        ctx.write_json("ladder.json", &ladder)?;
        ctx.finish()?;
    }
    Ok(())
}

pub fn ladder_table(ladder: &ExponentLadder) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "dimension  {}", ladder.dim);
    let _ = writeln!(s, "V1         {}", match ladder.integrability {
        Integrability::Vanishing => "0".to_string(),
        Integrability::Lp(p) => format!("L^{p}"),
    });
    let _ = writeln!(s, "case       {}", ladder.case.as_str());
    let _ = writeln!(s, "j0         {}", ladder.j0);
    let _ = writeln!(s, "  i  q_i            decimal");
    for (i, q) in ladder.exponents.iter().enumerate() {
        let _ = writeln!(s, "{i:>3}  {:<13}  {:.6}", q.to_string(), *q.numer() as f64 / *q.denom() as f64);
    }
    if let Some(t) = ladder.tail {
        let _ = writeln!(s, "tail       {t}");
    }
    let _ = writeln!(s, "terminal   {}", ladder.terminal.as_str());
    let _ = writeln!(s, "chain      {}", ladder.chain.labels().join(" · "));
    match evaluate_chain(&ladder.chain, &BTreeMap::new()) {
        Ok(v) => {
            let _ = writeln!(s, "value      {v}");
        }
        Err(e) => {
            let _ = writeln!(s, "value      {e}");
        }
    }
    s
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    spectrum: &'a SpectrumReport,
    minmax: &'a MinmaxRecord,
    comparison: Option<&'a ComparisonRecord>,
}

fn spectrum(cfg: &ExperimentConfig, ctx: &mut RunContext, k: usize, compare: Option<&Path>) -> Result<(), CliError> {
    let op = cfg.operator()?;
    let report = lowest_eigenpairs_with(&op, k, &cfg.eigen())?;
    let minmax = minmax_verify(&op, &report, &MinmaxOptions { seed: cfg.seed, ..MinmaxOptions::default() });
    let comparison = match compare {
        Some(path) => {
            let other = ExperimentConfig::load(path)?;
            if other.grid != cfg.grid {
                return Err(CliError::Config {
                    path: "grid".into(),
                    message: format!("{} uses a different grid", path.display()),
                });
            }
            Some(compare_spectra(&op, &other.operator()?, k, &cfg.eigen())?)
        }
        None => None,
    };
    ctx.write_json("spectrum.json", &SpectrumOutput { spectrum: &report, minmax: &minmax, comparison: comparison.as_ref() })?;
    if cfg.output.dump_vectors {
        let names: Vec<String> = (1..=k).map(|j| format!("psi{j}")).collect();
        let cols: Vec<(&str, &[f64])> =
            names.iter().map(String::as_str).zip(report.eigenvectors.iter().map(Vec::as_slice)).collect();
        ctx.write_vector_csv("eigenvectors.csv", &op.grid, &cols)?;
    }
    println!("  j  mu_j                   residual   trusted");
    for j in 0..report.k() {
        println!(
            "{:>3}  {:<21}  {:.2e}   {}",
            j + 1,
            report.eigenvalues[j],
            report.residual_norms[j],
            if report.untrusted[j] { "no" } else { "yes" }
        );
    }
    println!("min-max checks: {}", if minmax.pass { "pass" } else { "FAIL" });
    if let Some(c) = &comparison {
        println!("comparison: {} violation(s)", c.violations.len());
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    state: &'a SolutionState,
    energy_identity_deviation: f64,
    hypotheses: HypothesisReport,
}

fn read_seed_file(path: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read seed {path}: {e}")))?;
    let values: Vec<f64> = text
        .lines()
        .filter_map(|line| line.rsplit(',').next())
        .filter_map(|last| last.trim().parse().ok())
        .collect();
    if values.len() != n {
        return Err(CliError::Usage(format!("seed file {path} has {} values, grid has {n} nodes", values.len())));
    }
    Ok(values)
}

fn solve(cfg: &ExperimentConfig, ctx: &mut RunContext, lambda: f64, seed_mode: &str) -> Result<(), CliError> {
    let op = cfg.operator()?;
    let nl = cfg.nonlinearity();
    let opts = cfg.newton();
    let state = match seed_mode.split_once(':') {
        Some(("eig", k)) => {
            let k: usize = k.parse().map_err(|_| CliError::Usage(format!("bad eigenvector index in {seed_mode:?}")))?;
            match find_nontrivial(&op, &nl, lambda, k, &cfg.solver.amplitudes, &opts)? {
                Some(s) => s,
                None => {
                    let seed = eigen_seed(&op, k, cfg.solver.amplitudes[0], &opts.eigen)?;
                    newton_solve(&op, &nl, lambda, &seed, &opts)?
                }
            }
        }
        Some(("file", path)) => newton_solve(&op, &nl, lambda, &read_seed_file(path, op.dofs())?, &opts)?,
        None if seed_mode == "zero" => newton_solve(&op, &nl, lambda, &vec![0.0; op.dofs()], &opts)?,
        _ => return Err(CliError::Usage(format!("unknown seed mode {seed_mode:?}; use eig:K, file:PATH or zero"))),
    };
    let mut hypotheses = check_hypotheses(&nl, &SampleGrid::standard(), &cfg.thresholds);
    let mus = lowest_eigenpairs_with(&op, cfg.solver.mode, &opts.eigen)?.eigenvalues;
    hypotheses.g6 = Some(check_g6(nl.g0, lambda, &mus));
    ctx.write_json(
        "solution.json",
        &SolveOutput { state: &state, energy_identity_deviation: energy_identity_check(&state, &op, &nl), hypotheses },
    )?;
    ctx.write_vector_csv("solution.csv", &op.grid, &[("u", &state.u)])?;
    println!(
        "lambda {}  residual {:.2e}  energy {}  linf {}  morse (m, M) = ({}, {})  margin {:.3e}",
        state.lambda, state.residual, state.energy, state.linf, state.morse_m, state.morse_big_m, state.margin
    );
    Ok(())
}

fn continuation(cfg: &ExperimentConfig, ctx: &mut RunContext, from: f64, to: f64, steps: usize) -> Result<(), CliError> {
    let op = cfg.operator()?;
    let nl = cfg.nonlinearity();
    let opts = cfg.continuation();
    let start = find_nontrivial(&op, &nl, from, cfg.solver.mode, &cfg.solver.amplitudes, &opts.newton)?.ok_or_else(|| {
        CliError::Numerical(format!(
            "no nontrivial state at lambda = {from} from mode {} with amplitudes {:?}",
            cfg.solver.mode, cfg.solver.amplitudes
        ))
    })?;
    let branch = continue_branch(&op, &nl, from, to, steps, &start.u, &opts)?;
    ctx.write_json("branch.json", &branch)?;
    ctx.plot_data("branch.csv", &branch)?;
    if cfg.output.dump_vectors {
        for (i, s) in branch.states.iter().enumerate() {
            ctx.write_vector_csv(&format!("states/state_{i:03}.csv"), &op.grid, &[("u", &s.u)])?;
        }
    }
    println!(
        "{} states, outcome {:?}, sup_linf {}, max jump {:.3e}",
        branch.states.len(),
        branch.outcome,
        branch.sup_linf,
        branch.max_jump
    );
    match branch.outcome {
        BranchOutcome::ReachedSigma0 => Ok(()),
        other => Err(CliError::Numerical(format!(
            "branch stopped ({other:?}) at lambda = {}",
            branch.failed_at.map_or("?".into(), |l| l.to_string())
        ))),
    }
}

fn probe(cfg: &ExperimentConfig, ctx: &mut RunContext, lambda: f64, trials: usize) -> Result<(), CliError> {
    let op = cfg.operator()?;
    let record = nonexistence_probe(&op, &cfg.nonlinearity(), lambda, trials, &cfg.probe())?;
    ctx.write_json("probe.json", &record)?;
    println!(
        "k = {}, premises hold: {}, {} of {} converged, {} collapsed, verdict {:?}",
        record.k,
        record.premises_hold(),
        record.converged,
        record.trials,
        record.collapsed,
        record.verdict
    );
    Ok(())
}

fn verify_command(cfg: &ExperimentConfig, ctx: &mut RunContext) -> Result<(), CliError> {
    let report = verify::run(cfg)?;
    ctx.write_json("verify.json", &report)?;
    for suite in &report.suites {
        println!("{:<28} {}  {}", suite.name, if suite.pass { "pass" } else { "FAIL" }, suite.detail);
    }
    let failed: Vec<&str> = report.suites.iter().filter(|s| !s.pass).map(|s| s.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

