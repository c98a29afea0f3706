//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain numbers or strings and returns a JSON string,
//! so the page needs nothing beyond `JSON.parse`. The `*_json` functions
//! hold the logic and are usable (and tested) natively.

use resonance_core::ladder::{parse_rational, plan_ladder, Integrability};
use resonance_core::model::{build_example51, PotentialSpec, Well, WellShape};
use resonance_core::operator::{assemble, lowest_eigenpairs, Grid};
use resonance_core::solve::{continue_branch, find_nontrivial, ContinuationOptions};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn square_well(depth: f64, radius: f64) -> PotentialSpec {
    PotentialSpec {
        sigma0: 0.0,
        wells: vec![Well { shape: WellShape::Square, depth, radius, center: vec![0.0] }],
    }
}

fn axis(grid: &Grid) -> Vec<f64> {
    (0..grid.dofs()).map(|i| grid.coords(i)[0]).collect()
}

/// `p` is an exponent such as `"12"` or `"21/2"`; an empty string or `"0"`
/// means `V₁ = 0`.
pub fn ladder_json(dim: u32, p: &str) -> Result<String, String> {
    let v1 = match p.trim() {
        "" | "0" => Integrability::Vanishing,
        text => Integrability::Lp(parse_rational(text).map_err(|e| e.to_string())?),
    };
    let ladder = plan_ladder(dim, v1).map_err(|e| e.to_string())?;
    #[derive(Serialize)]
    struct Out<'a> {
        ladder: &'a resonance_core::ladder::ExponentLadder,
        decimals: Vec<f64>,
        labels: Vec<String>,
    }
    let decimals = ladder.exponents.iter().map(|q| *q.numer() as f64 / *q.denom() as f64).collect();
    let labels = ladder.chain.labels();
    serde_json::to_string(&Out { ladder: &ladder, decimals, labels }).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SpectrumOut {
    x: Vec<f64>,
    potential: Vec<f64>,
    eigenvalues: Vec<f64>,
    untrusted: Vec<bool>,
    eigenvectors: Vec<Vec<f64>>,
}

/// Lowest `k` levels of a 1D square well of the given depth below `σ₀ = 0`.
pub fn spectrum_json(depth: f64, radius: f64, half_width: f64, points: usize, k: usize) -> Result<String, String> {
    if !(radius > 0.0 && radius < half_width) {
        return Err("need 0 < radius < half width".into());
    }
    let grid = Grid::new(1, half_width, points).map_err(|e| e.to_string())?;
    let op = assemble(grid, &square_well(depth, radius), 0.0).map_err(|e| e.to_string())?;
    let report = lowest_eigenpairs(&op, k).map_err(|e| e.to_string())?;
    let out = SpectrumOut {
        x: axis(&grid),
        potential: op.q(),
        eigenvalues: report.eigenvalues.clone(),
        untrusted: report.untrusted.clone(),
        eigenvectors: report.eigenvectors,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct BranchPoint {
    lambda: f64,
    energy: f64,
    linf: f64,
    morse_m: usize,
    margin: f64,
}

#[derive(Serialize)]
struct BranchOut {
    outcome: String,
    x: Vec<f64>,
    points: Vec<BranchPoint>,
    first: Vec<f64>,
    last: Vec<f64>,
}

/// Continues the mode-`mode` branch of `-u'' + V u = λu + g(u)` with the
/// logarithmic nonlinearity of strength `alpha`, from `λ = -0.2` to `σ₀ = 0`.
pub fn branch_json(depth: f64, alpha: f64, mode: usize, points: usize, steps: usize) -> Result<String, String> {
    let grid = Grid::new(1, 12.0, points).map_err(|e| e.to_string())?;
    let op = assemble(grid, &square_well(depth, 1.0), 0.0).map_err(|e| e.to_string())?;
    let nl = build_example51(alpha).map_err(|e| e.to_string())?;
    let opts = ContinuationOptions::default();
    let start = find_nontrivial(&op, &nl, -0.2, mode, &[1.0, 2.0, 4.0, 8.0, 16.0], &opts.newton)
        .map_err(|e| e.to_string())?
        .ok_or("no nontrivial solution from this mode at lambda = -0.2")?;
    let branch = continue_branch(&op, &nl, -0.2, 0.0, steps, &start.u, &opts).map_err(|e| e.to_string())?;
    let out = BranchOut {
        outcome: format!("{:?}", branch.outcome),
        x: axis(&grid),
        points: branch
            .states
            .iter()
            .map(|s| BranchPoint { lambda: s.lambda, energy: s.energy, linf: s.linf, morse_m: s.morse_m, margin: s.margin })
            .collect(),
        first: branch.states.first().map(|s| s.u.clone()).unwrap_or_default(),
        last: branch.states.last().map(|s| s.u.clone()).unwrap_or_default(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn ladder(dim: u32, p: &str) -> Result<String, JsValue> {
    ladder_json(dim, p).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spectrum(depth: f64, radius: f64, half_width: f64, points: usize, k: usize) -> Result<String, JsValue> {
    spectrum_json(depth, radius, half_width, points, k).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn branch(depth: f64, alpha: f64, mode: usize, points: usize, steps: usize) -> Result<String, JsValue> {
    branch_json(depth, alpha, mode, points, steps).map_err(|e| JsValue::from_str(&e))
}
