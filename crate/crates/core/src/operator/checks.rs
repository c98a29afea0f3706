//! Min-max characterization, discrete spectral comparison and Morse
//! counting on top of computed eigenpairs.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eigen::{lowest_eigenpairs_with, EigenOptions, SpectrumReport};
use super::{DiscreteOperator, OperatorError};
use crate::linalg::{axpy, dot, norm2, scale};

fn lambda_max(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `Ψᵀ B Ψ` for the first `j` eigenvectors in the discrete `L²` pairing,
/// where `apply` computes `B ψ`.
fn projected(grid_w: f64, vecs: &[Vec<f64>], images: &[Vec<f64>]) -> DMatrix<f64> {
    let j = vecs.len();
    DMatrix::from_fn(j, j, |a, b| 0.5 * grid_w * (dot(&vecs[a], &images[b]) + dot(&vecs[b], &images[a])))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinmaxOptions {
    pub trials: usize,
    pub seed: u64,
    /// Absolute tolerance, scaled by `max(1, |μⱼ|)`.
    pub tol: f64,
}

impl Default for MinmaxOptions {
    fn default() -> Self {
        Self { trials: 100, seed: 0x6d6d, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinmaxEntry {
    pub j: usize,
    pub mu: f64,
    /// `max` of the Rayleigh quotient over the span of `ψ₁..ψⱼ`.
    pub span_max: f64,
    pub attained: bool,
    /// Largest `RQ(φ) - μⱼ` over `φ ∈ span(ψ₁..ψⱼ) ∩ 𝔅^⊥` for random `𝔅`.
    pub sup_inf_worst: f64,
    pub sup_inf_ok: bool,
    /// Smallest `RQ(v) - μⱼ` over random `v ⊥ ψ₁..ψ_{j-1}`.
    pub lower_worst: f64,
    pub lower_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinmaxRecord {
    pub trials: usize,
    pub entries: Vec<MinmaxEntry>,
    pub pass: bool,
}

/// Checks each `μⱼ` of `report` against the inf-max and sup-inf
/// characterizations using `opts.trials` random subspaces and vectors.
pub fn minmax_verify(op: &DiscreteOperator, report: &SpectrumReport, opts: &MinmaxOptions) -> MinmaxRecord {
    let n = op.dofs();
    let w = op.grid.cell_volume();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let images: Vec<Vec<f64>> = report.eigenvectors.iter().map(|v| op.apply_vec(v)).collect();
    let mut entries = Vec::with_capacity(report.k());
    for j in 1..=report.k() {
        let mu = report.eigenvalues[j - 1];
        let tol = opts.tol * mu.abs().max(1.0);
        let psi = &report.eigenvectors[..j];

        let span_max = lambda_max(projected(w, psi, &images[..j]));
        let attained = (span_max - mu).abs() <= tol;

        // (b) φ ∈ Eⱼ ∩ 𝔅^⊥ for random (j-1)-dimensional 𝔅.
        let mut sup_inf_worst = f64::NEG_INFINITY;
        for _ in 0..opts.trials {
            // Rows of BᵀΨ in coefficient space, orthonormalized.
            let mut rows: Vec<Vec<f64>> = Vec::with_capacity(j - 1);
            for _ in 0..j.saturating_sub(1) {
                let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let mut row: Vec<f64> = psi.iter().map(|p| dot(&b, p)).collect();
                for r in &rows {
                    let c = dot(r, &row);
                    axpy(-c, r, &mut row);
                }
                let nr = norm2(&row);
                if nr > 0.0 {
                    scale(1.0 / nr, &mut row);
                    rows.push(row);
                }
            }
            let mut c: Vec<f64> = (0..j).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for _ in 0..2 {
                for r in &rows {
                    let d = dot(r, &c);
                    axpy(-d, r, &mut c);
                }
            }
            if norm2(&c) < 1e-12 {
                continue;
            }
            let mut phi = vec![0.0; n];
            for (ci, p) in c.iter().zip(psi) {
                axpy(*ci, p, &mut phi);
            }
            sup_inf_worst = sup_inf_worst.max(op.rayleigh_quotient(&phi) - mu);
        }
        let sup_inf_ok = sup_inf_worst <= tol;

        // (c) random vectors orthogonal to ψ₁..ψ_{j-1} sit above μⱼ.
        let mut lower_worst = f64::INFINITY;
        for _ in 0..opts.trials {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for _ in 0..2 {
                for p in &psi[..j - 1] {
                    let c = w * dot(p, &v);
                    axpy(-c, p, &mut v);
                }
            }
            lower_worst = lower_worst.min(op.rayleigh_quotient(&v) - mu);
        }
        let lower_ok = lower_worst >= -tol;
        entries.push(MinmaxEntry { j, mu, span_max, attained, sup_inf_worst, sup_inf_ok, lower_worst, lower_ok });
    }
    let pass = entries.iter().all(|e| e.attained && e.sup_inf_ok && e.lower_ok);
    MinmaxRecord { trials: opts.trials, entries, pass }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonEntry {
    pub j: usize,
    pub mu1: f64,
    pub mu2: f64,
    pub diff: f64,
    /// Lower bound on `μⱼ(A₂) - μⱼ(A₁)` from the min-max principle:
    /// `μⱼ(A₂) - λ_max(Ψᵀ A₁ Ψ)` over the first `j` eigenvectors of `A₂`.
    pub certified_margin: f64,
    pub strict_expected: bool,
    pub ordered: bool,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub k: usize,
    pub entries: Vec<ComparisonEntry>,
    pub violations: Vec<String>,
}

impl ComparisonRecord {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares the lowest `k` eigenvalues of `op1 ≤ op2` (nodewise, strict
/// somewhere).
pub fn compare_spectra(
    op1: &DiscreteOperator,
    op2: &DiscreteOperator,
    k: usize,
    opts: &EigenOptions,
) -> Result<ComparisonRecord, OperatorError> {
    if op1.grid != op2.grid {
        return Err(OperatorError::Domain("operators live on different grids".into()));
    }
    let q1 = op1.q();
    let q2 = op2.q();
    if let Some(i) = (0..q1.len()).find(|&i| q1[i] > q2[i]) {
        return Err(OperatorError::Domain(format!(
            "potential ordering violated at node {i} (x = {:?}): q1 = {} > q2 = {}",
            op1.grid.coords(i),
            q1[i],
            q2[i]
        )));
    }
    if q1 == q2 {
        return Err(OperatorError::Domain("potentials coincide; strict inequality needed at some node".into()));
    }
    let r1 = lowest_eigenpairs_with(op1, k, opts)?;
    let r2 = lowest_eigenpairs_with(op2, k, opts)?;
    let w = op1.grid.cell_volume();
    let images1: Vec<Vec<f64>> = r2.eigenvectors.iter().map(|v| op1.apply_vec(v)).collect();

    let mut entries = Vec::with_capacity(k);
    let mut violations = Vec::new();
    for j in 1..=k {
        let (mu1, mu2) = (r1.eigenvalues[j - 1], r2.eigenvalues[j - 1]);
        let diff = mu2 - mu1;
        let bound = lambda_max(projected(w, &r2.eigenvectors[..j], &images1[..j]));
        let certified_margin = mu2 - bound;
        let tol = 1e-8 * mu1.abs().max(mu2.abs()).max(1.0);
        let strict_expected = certified_margin > 1e-9;
        let ordered = diff >= -tol;
        let strict = diff > 0.0;
        if !ordered {
            violations.push(format!("j = {j}: mu1 = {mu1} exceeds mu2 = {mu2}"));
        }
        if strict_expected && !strict {
            violations.push(format!(
                "j = {j}: certified margin {certified_margin:e} but mu2 - mu1 = {diff:e}"
            ));
        }
        entries.push(ComparisonEntry { j, mu1, mu2, diff, certified_margin, strict_expected, ordered, strict });
    }
    Ok(ComparisonRecord { k, entries, violations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseReport {
    /// Eigenvalues below `-tol`.
    pub m: usize,
    /// Eigenvalues below `+tol`.
    #[serde(rename = "M")]
    pub big_m: usize,
    /// Smallest `|μ|`.
    pub margin: f64,
    pub eigenvalues: Vec<f64>,
}

pub fn morse_index(op: &DiscreteOperator, tol: f64) -> Result<MorseReport, OperatorError> {
    morse_index_with(op, tol, &EigenOptions::default())
}

/// Counts negative and non-positive eigenvalues, doubling the number of
/// computed eigenpairs until the largest exceeds `tol`.
pub fn morse_index_with(op: &DiscreteOperator, tol: f64, opts: &EigenOptions) -> Result<MorseReport, OperatorError> {
    let n = op.dofs();
    let mut k = 8.min(n);
    loop {
        let r = lowest_eigenpairs_with(op, k, opts)?;
        let top = *r.eigenvalues.last().expect("k ≥ 1");
        if top > tol || k == n {
            let m = r.eigenvalues.iter().filter(|&&mu| mu < -tol).count();
            let big_m = r.eigenvalues.iter().filter(|&&mu| mu < tol).count();
            let margin = r.eigenvalues.iter().map(|mu| mu.abs()).fold(f64::INFINITY, f64::min);
            return Ok(MorseReport { m, big_m, margin, eigenvalues: r.eigenvalues });
        }
        k = (2 * k).min(n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PotentialSpec, Well, WellShape};
    use crate::operator::{assemble, lowest_eigenpairs, Grid};

    fn well_op(depth: f64) -> DiscreteOperator {
        let pot = PotentialSpec {
            sigma0: 0.0,
            wells: vec![Well { shape: WellShape::Square, depth, radius: 1.0, center: vec![0.0] }],
        };
        assemble(Grid::new(1, 8.0, 159).unwrap(), &pot, 0.0).unwrap()
    }

    #[test]
    fn minmax_passes_and_detects_fault() {
        let op = well_op(10.0);
        let r = lowest_eigenpairs(&op, 3).unwrap();
        let opts = MinmaxOptions { trials: 20, ..Default::default() };
        assert!(minmax_verify(&op, &r, &opts).pass);
        let mut bad = r.clone();
        bad.eigenvalues[1] += 1e-2;
        let rec = minmax_verify(&op, &bad, &opts);
        assert!(!rec.pass);
        assert!(!rec.entries[1].attained);
    }

    #[test]
    fn constant_shift_comparison() {
        let op1 = well_op(6.0);
        let op2 = op1.with_constant_offset(0.25);
        let rec = compare_spectra(&op1, &op2, 3, &EigenOptions::default()).unwrap();
        assert!(rec.pass());
        for e in &rec.entries {
            assert!((e.diff - 0.25).abs() < 1e-12);
            assert!((e.certified_margin - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn comparison_precondition() {
        let op1 = well_op(6.0);
        let op2 = well_op(7.0);
        let err = compare_spectra(&op1, &op2, 2, &EigenOptions::default()).unwrap_err();
        assert!(err.to_string().contains("node"));
        assert!(compare_spectra(&op1, &op1, 2, &EigenOptions::default()).is_err());
        assert!(compare_spectra(&op2, &op1, 2, &EigenOptions::default()).unwrap().pass());
    }

    #[test]
    fn morse_counts() {
        let op = well_op(10.0);
        let r = lowest_eigenpairs(&op, 3).unwrap();
        let level = 0.5 * (r.eigenvalues[1] + r.eigenvalues[2]);
        let lin = op.with_constant_offset(-level);
        let m = morse_index(&lin, 1e-9).unwrap();
        assert_eq!((m.m, m.big_m), (2, 2));
        let pd = op.with_constant_offset(20.0);
        let m = morse_index(&pd, 1e-9).unwrap();
        assert_eq!((m.m, m.big_m), (0, 0));
        assert!((m.margin - (r.eigenvalues[0] + 20.0)).abs() < 1e-9);
        let at = op.with_constant_offset(-r.eigenvalues[1]);
        let m = morse_index(&at, 1e-6).unwrap();
        assert_eq!(m.big_m, m.m + 1);
    }
}
