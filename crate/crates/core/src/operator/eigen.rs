//! Lowest eigenpairs of the stencil operator.
//!
//! The iterative path is a restarted block Krylov method on
//! `(A - σ)⁻¹` with `σ` below the Gershgorin bound, followed by
//! Rayleigh–Ritz with `A` itself. The dense path diagonalizes the full
//! matrix and serves as the reference on small grids.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{DiscreteOperator, OperatorError};
use crate::linalg::{axpy, dot, norm2, scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMethod {
    /// Dense for tiny problems, otherwise iterative with a dense fallback
    /// below 2000 degrees of freedom.
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub method: EigenMethod,
    /// Residual bound `‖Aψ - μψ‖ ≤ tol·max(1, |μ|)` for `L²`-normalized `ψ`.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Eigenvalues closer than this are reported as one cluster.
    pub cluster_gap: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { method: EigenMethod::Auto, tol: 1e-8, max_restarts: 200, seed: 0x5eed, cluster_gap: 1e-7 }
    }
}

const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub method: EigenMethod,
    pub eigenvalues: Vec<f64>,
    pub residual_norms: Vec<f64>,
    /// Configured `σ₀`; eigenvalues of the truncated problem at or above
    /// `σ₀ - margin` are not trusted as spectrum of the whole-space operator.
    pub sigma_ess_marker: Option<f64>,
    pub untrusted_margin: f64,
    pub untrusted: Vec<bool>,
    /// Index groups of eigenvalues separated by less than the cluster gap.
    pub clusters: Vec<Vec<usize>>,
    /// `L²`-orthonormal eigenvectors, same order as `eigenvalues`.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
}

impl SpectrumReport {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Number of eigenvalues strictly below `σ₀ - margin`.
    pub fn trusted_count(&self) -> usize {
        self.untrusted.iter().filter(|u| !**u).count()
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_norms.iter().copied().fold(0.0, f64::max)
    }
}

pub fn lowest_eigenpairs(op: &DiscreteOperator, k: usize) -> Result<SpectrumReport, OperatorError> {
    lowest_eigenpairs_with(op, k, &EigenOptions::default())
}

pub fn lowest_eigenpairs_with(
    op: &DiscreteOperator,
    k: usize,
    opts: &EigenOptions,
) -> Result<SpectrumReport, OperatorError> {
    let n = op.dofs();
    if k == 0 || k > n {
        return Err(OperatorError::Domain(format!("k must lie in 1..={n}, got {k}")));
    }
    let (method, raw) = match opts.method {
        EigenMethod::Dense => (EigenMethod::Dense, dense(op, k)?),
        EigenMethod::Iterative => (EigenMethod::Iterative, iterative(op, k, opts)?),
        EigenMethod::Auto => {
            if n <= 64 || 4 * (k + 4) >= n {
                (EigenMethod::Dense, dense(op, k)?)
            } else {
                match iterative(op, k, opts) {
                    Ok(r) => (EigenMethod::Iterative, r),
                    Err(_) if n <= DENSE_LIMIT => (EigenMethod::Dense, dense(op, k)?),
                    Err(e) => return Err(e),
                }
            }
        }
    };
    Ok(finish(op, method, raw, opts))
}

/// Euclidean-orthonormal eigenpairs, ascending.
struct Raw {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

fn dense(op: &DiscreteOperator, k: usize) -> Result<Raw, OperatorError> {
    let eig = SymmetricEigen::new(op.to_dense());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order[..k].iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    Ok(Raw { values, vectors })
}

/// Orthogonalizes `w` against `basis` twice (classical Gram–Schmidt with
/// reorthogonalization) and normalizes it. Returns `false` when `w` is
/// numerically inside the span.
fn orthonormalize_against(basis: &[Vec<f64>], w: &mut [f64]) -> bool {
    let before = norm2(w);
    if before == 0.0 {
        return false;
    }
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.iter().map(|b| dot(b, w)).collect();
        for (b, c) in basis.iter().zip(coeffs) {
            axpy(-c, b, w);
        }
    }
    let after = norm2(w);
    if after <= 1e-10 * before {
        return false;
    }
    scale(1.0 / after, w);
    true
}

fn iterative(op: &DiscreteOperator, k: usize, opts: &EigenOptions) -> Result<Raw, OperatorError> {
    let n = op.dofs();
    let block = (k + 4).min(n);
    let max_basis = (block * 8).min(n);
    let lower = op.gershgorin_lower();
    let sigma = lower - 1e-2 * (1.0 + lower.abs());
    let lu = op.to_band(sigma, None).factor()?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut start: Vec<Vec<f64>> = (0..block).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut best = vec![f64::INFINITY; k];

    for restart in 0..opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis);
        for mut w in start.drain(..) {
            if orthonormalize_against(&basis, &mut w) {
                basis.push(w);
            }
        }
        let mut frontier = 0..basis.len();
        while basis.len() < max_basis && !frontier.is_empty() {
            let mut fresh = Vec::new();
            for j in frontier.clone() {
                fresh.push(lu.solve(&basis[j])?);
            }
            let begin = basis.len();
            for mut w in fresh {
                if basis.len() == max_basis {
                    break;
                }
                if orthonormalize_against(&basis, &mut w) {
                    basis.push(w);
                }
            }
            frontier = begin..basis.len();
        }

        // Rayleigh–Ritz with A.
        let m = basis.len();
        let av: Vec<Vec<f64>> = basis.iter().map(|b| op.apply_vec(b)).collect();
        let h = DMatrix::from_fn(m, m, |i, j| 0.5 * (dot(&basis[i], &av[j]) + dot(&basis[j], &av[i])));
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let keep = block.min(m);
        let mut values = Vec::with_capacity(keep);
        let mut vectors = Vec::with_capacity(keep);
        let mut residuals = Vec::with_capacity(keep);
        for &c in &order[..keep] {
            let theta = eig.eigenvalues[c];
            let mut y = vec![0.0; n];
            let mut ay = vec![0.0; n];
            for i in 0..m {
                let s = eig.eigenvectors[(i, c)];
                axpy(s, &basis[i], &mut y);
                axpy(s, &av[i], &mut ay);
            }
            axpy(-theta, &y, &mut ay);
            residuals.push(norm2(&ay) / norm2(&y));
            values.push(theta);
            vectors.push(y);
        }
        for (b, r) in best.iter_mut().zip(&residuals) {
            *b = b.min(*r);
        }
        if residuals[..k].iter().zip(&values).all(|(r, mu)| *r <= opts.tol * mu.abs().max(1.0)) {
            values.truncate(k);
            vectors.truncate(k);
            return Ok(Raw { values, vectors });
        }
        if restart + 1 == opts.max_restarts {
            return Err(OperatorError::NonConvergence { restarts: opts.max_restarts, residuals: residuals[..k].to_vec() });
        }
        start = vectors;
    }
    Err(OperatorError::NonConvergence { restarts: opts.max_restarts, residuals: best })
}

fn finish(op: &DiscreteOperator, method: EigenMethod, raw: Raw, opts: &EigenOptions) -> SpectrumReport {
    let g = &op.grid;
    let inv_sqrt_w = 1.0 / g.cell_volume().sqrt();
    let mut eigenvectors = Vec::with_capacity(raw.vectors.len());
    let mut residual_norms = Vec::with_capacity(raw.vectors.len());
    for (mu, mut v) in raw.values.iter().zip(raw.vectors) {
        // Euclidean unit vector, fixed sign: largest entry positive.
        let nv = norm2(&v);
        scale(1.0 / nv, &mut v);
        let pivot = v.iter().copied().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if pivot < 0.0 {
            scale(-1.0, &mut v);
        }
        let mut r = op.apply_vec(&v);
        axpy(-mu, &v, &mut r);
        residual_norms.push(norm2(&r));
        scale(inv_sqrt_w, &mut v);
        eigenvectors.push(v);
    }
    let margin = g.dim as f64 * (std::f64::consts::PI / (2.0 * g.half_width)).powi(2);
    let untrusted = raw
        .values
        .iter()
        .map(|&mu| op.sigma0.is_some_and(|s| mu >= s - margin))
        .collect();
    let mut clusters = Vec::new();
    let mut current = vec![0usize];
    for i in 1..raw.values.len() {
        if raw.values[i] - raw.values[i - 1] < opts.cluster_gap {
            current.push(i);
        } else {
            if current.len() > 1 {
                clusters.push(current.clone());
            }
            current = vec![i];
        }
    }
    if current.len() > 1 {
        clusters.push(current);
    }
    SpectrumReport {
        method,
        eigenvalues: raw.values,
        residual_norms,
        sigma_ess_marker: op.sigma0,
        untrusted_margin: margin,
        untrusted,
        clusters,
        eigenvectors,
    }
}
