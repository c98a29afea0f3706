//! Finite-difference discretization of `A = -Δ + V` on the box `[-L, L]ᵈ`
//! with homogeneous Dirichlet data, plus spectral tools built on it.
//!
//! Nodes sit at `-L + i·h`, `i = 1..n`, `h = 2L/(n+1)`, ordered
//! lexicographically with the first axis fastest. Grid vectors are measured
//! in the discrete `L²` norm `‖v‖² = hᵈ Σ vᵢ²`.

mod checks;
mod eigen;

pub use checks::{
    compare_spectra, minmax_verify, morse_index, morse_index_with, ComparisonEntry, ComparisonRecord,
    MinmaxEntry, MinmaxOptions, MinmaxRecord, MorseReport,
};
pub use eigen::{lowest_eigenpairs, lowest_eigenpairs_with, EigenMethod, EigenOptions, SpectrumReport};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{BandMatrix, LinalgError};
use crate::model::{ModelError, PotentialSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("non-finite potential value {value} at node {node} (x = {coords:?})")]
    Assembly { node: usize, coords: Vec<f64>, value: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("eigensolver did not converge after {restarts} restarts; best residuals {residuals:?}")]
    NonConvergence { restarts: usize, residuals: Vec<f64> },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self, OperatorError> {
        let g = Self { dim, half_width, points_per_axis };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        if !(1..=3).contains(&self.dim) {
            return Err(OperatorError::Grid(format!("dim must be 1, 2 or 3, got {}", self.dim)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(OperatorError::Grid(format!(
                "half_width must be positive and finite, got {}",
                self.half_width
            )));
        }
        if self.points_per_axis < 3 {
            return Err(OperatorError::Grid(format!(
                "points_per_axis must be at least 3, got {}",
                self.points_per_axis
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis as f64 + 1.0)
    }

    pub fn dofs(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// `hᵈ`, the quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// `(2L)ᵈ`
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    /// Offset between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow(axis as u32)
    }

    pub fn axis_index(&self, node: usize, axis: usize) -> usize {
        (node / self.stride(axis)) % self.points_per_axis
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        let h = self.spacing();
        (0..self.dim)
            .map(|a| -self.half_width + (self.axis_index(node, a) as f64 + 1.0) * h)
            .collect()
    }

    /// Same grid with `2n + 1` points per axis: every old node is kept and
    /// the spacing halves.
    pub fn refined(&self) -> Self {
        Self { points_per_axis: 2 * self.points_per_axis + 1, ..*self }
    }

    /// Discrete `L²` inner product.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.cell_volume() * crate::linalg::dot(a, b)
    }

    pub fn l2_norm(&self, a: &[f64]) -> f64 {
        self.inner(a, a).sqrt()
    }
}

/// `A = -Δ_h + diag(potential) + shift` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub grid: Grid,
    /// Potential sampled at the nodes.
    pub potential: Vec<f64>,
    /// The positivity shift `m ≥ 0`, added to every diagonal entry.
    pub shift: f64,
    /// Essential-spectrum threshold of the continuum problem, if known.
    pub sigma0: Option<f64>,
}

/// Samples `potential` on the grid (cell-averaged) and builds the stencil
/// operator.
pub fn assemble(grid: Grid, potential: &PotentialSpec, shift: f64) -> Result<DiscreteOperator, OperatorError> {
    grid.validate()?;
    potential.validate(grid.dim)?;
    let h = grid.spacing();
    let values: Vec<f64> = (0..grid.dofs()).map(|i| potential.cell_value(&grid.coords(i), h)).collect();
    let mut op = DiscreteOperator::from_samples(grid, values, shift)?;
    op.sigma0 = Some(potential.sigma0);
    Ok(op)
}

impl DiscreteOperator {
    pub fn from_samples(grid: Grid, potential: Vec<f64>, shift: f64) -> Result<Self, OperatorError> {
        grid.validate()?;
        if potential.len() != grid.dofs() {
            return Err(OperatorError::Domain(format!(
                "expected {} potential samples, got {}",
                grid.dofs(),
                potential.len()
            )));
        }
        if let Some((node, &value)) = potential.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(OperatorError::Assembly { node, coords: grid.coords(node), value });
        }
        if !shift.is_finite() {
            return Err(OperatorError::Domain(format!("shift must be finite, got {shift}")));
        }
        Ok(Self { grid, potential, shift, sigma0: None })
    }

    pub fn dofs(&self) -> usize {
        self.grid.dofs()
    }

    /// Effective zeroth-order coefficient `q = V + m` at each node.
    pub fn q(&self) -> Vec<f64> {
        self.potential.iter().map(|v| v + self.shift).collect()
    }

    /// Same operator with `offset` added to the potential, e.g. the
    /// linearization `A - λ - g'(u)`.
    pub fn with_potential_offset(&self, offset: &[f64]) -> Self {
        assert_eq!(offset.len(), self.dofs());
        Self {
            potential: self.potential.iter().zip(offset).map(|(v, o)| v + o).collect(),
            ..self.clone()
        }
    }

    pub fn with_constant_offset(&self, c: f64) -> Self {
        Self { potential: self.potential.iter().map(|v| v + c).collect(), ..self.clone() }
    }

    /// `out = A v`
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let n = g.points_per_axis;
        let inv_h2 = 1.0 / (g.spacing() * g.spacing());
        let center = 2.0 * g.dim as f64 * inv_h2;
        for (p, o) in out.iter_mut().enumerate() {
            let mut s = (center + self.potential[p] + self.shift) * v[p];
            for axis in 0..g.dim {
                let stride = g.stride(axis);
                let i = (p / stride) % n;
                if i > 0 {
                    s -= inv_h2 * v[p - stride];
                }
                if i + 1 < n {
                    s -= inv_h2 * v[p + stride];
                }
            }
            *o = s;
        }
    }

    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.apply(v, &mut out);
        out
    }

    /// `⟨Av, v⟩ / ⟨v, v⟩`
    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let av = self.apply_vec(v);
        crate::linalg::dot(&av, v) / crate::linalg::dot(v, v)
    }

    /// Gershgorin lower bound on the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        let g = &self.grid;
        let n = g.points_per_axis;
        let inv_h2 = 1.0 / (g.spacing() * g.spacing());
        (0..self.dofs())
            .map(|p| {
                let neighbours: usize = (0..g.dim)
                    .map(|a| {
                        let i = g.axis_index(p, a);
                        (i > 0) as usize + (i + 1 < n) as usize
                    })
                    .sum();
                self.potential[p] + self.shift + (2 * g.dim - neighbours) as f64 * inv_h2
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Banded `A - σ I + diag(extra)`.
    pub fn to_band(&self, sigma: f64, extra: Option<&[f64]>) -> BandMatrix {
        let g = &self.grid;
        let n = g.points_per_axis;
        let bw = g.stride(g.dim - 1);
        let inv_h2 = 1.0 / (g.spacing() * g.spacing());
        let center = 2.0 * g.dim as f64 * inv_h2;
        let mut m = BandMatrix::zeros(self.dofs(), bw, bw);
        for p in 0..self.dofs() {
            let e = extra.map_or(0.0, |x| x[p]);
            m.set(p, p, center + self.potential[p] + self.shift - sigma + e);
            for axis in 0..g.dim {
                let stride = g.stride(axis);
                if (p / stride) % n + 1 < n {
                    m.set(p, p + stride, -inv_h2);
                    m.set(p + stride, p, -inv_h2);
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dofs();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            for (i, v) in col.iter().enumerate() {
                if *v != 0.0 {
                    m[(i, j)] = *v;
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use crate::model::{Well, WellShape};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_geometry() {
        let g = Grid::new(2, 1.0, 3).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.dofs(), 9);
        assert_eq!(g.coords(0), vec![-0.5, -0.5]);
        assert_eq!(g.coords(5), vec![0.5, 0.0]);
        assert!(Grid::new(4, 1.0, 3).is_err());
        assert!(Grid::new(1, 0.0, 3).is_err());
        assert!(Grid::new(1, 1.0, 2).is_err());
        let r = g.refined();
        assert_eq!(r.points_per_axis, 7);
        assert_eq!(r.spacing(), 0.25);
    }

    #[test]
    fn symmetric_action_2d() {
        let grid = Grid::new(2, 3.0, 9).unwrap();
        let pot = PotentialSpec {
            sigma0: 1.0,
            wells: vec![Well { shape: WellShape::Gaussian, depth: 2.0, radius: 1.0, center: vec![0.3, -0.2] }],
        };
        let op = assemble(grid, &pot, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..op.dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..op.dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lhs = dot(&op.apply_vec(&v), &w);
        let rhs = dot(&v, &op.apply_vec(&w));
        assert!((lhs - rhs).abs() < 1e-12 * crate::linalg::norm2(&v) * crate::linalg::norm2(&w) * 100.0);
    }

    #[test]
    fn band_and_dense_agree_with_action() {
        let grid = Grid::new(3, 1.0, 4).unwrap();
        let samples: Vec<f64> = (0..grid.dofs()).map(|i| (i as f64).cos()).collect();
        let op = DiscreteOperator::from_samples(grid, samples, 0.25).unwrap();
        let v: Vec<f64> = (0..op.dofs()).map(|i| (i as f64 * 0.7).sin()).collect();
        let direct = op.apply_vec(&v);
        let mut banded = vec![0.0; v.len()];
        op.to_band(0.0, None).matvec(&v, &mut banded);
        let dense = op.to_dense() * nalgebra::DVector::from_vec(v.clone());
        for i in 0..v.len() {
            assert!((direct[i] - banded[i]).abs() < 1e-12);
            assert!((direct[i] - dense[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn assembly_rejects_non_finite() {
        let grid = Grid::new(1, 1.0, 3).unwrap();
        let err = DiscreteOperator::from_samples(grid, vec![0.0, f64::NAN, 0.0], 0.0).unwrap_err();
        match err {
            OperatorError::Assembly { node, coords, .. } => {
                assert_eq!(node, 1);
                assert_eq!(coords, vec![0.0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gershgorin_is_a_lower_bound() {
        let grid = Grid::new(1, 2.0, 3).unwrap();
        let op = DiscreteOperator::from_samples(grid, vec![0.0; 3], 0.0).unwrap();
        // eigenvalues 2 - √2, 2, 2 + √2 with h = 1
        assert!(op.gershgorin_lower() <= 2.0 - 2f64.sqrt());
        assert_eq!(op.gershgorin_lower(), 0.0);
    }
}
