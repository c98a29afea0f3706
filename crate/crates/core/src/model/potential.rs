use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::ladder::{Integrability, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WellShape {
    /// `depth` on the open ball of `radius`, zero outside.
    Square,
    /// `depth · exp(-|x - c|² / radius²)`.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Well {
    pub shape: WellShape,
    /// Positive depth digs a well below `σ₀`; negative depth makes a bump.
    pub depth: f64,
    pub radius: f64,
    pub center: Vec<f64>,
}

impl Well {
    fn profile(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        match self.shape {
            WellShape::Square => {
                if r2 < self.radius * self.radius {
                    1.0
                } else {
                    0.0
                }
            }
            WellShape::Gaussian => (-r2 / (self.radius * self.radius)).exp(),
        }
    }

    /// Average of the profile over the cell `x ± h/2`. Exact in one
    /// dimension for square wells; 4ᵈ midpoint sub-samples otherwise.
    fn cell_profile(&self, x: &[f64], h: f64) -> f64 {
        match (self.shape, x.len()) {
            (WellShape::Gaussian, _) => self.profile(x),
            (WellShape::Square, 1) => {
                let lo = (x[0] - 0.5 * h).max(self.center[0] - self.radius);
                let hi = (x[0] + 0.5 * h).min(self.center[0] + self.radius);
                ((hi - lo) / h).clamp(0.0, 1.0)
            }
            (WellShape::Square, d) => {
                const SUB: usize = 4;
                let total = SUB.pow(d as u32);
                let mut inside = 0usize;
                let mut y = vec![0.0; d];
                for s in 0..total {
                    let mut rem = s;
                    for (k, yk) in y.iter_mut().enumerate() {
                        let idx = rem % SUB;
                        rem /= SUB;
                        *yk = x[k] + h * ((idx as f64 + 0.5) / SUB as f64 - 0.5);
                    }
                    if self.profile(&y) > 0.5 {
                        inside += 1;
                    }
                }
                inside as f64 / total as f64
            }
        }
    }
}

/// `V(x) = σ₀ - Σ depthₖ · profileₖ(x)`, split as `V₂ = σ₀` (bounded) and
/// `V₁ = V - σ₀` (the wells, in every `Lᵖ`). `V → σ₀` at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub sigma0: f64,
    #[serde(default)]
    pub wells: Vec<Well>,
}

impl PotentialSpec {
    pub fn constant(sigma0: f64) -> Self {
        Self { sigma0, wells: Vec::new() }
    }

    pub fn validate(&self, dim: usize) -> Result<(), ModelError> {
        if !self.sigma0.is_finite() {
            return Err(ModelError::Domain(format!("sigma0 must be finite, got {}", self.sigma0)));
        }
        for (k, w) in self.wells.iter().enumerate() {
            if !(w.depth.is_finite() && w.radius.is_finite() && w.radius > 0.0) {
                return Err(ModelError::Domain(format!(
                    "well {k}: depth must be finite and radius positive"
                )));
            }
            if w.center.len() != dim {
                return Err(ModelError::Domain(format!(
                    "well {k}: center has {} coordinates, grid dimension is {dim}",
                    w.center.len()
                )));
            }
            if w.center.iter().any(|c| !c.is_finite()) {
                return Err(ModelError::Domain(format!("well {k}: center must be finite")));
            }
        }
        Ok(())
    }

    /// The `Lᵖ` component `V₁ = -Σ wells`.
    pub fn v1(&self, x: &[f64]) -> f64 {
        -self.wells.iter().map(|w| w.depth * w.profile(x)).sum::<f64>()
    }

    /// The bounded component `V₂ ≡ σ₀`.
    pub fn v2(&self, _x: &[f64]) -> f64 {
        self.sigma0
    }

    pub fn v2_sup_bound(&self) -> f64 {
        self.sigma0.abs()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.v1(x) + self.v2(x)
    }

    /// Cell-averaged value at a grid node of spacing `h`. Averaging keeps
    /// the stencil second-order accurate across square-well edges.
    pub fn cell_value(&self, x: &[f64], h: f64) -> f64 {
        self.sigma0 - self.wells.iter().map(|w| w.depth * w.cell_profile(x, h)).sum::<f64>()
    }

    /// Integrability of `V₁` as seen by the regularity ladder. Bounded wells
    /// with compact or Gaussian support lie in every `Lᵖ`; the smallest
    /// admissible choice that keeps the strongest terminal class is used.
    pub fn integrability(&self, dim: u32) -> Integrability {
        if self.wells.is_empty() {
            Integrability::Vanishing
        } else if dim <= 3 {
            Integrability::Lp(Rational::from_integer(2))
        } else {
            Integrability::Lp(Rational::from_integer(dim as i128 + 1))
        }
    }

    /// Largest `|V(x) - σ₀|` over the coordinate and diagonal rays at
    /// distance `r` from the origin.
    pub fn decay_defect(&self, dim: usize, r: f64) -> f64 {
        let mut worst: f64 = 0.0;
        let mut x = vec![0.0; dim];
        for k in 0..dim {
            for sign in [-1.0, 1.0] {
                x.iter_mut().for_each(|v| *v = 0.0);
                x[k] = sign * r;
                worst = worst.max((self.value(&x) - self.sigma0).abs());
            }
        }
        let diag = r / (dim as f64).sqrt();
        for mask in 0..(1usize << dim) {
            for (k, v) in x.iter_mut().enumerate() {
                *v = if mask >> k & 1 == 1 { -diag } else { diag };
            }
            worst = worst.max((self.value(&x) - self.sigma0).abs());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(depth: f64, radius: f64, center: Vec<f64>) -> Well {
        Well { shape: WellShape::Square, depth, radius, center }
    }

    #[test]
    fn decomposition_adds_up() {
        let pot = PotentialSpec { sigma0: 1.0, wells: vec![square(5.0, 2.0, vec![0.0])] };
        assert_eq!(pot.value(&[0.5]), -4.0);
        assert_eq!(pot.value(&[3.0]), 1.0);
        assert_eq!(pot.v2(&[0.5]).abs(), pot.v2_sup_bound());
    }

    #[test]
    fn cell_average_of_square_edge() {
        let pot = PotentialSpec { sigma0: 0.0, wells: vec![square(10.0, 1.0, vec![0.0])] };
        assert!((pot.cell_value(&[1.0], 0.1) + 5.0).abs() < 1e-12);
        assert_eq!(pot.cell_value(&[0.5], 0.1), -10.0);
        assert_eq!(pot.cell_value(&[1.2], 0.1), 0.0);
        let pot2 = PotentialSpec { sigma0: 0.0, wells: vec![square(1.0, 1.0, vec![0.0, 0.0])] };
        assert_eq!(pot2.cell_value(&[0.0, 0.0], 0.1), -1.0);
        let edge = pot2.cell_value(&[1.0, 0.0], 0.1);
        assert!(edge < -0.25 && edge > -0.75);
    }

    #[test]
    fn gaussian_decays_to_sigma0() {
        let pot = PotentialSpec {
            sigma0: 2.0,
            wells: vec![Well { shape: WellShape::Gaussian, depth: 3.0, radius: 1.0, center: vec![0.0, 0.0] }],
        };
        assert!((pot.value(&[0.0, 0.0]) + 1.0).abs() < 1e-15);
        assert!(pot.decay_defect(2, 10.0) < 1e-30);
        assert!(pot.decay_defect(2, 0.5) > 1.0);
    }

    #[test]
    fn validation_catches_bad_wells() {
        let pot = PotentialSpec { sigma0: 0.0, wells: vec![square(1.0, 1.0, vec![0.0])] };
        assert!(pot.validate(1).is_ok());
        assert!(pot.validate(2).is_err());
        let bad = PotentialSpec { sigma0: 0.0, wells: vec![square(1.0, -1.0, vec![0.0])] };
        assert!(bad.validate(1).is_err());
        assert!(PotentialSpec::constant(f64::NAN).validate(1).is_err());
    }

    #[test]
    fn integrability_for_ladder() {
        assert_eq!(PotentialSpec::constant(0.0).integrability(3), Integrability::Vanishing);
        let pot = PotentialSpec { sigma0: 0.0, wells: vec![square(1.0, 1.0, vec![0.0])] };
        assert_eq!(pot.integrability(2), Integrability::Lp(Rational::from_integer(2)));
        assert_eq!(pot.integrability(6), Integrability::Lp(Rational::from_integer(7)));
    }
}
