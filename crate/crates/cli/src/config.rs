//! Experiment configuration: strict TOML with key paths in every error.

use std::path::Path;

use resonance_core::model::{build_example51, NonlinearitySpec, PotentialSpec, Thresholds};
use resonance_core::operator::{assemble, DiscreteOperator, EigenOptions, Grid};
use resonance_core::solve::{ContinuationOptions, NewtonOptions, ProbeOptions};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Root of every random stream (probe seeds, min-max subspaces, Krylov starts).
    #[serde(default)]
    pub seed: u64,
    pub grid: Grid,
    pub potential: PotentialSpec,
    pub nonlinearity: NonlinearityConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NonlinearityConfig {
    Example51 { alpha: f64 },
    Zero,
    /// `g(t) = c·t`.
    Linear { c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub eigen_tol: f64,
    pub max_restarts: usize,
    pub morse_tol: f64,
    pub max_relative_jump: f64,
    /// Eigenvector index used for `eig` seeds and branch starts.
    pub mode: usize,
    pub amplitudes: Vec<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let newton = NewtonOptions::default();
        let eigen = EigenOptions::default();
        Self {
            newton_tol: newton.tol,
            max_iter: newton.max_iter,
            eigen_tol: eigen.tol,
            max_restarts: eigen.max_restarts,
            morse_tol: newton.morse_tol,
            max_relative_jump: ContinuationOptions::default().max_relative_jump,
            mode: 1,
            amplitudes: vec![0.5, 2.0, 8.0, 32.0],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Report directory; the `--out` flag and `RESONANCE_OUT` take precedence.
    pub dir: Option<String>,
    /// Also write per-state vector CSVs.
    pub dump_vectors: bool,
}

fn invalid(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Config { path: path.into(), message: msg.into() }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::new(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(&path, e.into_inner().message().trim())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn bundled() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("bundled config is valid")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.grid.validate().map_err(|e| invalid("grid", e.to_string()))?;
        self.potential
            .validate(self.grid.dim)
            .map_err(|e| invalid("potential", e.to_string()))?;
        if let NonlinearityConfig::Example51 { alpha } = self.nonlinearity {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(invalid("nonlinearity.alpha", format!("must be positive, got {alpha}")));
            }
        }
        if let NonlinearityConfig::Linear { c } = self.nonlinearity {
            if !c.is_finite() {
                return Err(invalid("nonlinearity.c", "must be finite"));
            }
        }
        let s = &self.solver;
        for (key, v) in [
            ("solver.newton_tol", s.newton_tol),
            ("solver.eigen_tol", s.eigen_tol),
            ("solver.morse_tol", s.morse_tol),
            ("solver.max_relative_jump", s.max_relative_jump),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(key, format!("must be positive, got {v}")));
            }
        }
        if s.mode == 0 {
            return Err(invalid("solver.mode", "eigenvector indices start at 1"));
        }
        if s.mode > self.grid.dofs() {
            return Err(invalid("solver.mode", format!("grid has only {} nodes", self.grid.dofs())));
        }
        if s.amplitudes.is_empty() || s.amplitudes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(invalid("solver.amplitudes", "need at least one positive amplitude"));
        }
        let t = &self.thresholds;
        if !(t.large_t > 1.0 && t.small_t > 0.0 && t.small_t < 1.0 && t.ratio_tol > 0.0 && t.zero_band >= 0.0) {
            return Err(invalid("thresholds", "need large_t > 1, 0 < small_t < 1, ratio_tol > 0, zero_band ≥ 0"));
        }
        Ok(())
    }

    pub fn nonlinearity(&self) -> NonlinearitySpec {
        match self.nonlinearity {
            NonlinearityConfig::Example51 { alpha } => build_example51(alpha).expect("validated alpha"),
            NonlinearityConfig::Zero => NonlinearitySpec::zero(),
            NonlinearityConfig::Linear { c } => NonlinearitySpec::linear(c),
        }
    }

    pub fn operator(&self) -> Result<DiscreteOperator, CliError> {
        assemble(self.grid, &self.potential, 0.0).map_err(|e| invalid("potential", e.to_string()))
    }

    pub fn eigen(&self) -> EigenOptions {
        EigenOptions {
            tol: self.solver.eigen_tol,
            max_restarts: self.solver.max_restarts,
            seed: self.seed ^ 0x5eed,
            ..EigenOptions::default()
        }
    }

    pub fn newton(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.solver.newton_tol,
            max_iter: self.solver.max_iter,
            morse_tol: self.solver.morse_tol,
            eigen: self.eigen(),
            ..NewtonOptions::default()
        }
    }

    pub fn continuation(&self) -> ContinuationOptions {
        ContinuationOptions {
            newton: self.newton(),
            max_relative_jump: self.solver.max_relative_jump,
            ..ContinuationOptions::default()
        }
    }

    pub fn probe(&self) -> ProbeOptions {
        ProbeOptions { newton: self.newton(), amplitudes: self.solver.amplitudes.clone(), seed: self.seed }
    }
}
