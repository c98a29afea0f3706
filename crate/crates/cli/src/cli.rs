use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "resonance", version, about = "Exponent ladders, discrete spectra and nonlinear branches near σ₀")]
pub struct Cli {
    /// Report directory. Falls back to `output.dir` in the config, then
    /// `$RESONANCE_OUT`, then `./resonance-out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Experiment config (TOML). The bundled default is used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan the regularity bootstrap for dimension N.
    Ladder {
        #[arg(long)]
        dim: u32,
        /// Integrability exponent of V₁, e.g. `12`, `21/2` or `10.25`.
        #[arg(long, conflicts_with = "v1_zero", required_unless_present = "v1_zero")]
        p: Option<String>,
        /// V₁ = 0.
        #[arg(long)]
        v1_zero: bool,
        #[arg(long, conflicts_with = "table")]
        json: bool,
        #[arg(long)]
        table: bool,
        /// Numeric value for a chain constant, as `LABEL=VALUE`, e.g.
        /// `--bind 'rho(2, 3, 12)=1.5'`.
        #[arg(long = "bind", value_name = "LABEL=VALUE")]
        bindings: Vec<String>,
    },
    /// Lowest eigenpairs of the assembled operator.
    Spectrum {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        k: usize,
        /// Second config whose potential lies pointwise above the first.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// One Newton solve at fixed λ.
    Solve {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// `eig:K` (scaled K-th eigenvector), `file:PATH` (CSV, value in the
        /// last column) or `zero`.
        #[arg(long, default_value = "eig:1")]
        seed_mode: String,
    },
    /// Natural-parameter continuation in λ.
    Continue {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Multi-start search for nontrivial solutions.
    Probe {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Run every property suite against a config.
    Verify {
        #[command(flatten)]
        config: ConfigArg,
    },
}
