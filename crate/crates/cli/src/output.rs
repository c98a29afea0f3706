//! Report files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use resonance_core::operator::Grid;
use resonance_core::solve::ContinuationBranch;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const OUT_ENV: &str = "RESONANCE_OUT";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    /// SHA-256 of the config text the run was driven by.
    pub config_sha256: Option<String>,
    pub seed: Option<u64>,
    pub started: String,
    pub finished: String,
    /// Report files, relative to the run directory.
    pub reports: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Collects the reports of one run and writes the manifest at the end.
#[derive(Debug)]
pub struct RunContext {
    pub dir: PathBuf,
    manifest: RunManifest,
}

impl RunContext {
    pub fn new(dir: PathBuf, command_line: Vec<String>, config_text: Option<&str>, seed: Option<u64>) -> Result<Self, CliError> {
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            manifest: RunManifest {
                toolkit: "resonance",
                version: env!("CARGO_PKG_VERSION"),
                command_line,
                config_sha256: config_text.map(|t| sha256_hex(t.as_bytes())),
                seed,
                started: now(),
                finished: String::new(),
                reports: Vec::new(),
            },
        })
    }

    fn register(&mut self, name: &str) -> PathBuf {
        self.manifest.reports.push(name.to_string());
        self.dir.join(name)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.register(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn write_vector_csv(&mut self, name: &str, grid: &Grid, columns: &[(&str, &[f64])]) -> Result<PathBuf, CliError> {
        let path = self.register(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        write_vector_csv(&path, grid, columns)?;
        Ok(path)
    }

    pub fn plot_data(&mut self, name: &str, branch: &ContinuationBranch) -> Result<PathBuf, CliError> {
        let path = self.register(name);
        emit_plot_data(branch, &path)?;
        Ok(path)
    }

    pub fn finish(mut self) -> Result<RunManifest, CliError> {
        self.manifest.finished = now();
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(self.manifest)
    }
}

/// One row per node: coordinates `x0..`, then the named columns.
pub fn write_vector_csv(path: &Path, grid: &Grid, columns: &[(&str, &[f64])]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (0..grid.dim).map(|a| format!("x{a}")).collect();
    header.extend(columns.iter().map(|(n, _)| n.to_string()));
    w.write_record(&header)?;
    for node in 0..grid.dofs() {
        let mut row: Vec<String> = grid.coords(node).iter().map(f64::to_string).collect();
        row.extend(columns.iter().map(|(_, c)| c[node].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Branch table with columns `lambda, energy, linf, l2, morse_m, margin`.
pub fn emit_plot_data(branch: &ContinuationBranch, out: &Path) -> Result<(), CliError> {
    if branch.states.is_empty() {
        return Err(CliError::Usage("cannot plot an empty branch".into()));
    }
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["lambda", "energy", "linf", "l2", "morse_m", "margin"])?;
    for s in &branch.states {
        w.write_record([
            s.lambda.to_string(),
            s.energy.to_string(),
            s.linf.to_string(),
            s.l2.to_string(),
            s.morse_m.to_string(),
            s.margin.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `--out`, then the config's `output.dir`, then `$RESONANCE_OUT`, then
/// `./resonance-out`.
pub fn resolve_out_dir(flag: Option<&Path>, config_dir: Option<&str>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config_dir.map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("resonance-out"))
}
