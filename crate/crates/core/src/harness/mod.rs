//! Reproducible experiment driver behind the command-line interface.
//!
//! Every run writes its outputs plus `manifest.json` into an output
//! directory. The manifest holds the fully resolved [`ExperimentConfig`];
//! feeding it back through [`load_config`] reproduces every output byte for
//! byte. Outputs never contain timestamps or host information.

mod catalog;
mod constant;
mod sensitivity;
mod validate;

pub use catalog::{CatalogModel, ModelCatalog, STANDARD_A, STANDARD_B, STANDARD_MU};
pub use constant::{
    constant_check, importance_log_integral, ConstantCheckConfig, ConstantCheckReport, PROPOSAL_WIDENING,
};
pub use sensitivity::{
    grid_cells, run_cell, sensitivity, summarize, write_sensitivity_csv, write_summary_csv, Cell, CellSummary,
    SensitivityConfig, SensitivityRow, Sweep, SENSITIVITY_CSV_HEADER,
};
pub use validate::{
    validate, ComponentValidation, ValidateConfig, Validation, ValidationReport, MAX_RELATIVE_QUANTILE_DEVIATION,
};

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{RunReport, MIN_SERIES_LEN};
use crate::error::{Error, Result};
use crate::exact::sample_exact;
use crate::io::{write_binary_file, write_csv_file};
use crate::mcmc::{run_chain, SamplerConfig};
use crate::model::ModelSpec;
use crate::rng::RngStream;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub model: ModelSpec,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub model: ModelSpec,
    pub sampler: SamplerConfig,
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    ConstantCheck(ConstantCheckConfig),
    Validate(ValidateConfig),
    Sensitivity(SensitivityConfig),
    Sample(SampleConfig),
    Mcmc(McmcConfig),
}

impl ExperimentConfig {
    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::ConstantCheck(c) => c.seed,
            ExperimentConfig::Validate(c) => c.seed,
            ExperimentConfig::Sensitivity(c) => c.seed,
            ExperimentConfig::Sample(c) => c.seed,
            ExperimentConfig::Mcmc(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::ConstantCheck(c) => c.seed = seed,
            ExperimentConfig::Validate(c) => c.seed = seed,
            ExperimentConfig::Sensitivity(c) => c.seed = seed,
            ExperimentConfig::Sample(c) => c.seed = seed,
            ExperimentConfig::Mcmc(c) => c.seed = seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub version: String,
    pub master_seed: u64,
    pub experiment: ExperimentConfig,
    pub outputs: Vec<String>,
}

/// Read a config file: either a bare [`ExperimentConfig`] or a manifest.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("experiment").is_some() {
        let manifest: Manifest = serde_json::from_value(value)?;
        Ok(manifest.experiment)
    } else {
        Ok(serde_json::from_value(value)?)
    }
}

/// Result of [`run_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    /// `false` only for a validation run with at least one KS rejection.
    pub passed: bool,
    pub outputs: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl<'a> Outputs<'a> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    fn with_writer(&mut self, name: &str, f: impl FnOnce(BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        f(BufWriter::new(file)).map_err(|e| Error::io(&path, e))
    }
}

#[derive(Serialize)]
struct SampleSidecar<'a> {
    model: &'a ModelSpec,
    seed: u64,
    stream_id: u64,
    n_samples: usize,
    dim: usize,
    gaussian_method: &'a str,
}

#[derive(Serialize)]
struct ChainSidecar<'a> {
    tuned_h: f64,
    acceptance_rate: f64,
    divergences: usize,
    warmup_divergences: usize,
    kept_states: usize,
    config: &'a SamplerConfig,
    seed: u64,
    stream_id: u64,
    gaussian_method: &'a str,
}

/// Run one experiment and write its outputs and manifest into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<Outcome> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut out = Outputs { dir: out_dir, files: Vec::new() };
    let mut passed = true;
    let summary = match config {
        ExperimentConfig::Sample(c) => {
            let batch = sample_exact(&c.model, c.n_samples, RngStream::new(c.seed, c.stream_id))?;
            let names = c.model.component_names();
            write_csv_file(&out.path("samples.csv"), &names, batch.as_slice())?;
            write_binary_file(&out.path("samples.bin"), batch.dim(), batch.as_slice())?;
            let sidecar = SampleSidecar {
                model: &c.model,
                seed: c.seed,
                stream_id: c.stream_id,
                n_samples: batch.len(),
                dim: batch.dim(),
                gaussian_method: batch.gaussian_method,
            };
            out.json("samples.json", &sidecar)?;
            serde_json::to_value(&sidecar)?
        }
        ExperimentConfig::Mcmc(c) => {
            let chain = run_chain(&c.model, &c.sampler, RngStream::new(c.seed, c.stream_id))?;
            let names = c.model.component_names();
            write_csv_file(&out.path("chain.csv"), &names, chain.states())?;
            write_binary_file(&out.path("chain.bin"), chain.dim(), chain.states())?;
            let sidecar = ChainSidecar {
                tuned_h: chain.tuned_h,
                acceptance_rate: chain.acceptance_rate(),
                divergences: chain.divergences,
                warmup_divergences: chain.warmup_divergences,
                kept_states: chain.len(),
                config: &chain.config,
                seed: c.seed,
                stream_id: c.stream_id,
                gaussian_method: crate::rng::GAUSSIAN_METHOD,
            };
            out.json("chain.json", &sidecar)?;
            if chain.len() >= MIN_SERIES_LEN {
                if let Ok(report) = RunReport::from_chain(&chain, None) {
                    out.json("report.json", &report)?;
                    out.with_writer("report.csv", |w| report.write_csv(w, &names))?;
                }
            }
            serde_json::to_value(&sidecar)?
        }
        ExperimentConfig::ConstantCheck(c) => {
            let report = constant_check(c)?;
            out.json("constant_check.json", &report)?;
            serde_json::to_value(&report)?
        }
        ExperimentConfig::Validate(c) => {
            let v = validate(c)?;
            for t in &v.tables {
                let name = &v.report.components[t.component].name;
                out.with_writer(&format!("qq_{name}.csv"), |w| t.write_csv(w))?;
            }
            let names = c.model.component_names();
            out.with_writer("report.csv", |w| v.run.write_csv(w, &names))?;
            out.json("report.json", &v.run)?;
            out.json("validation.json", &v.report)?;
            passed = v.report.passed;
            serde_json::to_value(&v.report)?
        }
        ExperimentConfig::Sensitivity(c) => {
            let rows = sensitivity(c)?;
            out.with_writer("sensitivity.csv", |w| write_sensitivity_csv(w, &rows))?;
            let cells = summarize(&rows);
            out.with_writer("sensitivity_summary.csv", |w| write_summary_csv(w, &cells))?;
            serde_json::json!({ "rows": rows.len(), "cells": cells })
        }
    };
    let manifest = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: config.seed(),
        experiment: config.clone(),
        outputs: out.files.clone(),
    };
    let outputs = out.files.iter().map(|f| out_dir.join(f)).collect::<Vec<_>>();
    out.json(MANIFEST_FILE, &manifest)?;
    Ok(Outcome { passed, outputs, summary })
}
