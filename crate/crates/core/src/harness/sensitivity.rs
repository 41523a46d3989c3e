use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::{CatalogModel, ModelCatalog, STANDARD_A, STANDARD_B, STANDARD_MU};
use crate::diagnostics::{iat_report, quantile_sorted, sorted_copy};
use crate::error::{Error, Result};
use crate::mcmc::{run_chain, SamplerConfig};
use crate::rng::RngStream;

/// Parameter values swept one at a time around the standard parametrisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub mu: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep { mu: vec![-4.0, 1.0], a: vec![0.005, 0.05, 0.5], b: vec![0.0005, 0.05, 5.0, 50.0] }
    }
}

impl Sweep {
    /// Only the standard parametrisation.
    pub fn standard_only() -> Self {
        Sweep { mu: vec![STANDARD_MU], a: vec![], b: vec![] }
    }

    pub fn empty() -> Self {
        Sweep { mu: vec![], a: vec![], b: vec![] }
    }
}

fn default_models() -> Vec<u8> {
    (1..=6).collect()
}

fn default_repetitions() -> usize {
    5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityConfig {
    #[serde(default = "default_models")]
    pub models: Vec<u8>,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Template for every cell; `init` is reset to the all-ones vector.
    pub sampler: SamplerConfig,
    pub seed: u64,
}

/// One `(model, mu, a, b)` grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub model: CatalogModel,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
}

impl Cell {
    fn stream(&self, seed: u64, repetition: usize) -> RngStream {
        RngStream::derive(
            seed,
            &[self.model.id as u64, self.mu.to_bits(), self.a.to_bits(), self.b.to_bits(), repetition as u64],
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub model: u8,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub repetition: usize,
    /// `NaN` when the run failed.
    pub tau_max: f64,
    pub acceptance: f64,
    pub tuned_h: f64,
    pub divergences: usize,
    pub diverged: bool,
}

pub const SENSITIVITY_CSV_HEADER: &str = "model,mu,a,b,repetition,tau_max,acceptance,tuned_h,divergences,diverged";

impl SensitivityRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.model,
            self.mu,
            self.a,
            self.b,
            self.repetition,
            self.tau_max,
            self.acceptance,
            self.tuned_h,
            self.divergences,
            self.diverged
        )
    }
}

/// Grid cells: per model, the standard cell followed by one cell per
/// off-standard sweep value. An entirely empty sweep yields no cells.
pub fn grid_cells(cfg: &SensitivityConfig) -> Result<Vec<Cell>> {
    let sw = &cfg.sweep;
    let mut cells = Vec::new();
    if sw.mu.is_empty() && sw.a.is_empty() && sw.b.is_empty() {
        return Ok(cells);
    }
    for &id in &cfg.models {
        let model = ModelCatalog::get(id)?;
        let base = Cell { model, mu: STANDARD_MU, a: STANDARD_A, b: STANDARD_B };
        cells.push(base);
        cells.extend(sw.mu.iter().filter(|&&v| v != STANDARD_MU).map(|&mu| Cell { mu, ..base }));
        cells.extend(sw.a.iter().filter(|&&v| v != STANDARD_A).map(|&a| Cell { a, ..base }));
        cells.extend(sw.b.iter().filter(|&&v| v != STANDARD_B).map(|&b| Cell { b, ..base }));
    }
    Ok(cells)
}

/// Run one repetition of one cell. Failures are recorded in the row.
pub fn run_cell(cell: &Cell, repetition: usize, template: &SamplerConfig, seed: u64) -> SensitivityRow {
    let mut row = SensitivityRow {
        model: cell.model.id,
        mu: cell.mu,
        a: cell.a,
        b: cell.b,
        repetition,
        tau_max: f64::NAN,
        acceptance: f64::NAN,
        tuned_h: f64::NAN,
        divergences: 0,
        diverged: true,
    };
    let Ok(spec) = cell.model.spec(cell.mu, cell.a, cell.b) else {
        return row;
    };
    let cfg = SamplerConfig { init: None, ..template.clone() };
    if let Ok(chain) = run_chain(&spec, &cfg, cell.stream(seed, repetition)) {
        row.acceptance = chain.acceptance_rate();
        row.tuned_h = chain.tuned_h;
        row.divergences = chain.divergences + chain.warmup_divergences;
        if let Ok(iat) = iat_report(&chain) {
            row.tau_max = iat.tau_max;
            row.diverged = row.divergences > 0;
        }
    }
    row
}

/// Run every cell and repetition, in parallel on the current rayon pool.
/// Rows come back in grid order regardless of scheduling.
pub fn sensitivity(cfg: &SensitivityConfig) -> Result<Vec<SensitivityRow>> {
    if cfg.repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
    }
    let cells = grid_cells(cfg)?;
    let jobs: Vec<(Cell, usize)> = cells.iter().flat_map(|c| (0..cfg.repetitions).map(move |r| (*c, r))).collect();
    Ok(jobs.par_iter().map(|(cell, rep)| run_cell(cell, *rep, &cfg.sampler, cfg.seed)).collect())
}

pub fn write_sensitivity_csv<W: std::io::Write>(mut w: W, rows: &[SensitivityRow]) -> std::io::Result<()> {
    writeln!(w, "{SENSITIVITY_CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_line())?;
    }
    w.flush()
}

/// Per-cell aggregate over repetitions with an empirical 95% interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub model: u8,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub repetitions: usize,
    pub failed: usize,
    pub tau_mean: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
}

pub const SUMMARY_CSV_HEADER: &str = "model,mu,a,b,repetitions,failed,tau_mean,tau_q025,tau_q975";

/// Group rows by cell, in first-appearance order. Failed runs are counted and
/// left out of the statistics, which are `NaN` when every run failed.
pub fn summarize(rows: &[SensitivityRow]) -> Vec<CellSummary> {
    let mut out: Vec<(CellSummary, Vec<f64>)> = Vec::new();
    for r in rows {
        let key = (r.model, r.mu.to_bits(), r.a.to_bits(), r.b.to_bits());
        let pos = out.iter().position(|(c, _)| (c.model, c.mu.to_bits(), c.a.to_bits(), c.b.to_bits()) == key);
        let idx = pos.unwrap_or_else(|| {
            out.push((
                CellSummary {
                    model: r.model,
                    mu: r.mu,
                    a: r.a,
                    b: r.b,
                    repetitions: 0,
                    failed: 0,
                    tau_mean: f64::NAN,
                    tau_lo: f64::NAN,
                    tau_hi: f64::NAN,
                },
                Vec::new(),
            ));
            out.len() - 1
        });
        let (cell, taus) = &mut out[idx];
        cell.repetitions += 1;
        if r.tau_max.is_finite() {
            taus.push(r.tau_max);
        } else {
            cell.failed += 1;
        }
    }
    out.into_iter()
        .map(|(mut cell, taus)| {
            if !taus.is_empty() {
                let sorted = sorted_copy(&taus);
                cell.tau_mean = taus.iter().sum::<f64>() / taus.len() as f64;
                cell.tau_lo = quantile_sorted(&sorted, 0.025);
                cell.tau_hi = quantile_sorted(&sorted, 0.975);
            }
            cell
        })
        .collect()
}

pub fn write_summary_csv<W: std::io::Write>(mut w: W, cells: &[CellSummary]) -> std::io::Result<()> {
    writeln!(w, "{SUMMARY_CSV_HEADER}")?;
    for c in cells {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            c.model, c.mu, c.a, c.b, c.repetitions, c.failed, c.tau_mean, c.tau_lo, c.tau_hi
        )?;
    }
    w.flush()
}
