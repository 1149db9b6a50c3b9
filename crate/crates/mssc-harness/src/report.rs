//! Report rows and file emission. Every format carries `schema: 1`; the
//! layouts are described in `docs/formats.md`. Emission is deterministic:
//! fixed field order, no timestamps.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use mssc_core::rational::ratio_to_string;
use mssc_core::Ratio;

pub const SCHEMA_VERSION: u32 = 1;

/// One per-step trace row, shared by the online algorithm (`side = "ALG"`)
/// and offline baselines (`side = "OFF"`).
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub schema: u32,
    pub side: &'static str,
    pub step: usize,
    pub access: u64,
    pub reorder: u64,
    /// Position of the served element before reordering (access cost again
    /// for baselines).
    pub ell: u64,
    /// Number of elements moved to the front this step.
    pub fetched: usize,
    pub cum_cost: u64,
}

/// JSON variant of a trace row, with the full fetch list and exact budget
/// increments as `"num/den"` strings.
#[derive(Debug, Clone, Serialize)]
pub struct TraceStepJson {
    pub side: &'static str,
    pub step: usize,
    pub access: u64,
    pub reorder: u64,
    pub ell: u64,
    pub fetched: Vec<(usize, usize)>,
    pub budget_increments: Vec<(usize, String)>,
    pub cum_cost: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceJson {
    pub schema: u32,
    pub rows: Vec<TraceStepJson>,
}

/// One audited inequality.
#[derive(Debug, Clone, Serialize)]
pub struct AuditRecord {
    pub schema: u32,
    pub step: usize,
    pub stage: &'static str,
    pub delta_alg: u64,
    pub delta_phi: String,
    pub delta_psi: String,
    pub delta_off: u64,
    pub bound: String,
    pub verdict: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    pub steps: usize,
    pub records: usize,
    pub failures: usize,
    /// Largest lhs/bound over records with a positive bound; how close the
    /// run came to an inequality. `null` when no record has a positive bound.
    pub max_slack_ratio: Option<f64>,
    pub initial_phi: String,
    pub initial_psi: String,
    pub final_phi: String,
    pub final_psi: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub schema: u32,
    pub algorithm: String,
    pub baseline: &'static str,
    pub records: Vec<AuditRecord>,
    pub summary: AuditSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub schema: u32,
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub algorithm: String,
    pub alg_access: u64,
    pub alg_reorder: u64,
    pub alg_cost: u64,
    pub baseline: Option<&'static str>,
    pub baseline_cost: Option<u64>,
    /// alg_cost / baseline_cost, for reading; the audited inequalities never
    /// use floating point.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub schema: u32,
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub algorithm: String,
    pub alg_cost: u64,
    pub opt_cost: u64,
    pub four_opt_cost: u64,
    pub off_star_cost: u64,
    pub best_fixed_cost: u64,
    pub alg_over_opt: Option<f64>,
    pub off_star_over_opt: Option<f64>,
    pub alg_over_best_fixed: Option<f64>,
    /// `(3 + alpha) * 2^(kappa + 1)` for this instance's r.
    pub stage1_coefficient: String,
    /// Initial potentials of the algorithm's start list against the best
    /// fixed permutation.
    pub initial_phi: String,
    pub initial_psi: String,
    /// Exact check of `alg <= coefficient * best_fixed + phi0 + psi0`.
    pub static_bound_holds: bool,
    /// Exact check of `off_star <= 4 * opt`.
    pub four_opt_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundPhaseRow {
    pub schema: u32,
    pub phase: usize,
    pub alg_access: u64,
    pub alg_reorder: u64,
    pub alg_cost: u64,
    /// `(c + r)(n - r)`, the guaranteed per-phase online floor.
    pub alg_floor: u64,
    pub off_access: u64,
    pub off_reorder: u64,
    pub off_cost: u64,
    /// `3c + 3r`, the guaranteed per-phase offline ceiling.
    pub off_ceiling: u64,
    /// Cumulative online / (setup + cumulative offline).
    pub cum_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundReport {
    pub schema: u32,
    pub r: usize,
    pub c: usize,
    pub n: usize,
    pub phases: usize,
    pub alg_cost: u64,
    pub off_cost: u64,
    pub setup_cost: u64,
    pub ratio: f64,
    pub ratio_excluding_setup: f64,
    /// `r^2 / 3`.
    pub threshold: f64,
    /// First phase count at which the cumulative ratio (setup included)
    /// clears the threshold.
    pub crossing_phase: Option<usize>,
    pub pass: bool,
}

pub fn ratio_field(r: &Ratio) -> String {
    ratio_to_string(r)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let body = serde_json::to_string_pretty(value).context("serializing report")?;
    fs::write(&path, body + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut writer = csv::Writer::from_path(&path)
        .with_context(|| format!("opening {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(path)
}

pub fn write_text(dir: &Path, name: &str, body: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
