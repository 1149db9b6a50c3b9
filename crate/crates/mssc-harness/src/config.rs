//! Run configurations. Exactly one algorithm and at most one baseline per
//! run; the CLI layer resolves instance files or generator parameters into
//! [`Instance`] values before building these.

use std::path::PathBuf;

use mssc_core::adversary::RequestDistribution;
use mssc_core::dlm::DivisorMode;
use mssc_core::{ElementId, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmChoice {
    /// Budget divisor = request cardinality.
    Dlm,
    /// Budget divisor fixed to `c >= 1`.
    DlmC(u64),
}

impl AlgorithmChoice {
    pub fn divisor_mode(&self) -> DivisorMode {
        match self {
            AlgorithmChoice::Dlm => DivisorMode::PerRequestCardinality,
            AlgorithmChoice::DlmC(c) => DivisorMode::FixedConstant(*c),
        }
    }

    pub fn label(&self) -> String {
        match self {
            AlgorithmChoice::Dlm => "dlm".into(),
            AlgorithmChoice::DlmC(c) => format!("dlm_c({c})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaselineChoice {
    /// Exact dynamic optimum (brute force; small n only).
    Opt,
    /// Best fixed permutation, access cost only.
    BestFixed,
    /// The MTF-based 4-approximation derived from the optimum.
    MtfbFromOpt,
    /// An MTF-based play with externally supplied per-step choices.
    MtfbChoices(Vec<ElementId>),
}

impl BaselineChoice {
    pub fn label(&self) -> &'static str {
        match self {
            BaselineChoice::Opt => "opt",
            BaselineChoice::BestFixed => "best_fixed",
            BaselineChoice::MtfbFromOpt => "mtfb_from_opt",
            BaselineChoice::MtfbChoices(_) => "mtfb_choices",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub instance: Instance,
    pub algorithm: AlgorithmChoice,
    pub baseline: Option<BaselineChoice>,
    pub out: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub instance: Instance,
    pub algorithm: AlgorithmChoice,
    pub baseline: BaselineChoice,
    pub out: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub instance: Instance,
    pub algorithm: AlgorithmChoice,
    pub out: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct LowerBoundConfig {
    pub r: usize,
    pub c: usize,
    pub phases: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub dist: RequestDistribution,
    pub seed: u64,
    pub out: PathBuf,
}
