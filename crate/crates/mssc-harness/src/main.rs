use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mssc_core::adversary::RequestDistribution;
use mssc_core::{ElementId, Instance};
use mssc_harness::config::{
    AlgorithmChoice, AuditConfig, BaselineChoice, GenConfig, LowerBoundConfig, OracleConfig,
    OutputFormat, SimulateConfig,
};
use mssc_harness::runs;

/// Exit codes: 0 all audits pass, 1 audit failure, 2 configuration or I/O error.
#[derive(Parser)]
#[command(
    name = "mssc",
    version,
    about = "Online min-sum set cover: simulator, inequality auditors, offline oracles, and the adversarial lower bound"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded random instance file
    Gen(GenArgs),
    /// Run the online algorithm, optionally against a baseline
    Simulate(SimulateArgs),
    /// Check every amortized inequality along a run; exits 1 on any FAIL
    Audit(AuditArgs),
    /// Compare a run against the exact offline oracles
    Oracle(OracleArgs),
    /// Reproduce the adversarial lower-bound construction
    Lowerbound(LowerboundArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Zipf,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgArg {
    Dlm,
    DlmC,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Opt,
    BestFixed,
    MtfbFromOpt,
    MtfbChoices,
}

#[derive(Args)]
struct OutArgs {
    /// Output directory for report files
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Table format for traces and record files
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Seed for generated instances
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SourceArgs {
    /// Instance JSON file (alternative to the generator flags)
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Generator: universe size
    #[arg(long)]
    n: Option<usize>,
    /// Generator: request cardinality bound
    #[arg(long)]
    r: Option<usize>,
    /// Generator: number of requests
    #[arg(long)]
    m: Option<usize>,
    /// Generator: element distribution
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    dist: DistArg,
    /// Zipf exponent, used with --dist zipf
    #[arg(long, default_value_t = 1.1)]
    zipf_exponent: f64,
}

impl SourceArgs {
    fn resolve(&self, seed: u64) -> anyhow::Result<Instance> {
        if let Some(path) = &self.instance {
            if self.n.is_some() || self.r.is_some() || self.m.is_some() {
                bail!("--instance conflicts with the generator flags --n/--r/--m");
            }
            let body = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return Ok(Instance::from_json_str(&body)?);
        }
        match (self.n, self.r, self.m) {
            (Some(n), Some(r), Some(m)) => {
                let dist = match self.dist {
                    DistArg::Uniform => RequestDistribution::Uniform,
                    DistArg::Zipf => RequestDistribution::Zipf(self.zipf_exponent),
                };
                Ok(mssc_core::adversary::random_instance(n, r, m, dist, seed)?)
            }
            _ => bail!("provide either --instance FILE or all of --n, --r, --m"),
        }
    }
}

#[derive(Args)]
struct AlgorithmArgs {
    /// Online algorithm
    #[arg(long, value_enum, default_value_t = AlgArg::Dlm)]
    algorithm: AlgArg,
    /// Fixed budget divisor, required with --algorithm dlm-c
    #[arg(long)]
    c: Option<u64>,
}

impl AlgorithmArgs {
    fn resolve(&self) -> anyhow::Result<AlgorithmChoice> {
        match (self.algorithm, self.c) {
            (AlgArg::Dlm, None) => Ok(AlgorithmChoice::Dlm),
            (AlgArg::Dlm, Some(_)) => bail!("--c only applies to --algorithm dlm-c"),
            (AlgArg::DlmC, Some(c)) if c >= 1 => Ok(AlgorithmChoice::DlmC(c)),
            (AlgArg::DlmC, Some(_)) => bail!("--c must be at least 1"),
            (AlgArg::DlmC, None) => bail!("--algorithm dlm-c requires --c"),
        }
    }
}

#[derive(Args)]
struct BaselineArgs {
    /// Offline baseline to compute alongside the run
    #[arg(long, value_enum)]
    baseline: Option<BaselineArg>,
    /// JSON array of per-step chosen elements, with --baseline mtfb-choices
    #[arg(long)]
    choices: Option<PathBuf>,
}

impl BaselineArgs {
    fn resolve(&self) -> anyhow::Result<Option<BaselineChoice>> {
        let choice = match self.baseline {
            None => {
                if self.choices.is_some() {
                    bail!("--choices requires --baseline mtfb-choices");
                }
                return Ok(None);
            }
            Some(BaselineArg::Opt) => BaselineChoice::Opt,
            Some(BaselineArg::BestFixed) => BaselineChoice::BestFixed,
            Some(BaselineArg::MtfbFromOpt) => BaselineChoice::MtfbFromOpt,
            Some(BaselineArg::MtfbChoices) => {
                let path = self
                    .choices
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("--baseline mtfb-choices requires --choices FILE"))?;
                let body = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let choices: Vec<ElementId> =
                    serde_json::from_str(&body).context("choices file must be a JSON array of element ids")?;
                BaselineChoice::MtfbChoices(choices)
            }
        };
        if self.choices.is_some() && !matches!(choice, BaselineChoice::MtfbChoices(_)) {
            bail!("--choices requires --baseline mtfb-choices");
        }
        Ok(Some(choice))
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    dist: DistArg,
    #[arg(long, default_value_t = 1.1)]
    zipf_exponent: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[command(flatten)]
    baseline: BaselineArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[command(flatten)]
    baseline: BaselineArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct LowerboundArgs {
    /// Request cardinality (at least 2)
    #[arg(long)]
    r: usize,
    /// Fixed budget divisor of the audited algorithm
    #[arg(long)]
    c: usize,
    /// Number of phases to play
    #[arg(long)]
    phases: usize,
    #[command(flatten)]
    out: OutArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen(args) => {
            let dist = match args.dist {
                DistArg::Uniform => RequestDistribution::Uniform,
                DistArg::Zipf => RequestDistribution::Zipf(args.zipf_exponent),
            };
            let cfg = GenConfig {
                n: args.n,
                r: args.r,
                m: args.m,
                dist,
                seed: args.out.seed,
                out: args.out.out,
            };
            let path = runs::run_gen(&cfg)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Simulate(args) => {
            let cfg = SimulateConfig {
                instance: args.source.resolve(args.out.seed)?,
                algorithm: args.algorithm.resolve()?,
                baseline: args.baseline.resolve()?,
                out: args.out.out,
                format: args.out.format.into(),
            };
            let outcome = runs::run_simulate(&cfg)?;
            let s = &outcome.summary;
            print!(
                "{} on n={} r={} m={}: access {} + reorder {} = {}",
                s.algorithm, s.n, s.r, s.m, s.alg_access, s.alg_reorder, s.alg_cost
            );
            match (s.baseline, s.baseline_cost, s.ratio) {
                (Some(label), Some(cost), Some(ratio)) => {
                    println!("; {label} = {cost}, ratio {ratio:.4}")
                }
                (Some(label), Some(cost), None) => println!("; {label} = {cost}"),
                _ => println!(),
            }
            println!("trace: {}", outcome.trace_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Audit(args) => {
            let baseline = args
                .baseline
                .resolve()?
                .ok_or(mssc_core::Error::AuditRequiresBaseline)?;
            let cfg = AuditConfig {
                instance: args.source.resolve(args.out.seed)?,
                algorithm: args.algorithm.resolve()?,
                baseline,
                out: args.out.out,
                format: args.out.format.into(),
            };
            let outcome = runs::run_audit(&cfg)?;
            println!(
                "audited {} records over {} steps: {} failures",
                outcome.report.summary.records,
                outcome.report.summary.steps,
                outcome.failures
            );
            println!("report: {}", outcome.report_path.display());
            if let Some((step, stage)) = outcome.first_failure {
                println!("first failure: step {step} ({stage})");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Oracle(args) => {
            let cfg = OracleConfig {
                instance: args.source.resolve(args.out.seed)?,
                algorithm: args.algorithm.resolve()?,
                out: args.out.out,
                format: args.out.format.into(),
            };
            let outcome = runs::run_oracle(&cfg)?;
            let r = &outcome.report;
            println!(
                "{}: alg {} | opt {} | 4*opt {} | off* {} | best_fixed {}",
                r.algorithm, r.alg_cost, r.opt_cost, r.four_opt_cost, r.off_star_cost,
                r.best_fixed_cost
            );
            println!(
                "static bound holds: {}; off* within 4*opt: {}",
                r.static_bound_holds, r.four_opt_holds
            );
            println!("report: {}", outcome.report_path.display());
            if r.static_bound_holds && r.four_opt_holds {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Cmd::Lowerbound(args) => {
            let cfg = LowerBoundConfig {
                r: args.r,
                c: args.c,
                phases: args.phases,
                out: args.out.out,
                format: args.out.format.into(),
            };
            let outcome = runs::run_lowerbound(&cfg)?;
            let r = &outcome.report;
            println!(
                "r={} c={} n={} phases={}: alg {} vs off {} (+ setup {}), ratio {:.3} (threshold {:.3})",
                r.r, r.c, r.n, r.phases, r.alg_cost, r.off_cost, r.setup_cost, r.ratio, r.threshold
            );
            match r.crossing_phase {
                Some(p) => println!("ratio crossed the threshold at phase {p}"),
                None => println!("ratio never crossed the threshold"),
            }
            println!("report: {}", outcome.report_path.display());
            if r.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}
