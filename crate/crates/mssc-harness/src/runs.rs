//! The drivers behind each CLI subcommand. Each run produces report files
//! under the configured output directory and returns its summary for the CLI
//! to print.
//!
//! Step accounting follows the cost model exactly: in stage 1 of a step both
//! sides pay their access and the online algorithm reorders; in stage 2 the
//! offline baseline reorders. The audit driver owns this stage clock.

use std::path::PathBuf;

use mssc_core::adversary::{
    lb_offline_strategy, random_instance, run_lower_bound_phases, PhaseConfig,
};
use mssc_core::dlm::{AlgState, StepReport};
use mssc_core::offline::{
    best_fixed_permutation, derive_mtfb_from_opt, mtfb_replay, opt_dynamic_bruteforce,
    OfflineTrace, OptResult,
};
use mssc_core::potentials::{
    audit_stage1_step, audit_stage2_move, total_potential, AuditVerdict, PairState,
    PotentialParams,
};
use mssc_core::rational::{ratio_int, ratio_to_string};
use mssc_core::{access_cost, ElementId, Error, Instance, Permutation, Ratio};

use crate::config::{
    AuditConfig, BaselineChoice, GenConfig, LowerBoundConfig, OracleConfig, OutputFormat,
    SimulateConfig,
};
use crate::report::{
    ratio_field, write_csv, write_json, write_text, AuditRecord, AuditReport, AuditSummary,
    LowerBoundPhaseRow, LowerBoundReport, OracleReport, SimulateSummary, TraceJson, TraceRow,
    TraceStepJson, SCHEMA_VERSION,
};

/// A completed online run: one report per step plus every permutation.
#[derive(Debug, Clone)]
pub struct AlgRun {
    pub reports: Vec<StepReport>,
    /// `perms[0]` is the initial list, `perms[t]` the list after step `t`.
    pub perms: Vec<Permutation>,
}

impl AlgRun {
    pub fn access_total(&self) -> u64 {
        self.reports.iter().map(|r| r.access).sum()
    }

    pub fn reorder_total(&self) -> u64 {
        self.reports.iter().map(|r| r.reorder).sum()
    }

    pub fn total(&self) -> u64 {
        self.access_total() + self.reorder_total()
    }
}

/// Runs the configured algorithm over the whole instance.
pub fn run_algorithm(
    inst: &Instance,
    algorithm: crate::config::AlgorithmChoice,
) -> Result<AlgRun, Error> {
    let mut state = AlgState::new(inst.initial().clone(), algorithm.divisor_mode())?;
    let mut reports = Vec::with_capacity(inst.m());
    let mut perms = Vec::with_capacity(inst.m() + 1);
    perms.push(inst.initial().clone());
    for req in inst.requests() {
        reports.push(state.serve(req)?);
        perms.push(state.perm().clone());
    }
    Ok(AlgRun { reports, perms })
}

/// Recomputes every step's costs from the recorded permutation sequence:
/// access against the pre-step list, reordering as the inversion distance to
/// the post-step list.
pub fn verify_cost_order(inst: &Instance, run: &AlgRun) -> Result<(), Error> {
    for (t, req) in inst.requests().iter().enumerate() {
        let access = access_cost(&run.perms[t], req)?;
        if access != run.reports[t].access {
            return Err(Error::TraceMismatch(format!(
                "step {t}: access {access} recomputed, {} recorded",
                run.reports[t].access
            )));
        }
        let reorder = run.perms[t].inversion_distance(&run.perms[t + 1])?;
        if reorder != run.reports[t].reorder {
            return Err(Error::TraceMismatch(format!(
                "step {t}: reorder {reorder} recomputed, {} recorded",
                run.reports[t].reorder
            )));
        }
    }
    Ok(())
}

/// A computed offline baseline.
#[derive(Debug, Clone)]
pub enum BaselineResult {
    Opt(OptResult),
    Fixed { perm: Permutation, access_only: u64 },
    Mtfb(OfflineTrace),
}

impl BaselineResult {
    pub fn cost(&self) -> u64 {
        match self {
            BaselineResult::Opt(opt) => opt.total,
            BaselineResult::Fixed { access_only, .. } => *access_only,
            BaselineResult::Mtfb(trace) => trace.total,
        }
    }
}

pub fn compute_baseline(inst: &Instance, choice: &BaselineChoice) -> Result<BaselineResult, Error> {
    match choice {
        BaselineChoice::Opt => Ok(BaselineResult::Opt(opt_dynamic_bruteforce(inst)?)),
        BaselineChoice::BestFixed => {
            let (perm, access_only) = best_fixed_permutation(inst)?;
            Ok(BaselineResult::Fixed { perm, access_only })
        }
        BaselineChoice::MtfbFromOpt => {
            let opt = opt_dynamic_bruteforce(inst)?;
            Ok(BaselineResult::Mtfb(derive_mtfb_from_opt(inst, &opt)?))
        }
        BaselineChoice::MtfbChoices(choices) => {
            Ok(BaselineResult::Mtfb(mtfb_replay(inst, choices)?))
        }
    }
}

fn ratio_f64(r: &Ratio) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn div_f64(num: u64, den: u64) -> Option<f64> {
    (den != 0).then(|| num as f64 / den as f64)
}

fn alg_trace_rows(run: &AlgRun) -> (Vec<TraceRow>, Vec<TraceStepJson>) {
    let mut rows = Vec::with_capacity(run.reports.len());
    let mut json_rows = Vec::with_capacity(run.reports.len());
    let mut cum = 0u64;
    for (t, report) in run.reports.iter().enumerate() {
        cum += report.cost();
        rows.push(TraceRow {
            schema: SCHEMA_VERSION,
            side: "ALG",
            step: t + 1,
            access: report.access,
            reorder: report.reorder,
            ell: report.ell as u64,
            fetched: report.fetched.len(),
            cum_cost: cum,
        });
        json_rows.push(TraceStepJson {
            side: "ALG",
            step: t + 1,
            access: report.access,
            reorder: report.reorder,
            ell: report.ell as u64,
            fetched: report.fetched.clone(),
            budget_increments: report
                .budget_increments
                .iter()
                .map(|(e, b)| (*e, ratio_to_string(b)))
                .collect(),
            cum_cost: cum,
        });
    }
    (rows, json_rows)
}

fn baseline_trace_rows(
    inst: &Instance,
    baseline: &BaselineResult,
) -> Result<(Vec<TraceRow>, Vec<TraceStepJson>), Error> {
    let mut rows = Vec::with_capacity(inst.m());
    let mut json_rows = Vec::with_capacity(inst.m());
    let mut cum = 0u64;
    let mut push = |step: usize, access: u64, reorder: u64, fetched: Vec<(usize, usize)>| {
        cum += access + reorder;
        rows.push(TraceRow {
            schema: SCHEMA_VERSION,
            side: "OFF",
            step,
            access,
            reorder,
            ell: access,
            fetched: fetched.len(),
            cum_cost: cum,
        });
        json_rows.push(TraceStepJson {
            side: "OFF",
            step,
            access,
            reorder,
            ell: access,
            fetched,
            budget_increments: Vec::new(),
            cum_cost: cum,
        });
    };
    match baseline {
        BaselineResult::Opt(opt) => {
            for (t, step) in opt.steps.iter().enumerate() {
                push(t + 1, step.access, step.reorder, Vec::new());
            }
        }
        BaselineResult::Fixed { perm, .. } => {
            for (t, req) in inst.requests().iter().enumerate() {
                push(t + 1, access_cost(perm, req)?, 0, Vec::new());
            }
        }
        BaselineResult::Mtfb(trace) => {
            for (t, step) in trace.steps.iter().enumerate() {
                let fetched = step
                    .moved
                    .map(|e| vec![(e, step.reorder as usize + 1)])
                    .unwrap_or_default();
                push(t + 1, step.access, step.reorder, fetched);
            }
        }
    }
    Ok((rows, json_rows))
}

#[derive(Debug)]
pub struct SimulateOutcome {
    pub summary: SimulateSummary,
    pub trace_path: PathBuf,
    pub summary_path: PathBuf,
}

pub fn run_simulate(cfg: &SimulateConfig) -> anyhow::Result<SimulateOutcome> {
    let inst = &cfg.instance;
    let run = run_algorithm(inst, cfg.algorithm)?;
    verify_cost_order(inst, &run)?;

    let baseline = cfg
        .baseline
        .as_ref()
        .map(|choice| compute_baseline(inst, choice))
        .transpose()?;

    let (mut rows, mut json_rows) = alg_trace_rows(&run);
    if let Some(result) = &baseline {
        let (off_rows, off_json) = baseline_trace_rows(inst, result)?;
        rows.extend(off_rows);
        json_rows.extend(off_json);
    }
    let trace_path = match cfg.format {
        OutputFormat::Csv => write_csv(&cfg.out, "trace.csv", &rows)?,
        OutputFormat::Json => write_json(
            &cfg.out,
            "trace.json",
            &TraceJson { schema: SCHEMA_VERSION, rows: json_rows },
        )?,
    };

    let baseline_cost = baseline.as_ref().map(BaselineResult::cost);
    let summary = SimulateSummary {
        schema: SCHEMA_VERSION,
        n: inst.n(),
        r: inst.r(),
        m: inst.m(),
        algorithm: cfg.algorithm.label(),
        alg_access: run.access_total(),
        alg_reorder: run.reorder_total(),
        alg_cost: run.total(),
        baseline: cfg.baseline.as_ref().map(BaselineChoice::label),
        baseline_cost,
        ratio: baseline_cost.and_then(|c| div_f64(run.total(), c)),
    };
    let summary_path = write_json(&cfg.out, "summary.json", &summary)?;
    Ok(SimulateOutcome { summary, trace_path, summary_path })
}

#[derive(Debug)]
pub struct AuditOutcome {
    pub report: AuditReport,
    pub failures: usize,
    pub first_failure: Option<(usize, &'static str)>,
    pub report_path: PathBuf,
}

pub fn run_audit(cfg: &AuditConfig) -> anyhow::Result<AuditOutcome> {
    let inst = &cfg.instance;
    let params = PotentialParams::new(inst.r());

    // The offline side: its starting list, and its per-step move when it is
    // MTF-based. The fixed baseline never reorders, so its stage 2 is empty.
    let (off_start, moves): (Permutation, Option<Vec<ElementId>>) = match &cfg.baseline {
        BaselineChoice::BestFixed => {
            let (sigma, _) = best_fixed_permutation(inst)?;
            (sigma, None)
        }
        BaselineChoice::MtfbFromOpt => {
            let opt = opt_dynamic_bruteforce(inst)?;
            let trace = derive_mtfb_from_opt(inst, &opt)?;
            let choices = trace
                .steps
                .iter()
                .map(|s| s.moved.expect("mtfb steps always move"))
                .collect();
            (inst.initial().clone(), Some(choices))
        }
        BaselineChoice::MtfbChoices(choices) => {
            mtfb_replay(inst, choices)?; // validates length and membership
            (inst.initial().clone(), Some(choices.clone()))
        }
        BaselineChoice::Opt => return Err(Error::AuditRequiresBaseline.into()),
    };

    let alg = AlgState::new(inst.initial().clone(), cfg.algorithm.divisor_mode())?;
    let mut pair = PairState::new(alg, off_start)?;
    let (initial_phi, initial_psi) = total_potential(&params, &pair);

    let mut records: Vec<AuditRecord> = Vec::new();
    let mut failures = 0usize;
    let mut first_failure: Option<(usize, &'static str)> = None;
    let mut max_slack: Option<f64> = None;
    {
        let mut push = |step: usize, verdict: &AuditVerdict| {
            let stage = verdict.stage.as_str();
            if !verdict.pass {
                failures += 1;
                first_failure.get_or_insert((step, stage));
            }
            if verdict.bound > ratio_int(0) {
                let slack = ratio_f64(&verdict.lhs()) / ratio_f64(&verdict.bound);
                max_slack = Some(max_slack.map_or(slack, |m: f64| m.max(slack)));
            }
            records.push(AuditRecord {
                schema: SCHEMA_VERSION,
                step,
                stage,
                delta_alg: verdict.delta_alg,
                delta_phi: ratio_field(&verdict.delta_phi),
                delta_psi: ratio_field(&verdict.delta_psi),
                delta_off: verdict.delta_off,
                bound: ratio_field(&verdict.bound),
                verdict: if verdict.pass { "PASS" } else { "FAIL" },
            });
        };

        for (t, req) in inst.requests().iter().enumerate() {
            let step = t + 1;
            let stage1 = audit_stage1_step(&params, &mut pair, req)?;
            for verdict in &stage1.fetch_verdicts {
                push(step, verdict);
            }
            push(step, &stage1.stage1);
            if let Some(moves) = &moves {
                let verdict = audit_stage2_move(&params, &mut pair, moves[t])?;
                push(step, &verdict);
            }
        }
    }

    let (final_phi, final_psi) = total_potential(&params, &pair);
    let summary = AuditSummary {
        steps: inst.m(),
        records: records.len(),
        failures,
        max_slack_ratio: max_slack,
        initial_phi: ratio_field(&initial_phi),
        initial_psi: ratio_field(&initial_psi),
        final_phi: ratio_field(&final_phi),
        final_psi: ratio_field(&final_psi),
    };
    let report = AuditReport {
        schema: SCHEMA_VERSION,
        algorithm: cfg.algorithm.label(),
        baseline: cfg.baseline.label(),
        records,
        summary,
    };
    let report_path = write_json(&cfg.out, "audit.json", &report)?;
    if cfg.format == OutputFormat::Csv {
        write_csv(&cfg.out, "audit.csv", &report.records)?;
    }
    Ok(AuditOutcome { failures, first_failure, report, report_path })
}

#[derive(Debug)]
pub struct OracleOutcome {
    pub report: OracleReport,
    pub report_path: PathBuf,
}

pub fn run_oracle(cfg: &OracleConfig) -> anyhow::Result<OracleOutcome> {
    let inst = &cfg.instance;
    let run = run_algorithm(inst, cfg.algorithm)?;
    verify_cost_order(inst, &run)?;
    let opt = opt_dynamic_bruteforce(inst)?;
    let off_star = derive_mtfb_from_opt(inst, &opt)?;
    let (sigma, best_fixed_cost) = best_fixed_permutation(inst)?;

    let params = PotentialParams::new(inst.r());
    let start = AlgState::new(inst.initial().clone(), cfg.algorithm.divisor_mode())?;
    let pair = PairState::new(start, sigma)?;
    let (phi0, psi0) = total_potential(&params, &pair);
    let static_bound =
        params.stage1_coefficient() * ratio_int(best_fixed_cost as i64) + phi0 + psi0;

    let report = OracleReport {
        schema: SCHEMA_VERSION,
        n: inst.n(),
        r: inst.r(),
        m: inst.m(),
        algorithm: cfg.algorithm.label(),
        alg_cost: run.total(),
        opt_cost: opt.total,
        four_opt_cost: 4 * opt.total,
        off_star_cost: off_star.total,
        best_fixed_cost,
        alg_over_opt: div_f64(run.total(), opt.total),
        off_star_over_opt: div_f64(off_star.total, opt.total),
        alg_over_best_fixed: div_f64(run.total(), best_fixed_cost),
        stage1_coefficient: ratio_field(&params.stage1_coefficient()),
        initial_phi: ratio_field(&phi0),
        initial_psi: ratio_field(&psi0),
        static_bound_holds: ratio_int(run.total() as i64) <= static_bound,
        four_opt_holds: off_star.total <= 4 * opt.total,
    };
    let report_path = write_json(&cfg.out, "oracle.json", &report)?;
    if cfg.format == OutputFormat::Csv {
        write_csv(&cfg.out, "oracle.csv", std::slice::from_ref(&report))?;
    }
    Ok(OracleOutcome { report, report_path })
}

#[derive(Debug)]
pub struct LowerBoundOutcome {
    pub report: LowerBoundReport,
    pub rows: Vec<LowerBoundPhaseRow>,
    pub report_path: PathBuf,
}

pub fn run_lowerbound(cfg: &LowerBoundConfig) -> anyhow::Result<LowerBoundOutcome> {
    let config = PhaseConfig::new(cfg.r, cfg.c, cfg.phases)?;
    let run = run_lower_bound_phases(&config);
    let off = lb_offline_strategy(&config, run.instance.initial(), &run.phases)?;

    let threshold_num = (cfg.r * cfg.r) as u128;
    let mut rows = Vec::with_capacity(cfg.phases);
    let mut alg_cum = 0u64;
    let mut off_cum = off.setup_cost;
    let mut crossing_phase = None;
    for (j, (phase, off_cost)) in run.phases.iter().zip(&off.phase_costs).enumerate() {
        alg_cum += phase.alg_cost();
        off_cum += off_cost.total();
        // Exact comparison: 3 * alg >= r^2 * off.
        if crossing_phase.is_none() && 3 * alg_cum as u128 >= threshold_num * off_cum as u128 {
            crossing_phase = Some(j + 1);
        }
        rows.push(LowerBoundPhaseRow {
            schema: SCHEMA_VERSION,
            phase: j + 1,
            alg_access: phase.alg_access(),
            alg_reorder: phase.alg_reorder(),
            alg_cost: phase.alg_cost(),
            alg_floor: config.per_phase_alg_floor(),
            off_access: off_cost.access,
            off_reorder: off_cost.reorder,
            off_cost: off_cost.total(),
            off_ceiling: config.per_phase_off_ceiling(),
            cum_ratio: alg_cum as f64 / off_cum as f64,
        });
    }

    let alg_total = run.alg_total();
    let off_phases_total: u64 = off.phase_costs.iter().map(|c| c.total()).sum();
    let pass = 3 * alg_total as u128 >= threshold_num * off.total_with_setup as u128;
    let report = LowerBoundReport {
        schema: SCHEMA_VERSION,
        r: cfg.r,
        c: cfg.c,
        n: config.n(),
        phases: cfg.phases,
        alg_cost: alg_total,
        off_cost: off_phases_total,
        setup_cost: off.setup_cost,
        ratio: alg_total as f64 / off.total_with_setup as f64,
        ratio_excluding_setup: alg_total as f64 / off_phases_total as f64,
        threshold: (cfg.r * cfg.r) as f64 / 3.0,
        crossing_phase,
        pass,
    };
    let report_path = write_json(&cfg.out, "lowerbound.json", &report)?;
    write_csv(&cfg.out, "lowerbound.csv", &rows)?;
    write_text(
        &cfg.out,
        "lowerbound_instance.json",
        &(run.instance.to_json_string() + "\n"),
    )?;
    Ok(LowerBoundOutcome { report, rows, report_path })
}

pub fn run_gen(cfg: &GenConfig) -> anyhow::Result<PathBuf> {
    let inst = random_instance(cfg.n, cfg.r, cfg.m, cfg.dist, cfg.seed)?;
    write_text(&cfg.out, "instance.json", &(inst.to_json_string() + "\n"))
}
