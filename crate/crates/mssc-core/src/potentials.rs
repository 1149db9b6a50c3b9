//! Potential functions over (online position, offline position, budget) and
//! the per-step auditors for the amortized inequalities.
//!
//! Positions are decomposed as `2^p + q`. An element is *safe* when its online
//! depth exponent `p` is at most `p* + kappa - 1`; the potentials switch
//! branches around that threshold. All audit verdicts are exact rational
//! comparisons: there are no tolerances anywhere in this module.

use crate::dlm::{replay_step, AlgState, ReplayAction, StepReport};
use crate::error::{Error, Result};
use crate::instance::{access_cost, Request};
use crate::perm::{position_decompose, ElementId, Permutation};
use crate::rational::{ratio, ratio_int, Ratio};

/// The constants `alpha`, `beta`, `gamma`, `kappa`, derived from `r`.
///
/// `alpha = 2`, `gamma = 5r`, `beta = 7.5r + 5` (exact rational), and
/// `kappa = ceil(log2(6 beta))`. The base of the logarithm is 2: it is the
/// only base under which `2^kappa >= 6 beta` is guaranteed by the ceiling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialParams {
    r: usize,
    alpha: Ratio,
    beta: Ratio,
    gamma: Ratio,
    kappa: u32,
}

impl PotentialParams {
    pub fn new(r: usize) -> Self {
        assert!(r >= 1, "cardinality bound must be positive");
        let alpha = ratio_int(2);
        let gamma = ratio_int(5 * r as i64);
        let beta = ratio(15 * r as i64 + 10, 2);
        // 6 beta = 45r + 30, an integer.
        let six_beta = 45 * r as u64 + 30;
        let kappa = six_beta.next_power_of_two().ilog2();
        let params = Self { r, alpha, beta, gamma, kappa };
        debug_assert!(params.relations_hold());
        params
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn alpha(&self) -> Ratio {
        self.alpha
    }

    pub fn beta(&self) -> Ratio {
        self.beta
    }

    pub fn gamma(&self) -> Ratio {
        self.gamma
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// The relations the analysis actually uses: `alpha >= 2`,
    /// `gamma >= (3 + alpha) r`, `beta >= 3 + alpha + (3/2) gamma`,
    /// `2^kappa >= 6 beta`.
    pub fn relations_hold(&self) -> bool {
        self.alpha >= ratio_int(2)
            && self.gamma >= (ratio_int(3) + self.alpha) * ratio_int(self.r as i64)
            && self.beta >= ratio_int(3) + self.alpha + ratio(3, 2) * self.gamma
            && ratio_int(1i64 << self.kappa) >= ratio_int(6) * self.beta
    }

    /// Stage-1 bound per unit of offline access: `(3 + alpha) * 2^(kappa+1)`.
    pub fn stage1_coefficient(&self) -> Ratio {
        (ratio_int(3) + self.alpha) * ratio_int(1i64 << (self.kappa + 1))
    }

    /// Stage-2 bound per unit of offline reordering: `beta * 2^(kappa+3)`.
    ///
    /// Assembled from the per-element bounds `delta Phi_z <= beta 2^(kappa+1) pi*(z)`
    /// and `delta Psi_z <= 2 beta 2^kappa pi*(z)`, with the offline move cost
    /// `pi*(z) - 1 >= pi*(z) / 2` whenever the element actually moves.
    pub fn stage2_coefficient(&self) -> Ratio {
        self.beta * ratio_int(1i64 << (self.kappa + 3))
    }
}

/// The online state paired with the offline permutation it is audited against.
#[derive(Debug, Clone)]
pub struct PairState {
    alg: AlgState,
    off: Permutation,
}

impl PairState {
    pub fn new(alg: AlgState, off: Permutation) -> Result<Self> {
        if alg.n() != off.n() {
            return Err(Error::DomainMismatch);
        }
        Ok(Self { alg, off })
    }

    pub fn alg(&self) -> &AlgState {
        &self.alg
    }

    pub fn off(&self) -> &Permutation {
        &self.off
    }

    pub fn n(&self) -> usize {
        self.off.n()
    }
}

/// First potential of a single element, from raw components.
pub fn phi_term(params: &PotentialParams, alg_pos: usize, off_pos: usize, budget: Ratio) -> Ratio {
    let (p, _) = position_decompose(alg_pos).expect("positions are >= 1");
    let (p_star, _) = position_decompose(off_pos).expect("positions are >= 1");
    if p <= p_star + params.kappa {
        params.alpha * budget
    } else {
        params.beta * ratio_int(alg_pos as i64) - params.gamma * budget
    }
}

/// Second potential of a single element, from raw components.
pub fn psi_term(params: &PotentialParams, alg_pos: usize, off_pos: usize) -> Ratio {
    let (p, q) = position_decompose(alg_pos).expect("positions are >= 1");
    let (p_star, _) = position_decompose(off_pos).expect("positions are >= 1");
    if p < p_star + params.kappa {
        ratio_int(0)
    } else {
        ratio_int(2) * params.beta * ratio_int(q as i64)
    }
}

/// Safety from raw positions: `p <= p* + kappa - 1`.
pub fn is_safe_term(params: &PotentialParams, alg_pos: usize, off_pos: usize) -> bool {
    let (p, _) = position_decompose(alg_pos).expect("positions are >= 1");
    let (p_star, _) = position_decompose(off_pos).expect("positions are >= 1");
    p < p_star + params.kappa
}

pub fn phi_z(params: &PotentialParams, pair: &PairState, z: ElementId) -> Result<Ratio> {
    let alg_pos = pair.alg.perm().position(z)?;
    let off_pos = pair.off.position(z)?;
    Ok(phi_term(params, alg_pos, off_pos, pair.alg.budget(z)?))
}

pub fn psi_z(params: &PotentialParams, pair: &PairState, z: ElementId) -> Result<Ratio> {
    let alg_pos = pair.alg.perm().position(z)?;
    let off_pos = pair.off.position(z)?;
    Ok(psi_term(params, alg_pos, off_pos))
}

/// A safe element is never much deeper on the online list than on the offline
/// one: when this returns true, `pi(w) <= 2^kappa * pi*(w)`.
pub fn is_safe(params: &PotentialParams, pair: &PairState, w: ElementId) -> Result<bool> {
    let alg_pos = pair.alg.perm().position(w)?;
    let off_pos = pair.off.position(w)?;
    Ok(is_safe_term(params, alg_pos, off_pos))
}

/// Sums the per-element potentials over the whole universe.
pub fn total_potential(params: &PotentialParams, pair: &PairState) -> (Ratio, Ratio) {
    let mut phi = ratio_int(0);
    let mut psi = ratio_int(0);
    for z in 0..pair.n() {
        phi += phi_z(params, pair, z).expect("z in range");
        psi += psi_z(params, pair, z).expect("z in range");
    }
    (phi, psi)
}

/// Which inequality a verdict checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditStage {
    /// One fetch: `cost + dPsi + sum_{w != z} dPhi_w <= 2 pi(z)`.
    Fetch,
    /// One full online step against the offline access cost.
    Stage1,
    /// One offline move-to-front against its reordering cost.
    Stage2,
}

impl AuditStage {
    pub fn as_str(&self) -> &'static str {
        match self {
            AuditStage::Fetch => "fetch",
            AuditStage::Stage1 => "stage1",
            AuditStage::Stage2 => "stage2",
        }
    }
}

/// Outcome of one audited inequality, with every compared quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditVerdict {
    pub stage: AuditStage,
    /// Online cost inside the audited window.
    pub delta_alg: u64,
    /// Potential change attributed to Phi (for fetch audits: summed over
    /// every element except the fetched one).
    pub delta_phi: Ratio,
    pub delta_psi: Ratio,
    /// Offline cost inside the window (access for stage 1, move cost for
    /// stage 2, zero for fetch audits).
    pub delta_off: u64,
    pub bound: Ratio,
    pub pass: bool,
}

impl AuditVerdict {
    pub fn lhs(&self) -> Ratio {
        ratio_int(self.delta_alg as i64) + self.delta_phi + self.delta_psi
    }
}

fn check_same_universe(before: &PairState, after: &PairState) -> Result<()> {
    if before.n() != after.n() {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

/// Audits one fetch of `z` on the online side (offline list untouched):
/// `fetch_cost + dPsi + sum_{w != z} dPhi_w <= 2 * pi_before(z)`.
pub fn audit_fetch(
    params: &PotentialParams,
    before: &PairState,
    after: &PairState,
    z: ElementId,
    fetch_cost: u64,
) -> Result<AuditVerdict> {
    check_same_universe(before, after)?;
    if before.off != after.off {
        return Err(Error::TraceMismatch(
            "offline permutation changed during a fetch audit".into(),
        ));
    }
    let pos_before = before.alg.perm().position(z)?;
    let mut delta_phi = ratio_int(0);
    let mut delta_psi = ratio_int(0);
    for w in 0..before.n() {
        if w != z {
            delta_phi += phi_z(params, after, w)? - phi_z(params, before, w)?;
        }
        delta_psi += psi_z(params, after, w)? - psi_z(params, before, w)?;
    }
    let bound = ratio_int(2 * pos_before as i64);
    let verdict = AuditVerdict {
        stage: AuditStage::Fetch,
        delta_alg: fetch_cost,
        delta_phi,
        delta_psi,
        delta_off: 0,
        bound,
        pass: false,
    };
    let pass = verdict.lhs() <= bound;
    Ok(AuditVerdict { pass, ..verdict })
}

/// Audits the first stage of a step (online access + online reordering,
/// offline access only): `dAlg + dPhi + dPsi <= (3 + alpha) 2^(kappa+1) * dOff`.
pub fn audit_stage1(
    params: &PotentialParams,
    before: &PairState,
    after: &PairState,
    step: &StepReport,
    off_access: u64,
) -> Result<AuditVerdict> {
    check_same_universe(before, after)?;
    if before.off != after.off {
        return Err(Error::TraceMismatch(
            "offline permutation changed during stage 1".into(),
        ));
    }
    let (phi_b, psi_b) = total_potential(params, before);
    let (phi_a, psi_a) = total_potential(params, after);
    let bound = params.stage1_coefficient() * ratio_int(off_access as i64);
    let verdict = AuditVerdict {
        stage: AuditStage::Stage1,
        delta_alg: step.cost(),
        delta_phi: phi_a - phi_b,
        delta_psi: psi_a - psi_b,
        delta_off: off_access,
        bound,
        pass: false,
    };
    let pass = verdict.lhs() <= bound;
    Ok(AuditVerdict { pass, ..verdict })
}

/// Audits the second stage of a step, in which the offline list moves `moved`
/// to its front and the online state is untouched:
/// `dPhi + dPsi <= beta 2^(kappa+3) * (pi*(moved) - 1)`.
///
/// When `moved` already sits at the offline front the bound is zero, so the
/// verdict demands `dPhi + dPsi <= 0`.
pub fn audit_stage2(
    params: &PotentialParams,
    before: &PairState,
    after: &PairState,
    moved: ElementId,
) -> Result<AuditVerdict> {
    check_same_universe(before, after)?;
    if before.alg != after.alg {
        return Err(Error::TraceMismatch(
            "online state changed during stage 2".into(),
        ));
    }
    let off_pos = before.off.position(moved)?;
    let delta_off = (off_pos - 1) as u64;
    let (phi_b, psi_b) = total_potential(params, before);
    let (phi_a, psi_a) = total_potential(params, after);
    let bound = params.stage2_coefficient() * ratio_int(delta_off as i64);
    let verdict = AuditVerdict {
        stage: AuditStage::Stage2,
        delta_alg: 0,
        delta_phi: phi_a - phi_b,
        delta_psi: psi_a - psi_b,
        delta_off,
        bound,
        pass: false,
    };
    let pass = verdict.lhs() <= bound;
    Ok(AuditVerdict { pass, ..verdict })
}

/// Everything audited while serving one request in stage 1.
#[derive(Debug, Clone)]
pub struct Stage1Audit {
    pub report: StepReport,
    pub off_access: u64,
    /// One verdict per fetch performed by the step, in execution order.
    pub fetch_verdicts: Vec<AuditVerdict>,
    pub stage1: AuditVerdict,
}

impl Stage1Audit {
    pub fn all_pass(&self) -> bool {
        self.stage1.pass && self.fetch_verdicts.iter().all(|v| v.pass)
    }
}

/// Serves `req` on the pair's online side and audits the step: every fetch
/// individually (by replaying the report) plus the aggregate stage-1 bound
/// against the offline access cost on the unchanged offline list.
pub fn audit_stage1_step(
    params: &PotentialParams,
    pair: &mut PairState,
    req: &Request,
) -> Result<Stage1Audit> {
    let off_access = access_cost(&pair.off, req)?;
    let before_alg = pair.alg.clone();
    let report = pair.alg.serve(req)?;

    let events = replay_step(&before_alg, &report)?;
    let mut fetch_verdicts = Vec::new();
    let mut prev = before_alg.clone();
    for event in &events {
        if let ReplayAction::Fetch { element, cost } = event.action {
            let window_before = PairState { alg: prev, off: pair.off.clone() };
            let window_after = PairState {
                alg: event.state_after.clone(),
                off: pair.off.clone(),
            };
            fetch_verdicts.push(audit_fetch(
                params,
                &window_before,
                &window_after,
                element,
                cost,
            )?);
        }
        prev = event.state_after.clone();
    }
    debug_assert_eq!(prev, pair.alg, "replay must land on the served state");

    let before = PairState { alg: before_alg, off: pair.off.clone() };
    let stage1 = audit_stage1(params, &before, pair, &report, off_access)?;
    Ok(Stage1Audit { report, off_access, fetch_verdicts, stage1 })
}

/// Applies one offline move-to-front on the pair and audits it.
pub fn audit_stage2_move(
    params: &PotentialParams,
    pair: &mut PairState,
    moved: ElementId,
) -> Result<AuditVerdict> {
    let before = pair.clone();
    pair.off.move_to_front_in_place(moved)?;
    audit_stage2(params, &before, pair, moved)
}
