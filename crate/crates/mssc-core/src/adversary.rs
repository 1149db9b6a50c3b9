//! Request generators: the adaptive lower-bound construction against the
//! fixed-divisor algorithm, its matching cheap offline play, and the random
//! generators fueling audit campaigns.

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::dlm::{AlgState, DivisorMode, StepReport};
use crate::error::{Error, Result};
use crate::instance::{Instance, Request, StepCost};
use crate::offline::{OfflineStep, OfflineTrace};
use crate::perm::{ElementId, Permutation};

/// Parameters of the lower-bound construction: universe size `n = r (r + c)`,
/// phases of `c + 1` requests each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseConfig {
    r: usize,
    c: usize,
    phases: usize,
}

impl PhaseConfig {
    pub fn new(r: usize, c: usize, phases: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::RequiresRAtLeast2);
        }
        if c == 0 {
            return Err(Error::BadConfig("phase divisor c must be >= 1".into()));
        }
        if phases == 0 {
            return Err(Error::BadConfig("need at least one phase".into()));
        }
        Ok(Self { r, c, phases })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn phases(&self) -> usize {
        self.phases
    }

    /// `n = r^2 + c r`; divisible by `c + r` by construction.
    pub fn n(&self) -> usize {
        self.r * (self.r + self.c)
    }

    /// Length of one tail block, `c + r`.
    pub fn block_len(&self) -> usize {
        self.c + self.r
    }

    pub fn requests_per_phase(&self) -> usize {
        self.c + 1
    }

    /// The per-phase online cost floor, `(c + r) (n - r)`.
    pub fn per_phase_alg_floor(&self) -> u64 {
        (self.block_len() * (self.n() - self.r)) as u64
    }

    /// The per-phase offline cost ceiling, `3 c + 3 r`.
    pub fn per_phase_off_ceiling(&self) -> u64 {
        (3 * self.c + 3 * self.r) as u64
    }
}

/// Emits, for each step, the set of the last `r` elements of the opponent's
/// current list; `c + 1` such requests form a phase.
#[derive(Debug, Clone)]
pub struct AdaptiveAdversary {
    config: PhaseConfig,
    emitted: usize,
}

impl AdaptiveAdversary {
    pub fn new(config: PhaseConfig) -> Self {
        Self { config, emitted: 0 }
    }

    /// Zero-based phase of the *next* request.
    pub fn phase(&self) -> usize {
        self.emitted / self.config.requests_per_phase()
    }

    /// Zero-based position of the next request within its phase.
    pub fn position_in_phase(&self) -> usize {
        self.emitted % self.config.requests_per_phase()
    }

    pub fn next_request(&mut self, current: &Permutation) -> Result<Request> {
        let n = self.config.n();
        if current.n() != n {
            return Err(Error::DomainMismatch);
        }
        let tail: Vec<ElementId> = (n - self.config.r + 1..=n)
            .map(|pos| current.element_at(pos).expect("pos in range"))
            .collect();
        self.emitted += 1;
        Request::new(tail)
    }
}

/// One phase as played by the online algorithm.
#[derive(Debug, Clone)]
pub struct PhaseRecord {
    /// The last `c + r` elements of the online list at phase start, in list order.
    pub tail_at_start: Vec<ElementId>,
    pub requests: Vec<Request>,
    pub reports: Vec<StepReport>,
}

impl PhaseRecord {
    pub fn alg_access(&self) -> u64 {
        self.reports.iter().map(|r| r.access).sum()
    }

    pub fn alg_reorder(&self) -> u64 {
        self.reports.iter().map(|r| r.reorder).sum()
    }

    pub fn alg_cost(&self) -> u64 {
        self.alg_access() + self.alg_reorder()
    }
}

/// The full adversarial run against the fixed-divisor algorithm.
#[derive(Debug, Clone)]
pub struct LowerBoundRun {
    pub config: PhaseConfig,
    pub phases: Vec<PhaseRecord>,
    /// The emitted request sequence as a replayable static instance.
    pub instance: Instance,
    pub final_state: AlgState,
}

impl LowerBoundRun {
    pub fn alg_total(&self) -> u64 {
        self.phases.iter().map(PhaseRecord::alg_cost).sum()
    }
}

/// Plays the adversary against the fixed-divisor algorithm started on the
/// identity list, recording every phase.
pub fn run_lower_bound_phases(config: &PhaseConfig) -> LowerBoundRun {
    let n = config.n();
    let initial = Permutation::identity(n);
    let mut state = AlgState::new(initial.clone(), DivisorMode::FixedConstant(config.c as u64))
        .expect("c >= 1 checked by PhaseConfig");
    let mut adversary = AdaptiveAdversary::new(*config);
    let block = config.block_len();

    let mut phases = Vec::with_capacity(config.phases);
    let mut all_requests = Vec::new();
    for _ in 0..config.phases {
        let tail_at_start = state.perm().order()[n - block..].to_vec();
        let mut requests = Vec::with_capacity(config.requests_per_phase());
        let mut reports = Vec::with_capacity(config.requests_per_phase());
        for _ in 0..config.requests_per_phase() {
            let req = adversary
                .next_request(state.perm())
                .expect("state and adversary share the universe");
            let report = state.serve(&req).expect("adversarial requests are valid");
            requests.push(req);
            reports.push(report);
        }
        all_requests.extend(requests.iter().cloned());
        phases.push(PhaseRecord { tail_at_start, requests, reports });
    }
    let instance = Instance::new(initial, all_requests, config.r)
        .expect("adversarial requests have cardinality r");
    LowerBoundRun { config: *config, phases, instance, final_state: state }
}

/// The offline counterpart of the construction.
#[derive(Debug, Clone)]
pub struct LbOffline {
    /// The distinguished elements kept on the list front, in initial order.
    pub star_set: Vec<ElementId>,
    /// One-time cost of moving the star set to the front, reported separately.
    pub setup_cost: u64,
    /// Per phase: total access over its requests, plus the one fetch.
    pub phase_costs: Vec<StepCost>,
    pub trace: OfflineTrace,
    /// Phase costs plus setup.
    pub total_with_setup: u64,
}

/// Builds the cheap offline play for a recorded adversarial run.
///
/// The universe splits into `r` tail blocks of the initial list, requested
/// cyclically, one per phase. From each block every `(r-1)`-th element (plus
/// the block's last element, so that every run of `r-1` cyclically consecutive
/// block members contains one) joins the star set, which is moved to the list
/// front once. Before each phase, the one starred element among the phase's
/// deepest `r-1` tail members is fetched to the front; it belongs to every
/// request of the phase, so each access costs 1.
///
/// The per-phase fetch is charged on the phase's first trace row.
pub fn lb_offline_strategy(
    config: &PhaseConfig,
    initial: &Permutation,
    phases: &[PhaseRecord],
) -> Result<LbOffline> {
    let n = config.n();
    if initial.n() != n {
        return Err(Error::DomainMismatch);
    }
    let block = config.block_len();
    let r = config.r;

    // Tail blocks of the initial list. blocks[0] is the deepest, requested first.
    let order = initial.order();
    let blocks: Vec<Vec<ElementId>> = (0..r)
        .map(|i| order[n - (i + 1) * block..n - i * block].to_vec())
        .collect();

    // Every (r-1)-th member of each block, plus the last one when r-1 does
    // not divide the block length.
    let mut starred = vec![false; n];
    for members in &blocks {
        let step = r - 1;
        let mut k = step;
        while k <= block {
            starred[members[k - 1]] = true;
            k += step;
        }
        starred[members[block - 1]] = true;
    }
    let star_set: Vec<ElementId> = order.iter().copied().filter(|&e| starred[e]).collect();
    debug_assert!(star_set.len() <= 2 * config.c + 3 * r);

    // One-time setup: stable-partition the starred elements to the front.
    let mut star_front: Vec<ElementId> = star_set.clone();
    star_front.extend(order.iter().copied().filter(|&e| !starred[e]));
    let mut off = Permutation::from_order(&star_front).expect("partition of a bijection");
    let setup_cost = initial.inversion_distance(&off)?;

    let mut block_orders = blocks;
    let mut steps = Vec::new();
    let mut perms = vec![off.clone()];
    let mut phase_costs = Vec::with_capacity(phases.len());
    let mut total = 0u64;

    for (j, phase) in phases.iter().enumerate() {
        let bi = j % r;
        if phase.tail_at_start != block_orders[bi] {
            return Err(Error::ScheduleMismatch(format!(
                "phase {j}: tail {:?} does not match block {bi} in order {:?}",
                phase.tail_at_start, block_orders[bi]
            )));
        }
        if phase.requests.len() != config.requests_per_phase() {
            return Err(Error::ScheduleMismatch(format!(
                "phase {j}: expected {} requests, found {}",
                config.requests_per_phase(),
                phase.requests.len()
            )));
        }
        for (t, req) in phase.requests.iter().enumerate() {
            if req.cardinality() != r
                || !req.elements().iter().all(|e| phase.tail_at_start.contains(e))
            {
                return Err(Error::ScheduleMismatch(format!(
                    "phase {j}, request {t}: not a size-{r} subset of the phase tail"
                )));
            }
        }

        // The starred element among the deepest r-1 tail members.
        let deep_tail = &phase.tail_at_start[block - (r - 1)..];
        let &star = deep_tail
            .iter()
            .rev()
            .find(|&&e| starred[e])
            .ok_or_else(|| {
                Error::ScheduleMismatch(format!("phase {j}: no starred element in {deep_tail:?}"))
            })?;

        let star_pos = off.position(star)?;
        debug_assert!(star_pos <= star_set.len(), "star set stays on the front block");
        let fetch_cost = off.move_to_front_in_place(star)?;

        let mut access_sum = 0u64;
        for (t, req) in phase.requests.iter().enumerate() {
            let access = crate::instance::access_cost(&off, req)?;
            access_sum += access;
            steps.push(OfflineStep {
                access,
                reorder: if t == 0 { fetch_cost } else { 0 },
                moved: if t == 0 { Some(star) } else { None },
            });
            perms.push(off.clone());
        }
        total += access_sum + fetch_cost;
        phase_costs.push(StepCost { access: access_sum, reorder: fetch_cost });

        block_orders[bi].rotate_left(config.c + 1);
    }

    let trace = OfflineTrace { steps, perms, total };
    Ok(LbOffline {
        star_set,
        setup_cost,
        phase_costs,
        trace,
        total_with_setup: total + setup_cost,
    })
}

/// How request elements are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RequestDistribution {
    Uniform,
    /// Element weights proportional to `1 / (id + 1)^s`.
    Zipf(f64),
}

/// Seeded random instance: `m` requests of cardinality uniform in `1..=r`,
/// elements drawn per the distribution, identity initial list. The same seed
/// always yields the same instance.
pub fn random_instance(
    n: usize,
    r: usize,
    m: usize,
    dist: RequestDistribution,
    seed: u64,
) -> Result<Instance> {
    if n == 0 {
        return Err(Error::BadConfig("n must be positive".into()));
    }
    if r == 0 || r > n {
        return Err(Error::BadConfig(format!("need 1 <= r <= n, got r = {r}, n = {n}")));
    }
    if let RequestDistribution::Zipf(s) = dist {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::BadConfig(format!("zipf exponent must be positive, got {s}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weighted = match dist {
        RequestDistribution::Uniform => None,
        RequestDistribution::Zipf(s) => {
            let weights: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).powf(-s)).collect();
            Some(WeightedIndex::new(weights).expect("weights are positive"))
        }
    };

    let mut requests = Vec::with_capacity(m);
    for _ in 0..m {
        let k = rng.random_range(1..=r);
        let ids = match &weighted {
            None => rand::seq::index::sample(&mut rng, n, k).into_vec(),
            Some(w) => {
                let mut picked: Vec<ElementId> = Vec::with_capacity(k);
                while picked.len() < k {
                    let e = w.sample(&mut rng);
                    if !picked.contains(&e) {
                        picked.push(e);
                    }
                }
                picked
            }
        };
        requests.push(Request::new(ids).expect("drawn ids are distinct and non-empty"));
    }
    Instance::new(Permutation::identity(n), requests, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio_int;

    #[test]
    fn config_validation() {
        assert_eq!(PhaseConfig::new(1, 1, 5), Err(Error::RequiresRAtLeast2));
        assert!(matches!(PhaseConfig::new(2, 0, 5), Err(Error::BadConfig(_))));
        assert!(matches!(PhaseConfig::new(2, 1, 0), Err(Error::BadConfig(_))));
        let config = PhaseConfig::new(2, 1, 5).unwrap();
        assert_eq!(config.n(), 6);
        assert_eq!(config.n() % config.block_len(), 0);
    }

    #[test]
    fn next_request_takes_the_last_r_elements() {
        let config = PhaseConfig::new(2, 1, 1).unwrap();
        let mut adversary = AdaptiveAdversary::new(config);
        let req = adversary.next_request(&Permutation::identity(6)).unwrap();
        assert_eq!(req.elements(), &[4, 5]);
        assert_eq!(adversary.position_in_phase(), 1);
        assert_eq!(
            adversary.next_request(&Permutation::identity(5)),
            Err(Error::DomainMismatch)
        );
    }

    #[test]
    fn phase_mechanics_match_the_construction() {
        for (r, cs) in [(2usize, vec![1usize, 2]), (3, vec![1, 2, 3]), (4, vec![1, 2, 4])] {
            for c in cs {
                let config = PhaseConfig::new(r, c, 2 * r + 1).unwrap();
                let n = config.n();
                let block = config.block_len();
                let run = run_lower_bound_phases(&config);

                // Re-drive a fresh state so every between-phase snapshot is
                // observable.
                let mut state = AlgState::new(
                    Permutation::identity(n),
                    DivisorMode::FixedConstant(c as u64),
                )
                .unwrap();
                for (j, phase) in run.phases.iter().enumerate() {
                    let perm_before = state.perm().clone();
                    assert_eq!(&perm_before.order()[n - block..], &phase.tail_at_start[..]);
                    for (req, recorded) in phase.requests.iter().zip(&phase.reports) {
                        let report = state.serve(req).unwrap();
                        assert_eq!(&report, recorded);
                        // Every access fetch leaves from position n - r + 1.
                        assert_eq!(report.ell, n - r + 1, "r={r} c={c} phase {j}");
                    }
                    for report in &phase.reports[..c] {
                        assert_eq!(report.cascade_len(), 0);
                    }
                    // The final request cascades all r - 1 deep elements.
                    let last = phase.reports.last().unwrap();
                    assert_eq!(last.cascade_len(), r - 1, "r={r} c={c} phase {j}");

                    // (a) all budgets are zero again,
                    for z in 0..n {
                        assert_eq!(state.budget(z).unwrap(), ratio_int(0));
                    }
                    // (b) the front block is the tail shifted cyclically,
                    let mut expected = phase.tail_at_start.clone();
                    expected.rotate_left(c + 1);
                    assert_eq!(&state.perm().order()[..block], &expected[..]);
                    // (c) everything else moved back by exactly c + r.
                    for z in 0..n {
                        if !phase.tail_at_start.contains(&z) {
                            assert_eq!(
                                state.perm().position(z).unwrap(),
                                perm_before.position(z).unwrap() + block
                            );
                        }
                    }
                    // Phase cost floor.
                    assert!(phase.alg_cost() >= config.per_phase_alg_floor());
                    assert!(phase.alg_reorder() >= config.per_phase_alg_floor());
                }
                assert_eq!(run.final_state.perm(), state.perm());
            }
        }
    }

    #[test]
    fn tail_budgets_cross_the_threshold_exactly_on_the_last_request() {
        let config = PhaseConfig::new(3, 2, 2).unwrap();
        let n = config.n();
        let run = run_lower_bound_phases(&config);
        for phase in &run.phases {
            let deep: Vec<ElementId> =
                phase.tail_at_start[config.block_len() - (config.r() - 1)..].to_vec();
            // Sum of increments over the first c requests: c * (n - r + 1) / c.
            let mut budget = vec![ratio_int(0); n];
            for report in &phase.reports[..config.c()] {
                for &(y, delta) in &report.budget_increments {
                    budget[y] += delta;
                }
            }
            for &b in &deep {
                assert!(budget[b] <= ratio_int((n - config.r() + 1) as i64));
            }
            let last = phase.reports.last().unwrap();
            for &(y, delta) in &last.budget_increments {
                budget[y] += delta;
                assert!(budget[y] >= ratio_int(n as i64), "phase tail budget must reach n");
            }
        }
    }

    #[test]
    fn offline_strategy_stays_cheap() {
        for (r, c) in [(2usize, 1usize), (2, 2), (3, 1), (3, 3), (4, 2), (4, 1)] {
            let config = PhaseConfig::new(r, c, 3 * r).unwrap();
            let run = run_lower_bound_phases(&config);
            let off =
                lb_offline_strategy(&config, run.instance.initial(), &run.phases).unwrap();
            assert!(
                off.star_set.len() <= 2 * c + 3 * r,
                "star set {} too large for r={r} c={c}",
                off.star_set.len()
            );
            for (j, cost) in off.phase_costs.iter().enumerate() {
                assert!(
                    cost.total() <= config.per_phase_off_ceiling(),
                    "phase {j} cost {} exceeds {} for r={r} c={c}",
                    cost.total(),
                    config.per_phase_off_ceiling()
                );
                // One access per request, all served at the front.
                assert_eq!(cost.access, config.requests_per_phase() as u64);
            }
            assert_eq!(
                off.total_with_setup,
                off.setup_cost + off.phase_costs.iter().map(StepCost::total).sum::<u64>()
            );
            // The measured ratio clears r^2 / 3 once phases accumulate.
            let ratio_ok =
                3 * run.alg_total() >= (r * r) as u64 * off.total_with_setup;
            assert!(ratio_ok, "ratio below r^2/3 for r={r} c={c}");
        }
    }

    #[test]
    fn offline_strategy_rejects_inconsistent_schedules() {
        let config = PhaseConfig::new(2, 1, 2).unwrap();
        let run = run_lower_bound_phases(&config);
        let mut phases = run.phases.clone();
        phases[1].tail_at_start.swap(0, 1);
        assert!(matches!(
            lb_offline_strategy(&config, run.instance.initial(), &phases),
            Err(Error::ScheduleMismatch(_))
        ));
    }

    #[test]
    fn random_instances_are_deterministic() {
        let a = random_instance(20, 4, 50, RequestDistribution::Uniform, 99).unwrap();
        let b = random_instance(20, 4, 50, RequestDistribution::Uniform, 99).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
        let c = random_instance(20, 4, 50, RequestDistribution::Uniform, 100).unwrap();
        assert_ne!(a.to_json_string(), c.to_json_string());
    }

    #[test]
    fn radius_one_gives_singletons() {
        let inst = random_instance(10, 1, 30, RequestDistribution::Uniform, 5).unwrap();
        assert!(inst.requests().iter().all(|r| r.cardinality() == 1));
    }

    #[test]
    fn zipf_is_front_weighted() {
        let n = 50;
        let m = 10_000;
        let inst = random_instance(n, 3, m, RequestDistribution::Zipf(1.1), 7).unwrap();
        let mut hits = vec![0usize; n];
        for req in inst.requests() {
            for &e in req.elements() {
                hits[e] += 1;
            }
        }
        let top = hits.iter().copied().max().unwrap();
        assert_eq!(top, hits[0], "element 0 carries the largest weight");
        assert!(top * n > m, "most frequent element must beat the uniform share");
    }

    #[test]
    fn generator_validates_parameters() {
        assert!(matches!(
            random_instance(5, 6, 1, RequestDistribution::Uniform, 0),
            Err(Error::BadConfig(_))
        ));
        assert!(matches!(
            random_instance(5, 2, 1, RequestDistribution::Zipf(0.0), 0),
            Err(Error::BadConfig(_))
        ));
    }
}
