//! The online algorithm: lazy move-to-front driven by exact budgets.
//!
//! Each element carries a budget. Serving a request fetches its cheapest
//! element to the list front, then pays the remaining requested elements a
//! budget increment of `len / divisor`; any element whose budget reaches its
//! current position is fetched too (deepest first), which resets its budget.

use crate::error::{Error, Result};
use crate::instance::Request;
use crate::perm::{ElementId, Permutation};
use crate::rational::{ratio, ratio_int, Ratio};

/// Exact per-element budget. Always non-negative and, once a step completes,
/// strictly below the element's current position.
pub type Budget = Ratio;

/// How the budget increment divisor is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorMode {
    /// Divide by the cardinality of the request being served.
    PerRequestCardinality,
    /// Divide by a fixed positive integer, independent of the request.
    FixedConstant(u64),
}

/// The algorithm's permutation plus per-element budgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgState {
    perm: Permutation,
    budgets: Vec<Budget>,
    mode: DivisorMode,
}

/// What one served request did: costs, the fetch sequence, and the exact
/// budget increments. Together with the pre-step state this determines every
/// intermediate state of the step (see [`replay_step`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    /// Position of the cheapest requested element before any reordering.
    pub access: u64,
    /// Total swaps paid this step; equals the sum of `position - 1` over `fetched`.
    pub reorder: u64,
    /// Same value as `access`, kept as a position.
    pub ell: usize,
    /// Every fetch in order, with the element's position at fetch time.
    /// The first entry is always the accessed element.
    pub fetched: Vec<(ElementId, usize)>,
    /// Budget increments applied between the access fetch and the cascade.
    pub budget_increments: Vec<(ElementId, Budget)>,
}

impl StepReport {
    pub fn cost(&self) -> u64 {
        self.access + self.reorder
    }

    /// Iterations of the cascade loop (everything fetched after the access).
    pub fn cascade_len(&self) -> usize {
        self.fetched.len().saturating_sub(1)
    }
}

impl AlgState {
    pub fn new(initial: Permutation, mode: DivisorMode) -> Result<Self> {
        if let DivisorMode::FixedConstant(c) = mode {
            if c == 0 {
                return Err(Error::BadConfig("budget divisor c must be >= 1".into()));
            }
        }
        let n = initial.n();
        Ok(Self {
            perm: initial,
            budgets: vec![ratio_int(0); n],
            mode,
        })
    }

    /// State with the standard divisor (the request cardinality).
    pub fn dlm(initial: Permutation) -> Self {
        Self::new(initial, DivisorMode::PerRequestCardinality)
            .expect("per-request mode has no parameters")
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn n(&self) -> usize {
        self.perm.n()
    }

    pub fn mode(&self) -> DivisorMode {
        self.mode
    }

    pub fn budget(&self, z: ElementId) -> Result<Budget> {
        self.budgets
            .get(z)
            .copied()
            .ok_or(Error::UnknownElement(z))
    }

    pub fn budgets(&self) -> &[Budget] {
        &self.budgets
    }

    /// Moves `z` to the list front and resets its budget to zero. Budgets of
    /// the shifted elements are untouched. Returns the swap cost.
    pub fn fetch(&mut self, z: ElementId) -> Result<u64> {
        let cost = self.perm.move_to_front_in_place(z)?;
        self.budgets[z] = ratio_int(0);
        Ok(cost)
    }

    /// All elements whose budget reaches their current position, ordered by
    /// decreasing position. Fetching them in this order lands them on the
    /// list front in their prior relative order.
    pub fn qualifying_elements(&self) -> Vec<ElementId> {
        (1..=self.n())
            .rev()
            .map(|pos| self.perm.element_at(pos).expect("pos in range"))
            .filter(|&z| self.budgets[z] >= ratio_int(self.perm.position(z).expect("known") as i64))
            .collect()
    }

    fn deepest_qualifying(&self) -> Option<ElementId> {
        for pos in (1..=self.n()).rev() {
            let z = self.perm.element_at(pos).expect("pos in range");
            if self.budgets[z] >= ratio_int(pos as i64) {
                return Some(z);
            }
        }
        None
    }

    /// Serves one request: fetch the cheapest element, grow the budgets of the
    /// rest, then fetch every element whose budget caught up with its position,
    /// rescanning after each fetch.
    pub fn serve(&mut self, req: &Request) -> Result<StepReport> {
        let n = self.n();
        for &z in req.elements() {
            if z >= n {
                return Err(Error::UnknownElement(z));
            }
        }
        let x = *req
            .elements()
            .iter()
            .min_by_key(|&&z| self.perm.position(z).expect("validated"))
            .expect("request non-empty");
        let ell = self.perm.position(x)?;

        let mut fetched = Vec::with_capacity(1);
        let mut reorder = self.fetch(x)?;
        fetched.push((x, ell));
        debug_assert!(self.mid_step_budgets_ok());

        let divisor = match self.mode {
            DivisorMode::PerRequestCardinality => req.cardinality() as i64,
            DivisorMode::FixedConstant(c) => c as i64,
        };
        let delta = ratio(ell as i64, divisor);
        let mut budget_increments = Vec::new();
        for &y in req.elements() {
            if y != x {
                self.budgets[y] += delta;
                budget_increments.push((y, delta));
                debug_assert!(self.mid_step_budgets_ok());
            }
        }

        let mut iterations = 0usize;
        while let Some(z) = self.deepest_qualifying() {
            iterations += 1;
            debug_assert!(iterations <= n, "cascade must shrink the qualifying set");
            let pos = self.perm.position(z)?;
            reorder += self.fetch(z)?;
            fetched.push((z, pos));
            debug_assert!(self.mid_step_budgets_ok());
        }
        debug_assert!(self.post_step_budgets_ok());

        Ok(StepReport {
            access: ell as u64,
            reorder,
            ell,
            fetched,
            budget_increments,
        })
    }

    /// Budgets stay strictly below `(3/2) π(z)` at every point inside a step.
    ///
    /// The 3/2 holds for the per-request divisor, where one increment adds at
    /// most `π(y)/2`. With a fixed divisor `c` an increment can add up to
    /// `π(y)/c`, so the factor weakens to `(c+1)/c`.
    pub fn mid_step_budgets_ok(&self) -> bool {
        let (num, den) = match self.mode {
            DivisorMode::PerRequestCardinality => (3, 2),
            DivisorMode::FixedConstant(c) => (c as i64 + 1, c as i64),
        };
        self.budgets.iter().enumerate().all(|(z, b)| {
            *b >= ratio_int(0)
                && *b * ratio_int(den)
                    < ratio_int(num * self.perm.position(z).expect("known") as i64)
        })
    }

    /// `b(z) < π(z)` for all z; holds whenever no step is in progress.
    pub fn post_step_budgets_ok(&self) -> bool {
        self.budgets
            .iter()
            .enumerate()
            .all(|(z, b)| *b < ratio_int(self.perm.position(z).expect("known") as i64))
    }

    pub(crate) fn bump_budget(&mut self, z: ElementId, delta: Budget) {
        self.budgets[z] += delta;
    }
}

/// One sub-action of a served step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayAction {
    Fetch { element: ElementId, cost: u64 },
    Increment { element: ElementId, delta: Budget },
}

/// A sub-action together with the state right after it.
#[derive(Debug, Clone)]
pub struct ReplayEvent {
    pub action: ReplayAction,
    pub state_after: AlgState,
}

/// Reconstructs every intermediate state of a step from its report.
///
/// Fails with `TraceMismatch` if the report does not fit `start` (wrong fetch
/// positions, wrong cascade). The last event's state is the post-step state.
pub fn replay_step(start: &AlgState, report: &StepReport) -> Result<Vec<ReplayEvent>> {
    let mut state = start.clone();
    let mut events = Vec::with_capacity(report.fetched.len() + report.budget_increments.len());
    let mut fetches = report.fetched.iter();

    let &(x, ell) = fetches
        .next()
        .ok_or_else(|| Error::TraceMismatch("report has no access fetch".into()))?;
    if state.perm.position(x)? != ell {
        return Err(Error::TraceMismatch(format!(
            "element {x} recorded at position {ell}, found {}",
            state.perm.position(x)?
        )));
    }
    let cost = state.fetch(x)?;
    events.push(ReplayEvent {
        action: ReplayAction::Fetch { element: x, cost },
        state_after: state.clone(),
    });

    for &(y, delta) in &report.budget_increments {
        if y >= state.n() {
            return Err(Error::UnknownElement(y));
        }
        state.bump_budget(y, delta);
        events.push(ReplayEvent {
            action: ReplayAction::Increment { element: y, delta },
            state_after: state.clone(),
        });
    }

    for &(z, pos) in fetches {
        if state.perm.position(z)? != pos {
            return Err(Error::TraceMismatch(format!(
                "cascade fetch of {z} recorded at position {pos}, found {}",
                state.perm.position(z)?
            )));
        }
        if state.budget(z)? < ratio_int(pos as i64) {
            return Err(Error::TraceMismatch(format!(
                "cascade fetch of {z} at position {pos} but budget below position"
            )));
        }
        let cost = state.fetch(z)?;
        events.push(ReplayEvent {
            action: ReplayAction::Fetch { element: z, cost },
            state_after: state.clone(),
        });
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::rational::ratio_to_string;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn req(ids: &[ElementId]) -> Request {
        Request::new(ids.to_vec()).unwrap()
    }

    /// Transliteration of the serve loop against a plain `Vec` list
    /// representation; the oracle for `AlgState::serve`.
    struct ReferenceDlm {
        list: Vec<ElementId>,
        budgets: Vec<Ratio>,
        divisor: Option<u64>,
    }

    impl ReferenceDlm {
        fn new(n: usize, divisor: Option<u64>) -> Self {
            Self {
                list: (0..n).collect(),
                budgets: vec![ratio_int(0); n],
                divisor,
            }
        }

        fn pos(&self, z: ElementId) -> usize {
            self.list.iter().position(|&e| e == z).unwrap() + 1
        }

        fn fetch(&mut self, z: ElementId) -> u64 {
            let mut i = self.pos(z);
            let mut swaps = 0;
            while i >= 2 {
                self.list.swap(i - 1, i - 2);
                i -= 1;
                swaps += 1;
            }
            self.budgets[z] = ratio_int(0);
            swaps
        }

        fn serve(&mut self, r: &Request) -> (u64, u64) {
            let x = *r.elements().iter().min_by_key(|&&z| self.pos(z)).unwrap();
            let ell = self.pos(x);
            let mut reorder = self.fetch(x);
            let div = self.divisor.unwrap_or(r.cardinality() as u64);
            for &y in r.elements() {
                if y != x {
                    self.budgets[y] += ratio(ell as i64, div as i64);
                }
            }
            loop {
                let qualifying: Vec<ElementId> = self
                    .list
                    .iter()
                    .rev()
                    .copied()
                    .filter(|&z| self.budgets[z] >= ratio_int(self.pos(z) as i64))
                    .collect();
                match qualifying.first() {
                    Some(&z) => reorder += self.fetch(z),
                    None => break,
                }
            }
            (ell as u64, reorder)
        }
    }

    #[test]
    fn serve_two_element_request() {
        // (a,b,c), all budgets 0, R={b,c}: access 2, fetch b, b(c) = 1.
        let mut state = AlgState::dlm(Permutation::identity(3));
        let report = state.serve(&req(&[1, 2])).unwrap();
        assert_eq!(report.access, 2);
        assert_eq!(report.reorder, 1);
        assert_eq!(report.ell, 2);
        assert_eq!(report.fetched, vec![(1, 2)]);
        assert_eq!(report.budget_increments, vec![(2, ratio_int(1))]);
        assert_eq!(state.perm().order(), &[1, 0, 2]);
        assert_eq!(state.budget(2).unwrap(), ratio_int(1));
    }

    #[test]
    fn serve_front_singleton_is_free() {
        let mut state = AlgState::dlm(Permutation::identity(3));
        let report = state.serve(&req(&[0])).unwrap();
        assert_eq!((report.access, report.reorder), (1, 0));
        assert!(report.budget_increments.is_empty());
        assert_eq!(state.budgets(), &[ratio_int(0); 3]);
    }

    #[test]
    fn fetch_resets_budget_and_keeps_others() {
        let mut state = AlgState::dlm(Permutation::identity(3));
        // Give b and c budgets by serving {b, c} twice.
        state.serve(&req(&[1, 2])).unwrap();
        let b_a = state.budget(0).unwrap();
        let b_b = state.budget(1).unwrap();
        let before = state.budget(2).unwrap();
        assert!(before > ratio_int(0));
        let cost = state.fetch(2).unwrap();
        assert_eq!(cost, 2);
        assert_eq!(state.budget(2).unwrap(), ratio_int(0));
        assert_eq!(state.budget(0).unwrap(), b_a);
        assert_eq!(state.budget(1).unwrap(), b_b);
        assert_eq!(state.perm().order(), &[2, 1, 0]);
    }

    #[test]
    fn fetch_at_front_is_noop() {
        let mut state = AlgState::dlm(Permutation::identity(3));
        assert_eq!(state.fetch(0).unwrap(), 0);
        assert_eq!(state.perm().order(), &[0, 1, 2]);
    }

    #[test]
    fn qualifying_order_is_decreasing_position() {
        let mut state = AlgState::dlm(Permutation::identity(8));
        assert!(state.qualifying_elements().is_empty());
        state.budgets[3] = ratio_int(4); // position 4
        state.budgets[6] = ratio_int(7); // position 7
        assert_eq!(state.qualifying_elements(), vec![6, 3]);
    }

    #[test]
    fn fetching_in_returned_order_preserves_relative_order() {
        // Elements at positions 2 and 4 qualify; after the cascade they occupy
        // the first two positions in their prior relative order.
        let mut state = AlgState::dlm(Permutation::identity(5));
        state.budgets[1] = ratio_int(2);
        state.budgets[3] = ratio_int(4);
        for z in state.qualifying_elements() {
            state.fetch(z).unwrap();
        }
        assert_eq!(&state.perm().order()[..2], &[1, 3]);

        // Fetching in increasing-position order instead reverses them.
        let mut flipped = AlgState::dlm(Permutation::identity(5));
        flipped.budgets[1] = ratio_int(2);
        flipped.budgets[3] = ratio_int(4);
        let mut rising = flipped.qualifying_elements();
        rising.reverse();
        for z in rising {
            flipped.fetch(z).unwrap();
        }
        assert_eq!(&flipped.perm().order()[..2], &[3, 1]);
    }

    #[test]
    fn cascade_fetch_appears_in_report() {
        // Drive budgets up with repeated deep requests until a cascade fires,
        // and check the first cascading step against the reference interpreter.
        let n = 6;
        let mut state = AlgState::dlm(Permutation::identity(n));
        let mut reference = ReferenceDlm::new(n, None);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut saw_cascade = false;
        for _ in 0..300 {
            let k = rng.random_range(1..=3usize);
            let mut ids = rand::seq::index::sample(&mut rng, n, k).into_vec();
            ids.sort_unstable();
            let request = req(&ids);
            let report = state.serve(&request).unwrap();
            let (acc, reorder) = reference.serve(&request);
            assert_eq!(report.access, acc);
            assert_eq!(report.reorder, reorder);
            assert_eq!(state.perm().order(), &reference.list[..]);
            assert_eq!(state.budgets(), &reference.budgets[..]);
            if report.cascade_len() > 0 {
                saw_cascade = true;
                for (z, pos) in &report.fetched[1..] {
                    assert_eq!(state.budget(*z).unwrap(), ratio_int(0));
                    assert!(*pos >= 1);
                }
            }
        }
        assert!(saw_cascade, "campaign never triggered the cascade");
    }

    #[test]
    fn fixed_divisor_uses_c_not_cardinality() {
        let mut state =
            AlgState::new(Permutation::identity(4), DivisorMode::FixedConstant(1)).unwrap();
        // R = {c, d}: access 3, budget of d grows by 3/1 = 3, below position 4;
        // second serve pushes it to 6 >= 4 and cascades.
        let report = state.serve(&req(&[2, 3])).unwrap();
        assert_eq!(report.budget_increments, vec![(3, ratio_int(3))]);
        assert_eq!(report.cascade_len(), 0);
        let report = state.serve(&req(&[2, 3])).unwrap();
        assert_eq!(report.cascade_len(), 1);
        assert_eq!(report.fetched[1].0, 3);
        assert_eq!(state.budget(3).unwrap(), ratio_int(0));
    }

    #[test]
    fn zero_divisor_rejected() {
        assert!(AlgState::new(Permutation::identity(2), DivisorMode::FixedConstant(0)).is_err());
    }

    #[test]
    fn replay_reconstructs_the_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(2..=8usize);
            let mut state = AlgState::dlm(Permutation::identity(n));
            for _ in 0..40 {
                let k = rng.random_range(1..=n.min(3));
                let ids = rand::seq::index::sample(&mut rng, n, k).into_vec();
                let request = req(&ids);
                let before = state.clone();
                let report = state.serve(&request).unwrap();
                let events = replay_step(&before, &report).unwrap();
                let last = events.last().unwrap();
                assert_eq!(&last.state_after, &state);
                for event in &events {
                    assert!(event.state_after.mid_step_budgets_ok());
                }
            }
        }
    }

    #[test]
    fn report_reorder_matches_inversion_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let n = rng.random_range(2..=8usize);
            let mut order: Vec<ElementId> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut state = AlgState::dlm(Permutation::from_order(&order).unwrap());
            let k = rng.random_range(1..=n.min(4));
            let ids = rand::seq::index::sample(&mut rng, n, k).into_vec();
            let before = state.perm().clone();
            let report = state.serve(&req(&ids)).unwrap();
            assert_eq!(
                report.reorder,
                before.inversion_distance(state.perm()).unwrap()
            );
            let swaps: u64 = report.fetched.iter().map(|&(_, pos)| (pos - 1) as u64).sum();
            assert_eq!(report.reorder, swaps);
        }
    }

    #[test]
    fn budget_denominators_divide_cardinality_lcm() {
        use num_integer::Integer;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 20;
        let mut state = AlgState::dlm(Permutation::identity(n));
        let mut lcm: i64 = 1;
        for _ in 0..500 {
            let k = rng.random_range(1..=6usize);
            let ids = rand::seq::index::sample(&mut rng, n, k).into_vec();
            let request = req(&ids);
            lcm = lcm.lcm(&(request.cardinality() as i64));
            state.serve(&request).unwrap();
            for b in state.budgets() {
                assert_eq!(lcm % b.denom(), 0, "budget {} vs lcm {}", ratio_to_string(b), lcm);
            }
        }
    }

    #[test]
    fn serve_propagates_unknown_elements() {
        let mut state = AlgState::dlm(Permutation::identity(3));
        assert_eq!(state.serve(&req(&[0, 7])), Err(Error::UnknownElement(7)));
    }

    #[test]
    fn long_random_runs_keep_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let n = rng.random_range(2..=30usize);
            let r = rng.random_range(1..=n.min(8));
            let mut state = AlgState::dlm(Permutation::identity(n));
            for _ in 0..100 {
                let k = rng.random_range(1..=r);
                let ids = rand::seq::index::sample(&mut rng, n, k).into_vec();
                let report = state.serve(&req(&ids)).unwrap();
                assert!(report.cascade_len() <= n);
                assert!(state.post_step_budgets_ok());
            }
        }
    }

    #[test]
    fn instance_requests_feed_serve() {
        let json = r#"{"n": 3, "r": 2, "initial": [0, 1, 2], "requests": [[1, 2], [0]]}"#;
        let inst = Instance::from_json_str(json).unwrap();
        let mut state = AlgState::dlm(inst.initial().clone());
        let mut total = 0;
        for request in inst.requests() {
            total += state.serve(request).unwrap().cost();
        }
        // Step 1: access 2 + fetch 1. Step 2: element 0 slid to position 2,
        // so access 2 + fetch 1.
        assert_eq!(total, 6);
        assert_eq!(state.perm().order(), &[0, 1, 2]);
    }
}
