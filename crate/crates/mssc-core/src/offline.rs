//! Offline baselines: the exact dynamic optimum, the best fixed permutation,
//! move-to-front based replays, and the 4-approximate offline play derived
//! from an optimal trace.

use crate::error::{Error, Result};
use crate::instance::{access_cost, Instance, Request, StepCost};
use crate::perm::{ElementId, Permutation};

/// Hard ceiling for the factorial-state optimum.
pub const OPT_ORACLE_MAX_N: usize = 7;
/// Hard ceiling for the exhaustive fixed-permutation search.
pub const FIXED_ORACLE_MAX_N: usize = 8;

/// The exact optimum: total cost, the permutation sequence realizing it, and
/// the per-step access/reorder split.
#[derive(Debug, Clone)]
pub struct OptResult {
    pub total: u64,
    /// `perms[0]` is the initial permutation; `perms[t]` the one chosen in step t.
    pub perms: Vec<Permutation>,
    pub steps: Vec<StepCost>,
}

/// One step of an offline play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OfflineStep {
    pub access: u64,
    pub reorder: u64,
    /// For MTF-based plays: the element moved to the front this step.
    pub moved: Option<ElementId>,
}

/// A full offline play with its permutation history.
#[derive(Debug, Clone)]
pub struct OfflineTrace {
    pub steps: Vec<OfflineStep>,
    /// `perms[0]` is the initial permutation; `perms[t]` the list after step t.
    pub perms: Vec<Permutation>,
    pub total: u64,
}

impl OfflineTrace {
    pub fn access_total(&self) -> u64 {
        self.steps.iter().map(|s| s.access).sum()
    }

    pub fn reorder_total(&self) -> u64 {
        self.steps.iter().map(|s| s.reorder).sum()
    }
}

/// All list orders of `0..n`, lexicographically.
fn all_orders(n: usize) -> Vec<Vec<ElementId>> {
    let mut orders = Vec::new();
    let mut current: Vec<ElementId> = (0..n).collect();
    let mut used = vec![false; n];
    fn rec(
        n: usize,
        depth: usize,
        current: &mut Vec<ElementId>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<ElementId>>,
    ) {
        if depth == n {
            out.push(current.clone());
            return;
        }
        for e in 0..n {
            if !used[e] {
                used[e] = true;
                current[depth] = e;
                rec(n, depth + 1, current, used, out);
                used[e] = false;
            }
        }
    }
    rec(n, 0, &mut current, &mut used, &mut orders);
    orders
}

/// Pairwise inversion distances between all orders, flattened row-major.
fn distance_matrix(orders: &[Vec<ElementId>], n: usize) -> Vec<u16> {
    let k = orders.len();
    let positions: Vec<Vec<u8>> = orders
        .iter()
        .map(|order| {
            let mut pos = vec![0u8; n];
            for (idx, &e) in order.iter().enumerate() {
                pos[e] = idx as u8 + 1;
            }
            pos
        })
        .collect();
    let mut dist = vec![0u16; k * k];
    for a in 0..k {
        for b in a + 1..k {
            let mut d = 0u16;
            for x in 0..n {
                for y in x + 1..n {
                    if (positions[a][x] < positions[a][y]) != (positions[b][x] < positions[b][y]) {
                        d += 1;
                    }
                }
            }
            dist[a * k + b] = d;
            dist[b * k + a] = d;
        }
    }
    dist
}

/// Exact dynamic optimum by value iteration over all `n!` permutations.
///
/// Per step, the access is charged against the previous permutation and the
/// reordering toward the newly chosen one, so the value table satisfies
/// `h[t-1][p] = access(p, R_t) + min_q (dist[p][q] + h[t][q])`. Ties between
/// optimal permutation sequences are broken toward the lexicographically
/// smallest sequence of list orders.
pub fn opt_dynamic_bruteforce(inst: &Instance) -> Result<OptResult> {
    let n = inst.n();
    if n > OPT_ORACLE_MAX_N {
        return Err(Error::OracleTooLarge { n, limit: OPT_ORACLE_MAX_N });
    }
    let m = inst.m();
    let orders = all_orders(n);
    let k = orders.len();
    let positions: Vec<Vec<u8>> = orders
        .iter()
        .map(|order| {
            let mut pos = vec![0u8; n];
            for (idx, &e) in order.iter().enumerate() {
                pos[e] = idx as u8 + 1;
            }
            pos
        })
        .collect();
    let dist = distance_matrix(&orders, n);

    let access_of = |state: usize, req: &Request| -> u64 {
        req.elements()
            .iter()
            .map(|&z| positions[state][z] as u64)
            .min()
            .expect("requests are non-empty")
    };

    // h[t][p]: cheapest completion of steps t+1..m starting from permutation p.
    let mut h = vec![vec![0u64; k]; m + 1];
    for t in (1..=m).rev() {
        let req = &inst.requests()[t - 1];
        let (head, tail) = h.split_at_mut(t);
        let (prev, next) = (&mut head[t - 1], &tail[0]);
        for (p, slot) in prev.iter_mut().enumerate() {
            let follow = (0..k)
                .map(|q| dist[p * k + q] as u64 + next[q])
                .min()
                .expect("k >= 1");
            *slot = access_of(p, req) + follow;
        }
    }

    let start = orders
        .iter()
        .position(|o| o.as_slice() == inst.initial().order())
        .expect("initial permutation is one of the enumerated orders");
    let total = h[0][start];

    let mut perms = Vec::with_capacity(m + 1);
    perms.push(inst.initial().clone());
    let mut steps = Vec::with_capacity(m);
    let mut cur = start;
    for (req, level) in inst.requests().iter().zip(&h[1..]) {
        let access = access_of(cur, req);
        let mut best_q = 0usize;
        let mut best = u64::MAX;
        for (q, &completion) in level.iter().enumerate() {
            let cost = dist[cur * k + q] as u64 + completion;
            if cost < best {
                best = cost;
                best_q = q;
            }
        }
        steps.push(StepCost { access, reorder: dist[cur * k + best_q] as u64 });
        perms.push(Permutation::from_order(&orders[best_q]).expect("orders are bijections"));
        cur = best_q;
    }
    debug_assert_eq!(
        total,
        steps.iter().map(StepCost::total).sum::<u64>(),
        "reconstructed trace must reproduce the optimum"
    );
    Ok(OptResult { total, perms, steps })
}

/// The fixed permutation minimizing total access cost (no reordering by
/// definition). Ties go to the lexicographically smallest list order.
pub fn best_fixed_permutation(inst: &Instance) -> Result<(Permutation, u64)> {
    let n = inst.n();
    if n > FIXED_ORACLE_MAX_N {
        return Err(Error::OracleTooLarge { n, limit: FIXED_ORACLE_MAX_N });
    }
    let mut best_order: Option<&[ElementId]> = None;
    let mut best_cost = u64::MAX;
    let orders = all_orders(n);
    for order in &orders {
        let mut pos = vec![0u64; n];
        for (idx, &e) in order.iter().enumerate() {
            pos[e] = idx as u64 + 1;
        }
        let mut cost = 0u64;
        for req in inst.requests() {
            cost += req
                .elements()
                .iter()
                .map(|&z| pos[z])
                .min()
                .expect("requests are non-empty");
            if cost >= best_cost {
                break;
            }
        }
        if cost < best_cost {
            best_cost = cost;
            best_order = Some(order);
        }
    }
    let order = best_order.expect("at least one permutation exists");
    Ok((Permutation::from_order(order).expect("orders are bijections"), best_cost))
}

/// Replays an MTF-based play: per step the chosen element (which must belong
/// to the request) is brought to the front and nothing else moves. Access is
/// charged before the move.
pub fn mtfb_replay(inst: &Instance, choices: &[ElementId]) -> Result<OfflineTrace> {
    if choices.len() != inst.m() {
        return Err(Error::TraceMismatch(format!(
            "{} choices for {} requests",
            choices.len(),
            inst.m()
        )));
    }
    let mut perm = inst.initial().clone();
    let mut perms = vec![perm.clone()];
    let mut steps = Vec::with_capacity(inst.m());
    let mut total = 0u64;
    for (t, (req, &choice)) in inst.requests().iter().zip(choices).enumerate() {
        if !req.contains(choice) {
            return Err(Error::IllegalChoice { step: t, element: choice });
        }
        let access = access_cost(&perm, req)?;
        let reorder = perm.move_to_front_in_place(choice)?;
        total += access + reorder;
        steps.push(OfflineStep { access, reorder, moved: Some(choice) });
        perms.push(perm.clone());
    }
    Ok(OfflineTrace { steps, perms, total })
}

/// The singleton instance induced by an optimal trace: request `t` shrinks to
/// the element of `R_t` nearest to the front of the optimum's list *before*
/// its step-`t` reordering.
pub fn singleton_reduction(inst: &Instance, opt: &OptResult) -> Result<Instance> {
    check_opt_matches(inst, opt)?;
    let mut requests = Vec::with_capacity(inst.m());
    for (t, req) in inst.requests().iter().enumerate() {
        let serving_perm = &opt.perms[t];
        let nearest = *req
            .elements()
            .iter()
            .min_by_key(|&&z| serving_perm.position(z).expect("instance validated"))
            .expect("requests are non-empty");
        requests.push(Request::new(vec![nearest]).expect("singletons are valid"));
    }
    Instance::new(inst.initial().clone(), requests, inst.r())
}

/// Builds the MTF-based play that 4-approximates the optimum: reduce to the
/// singleton instance, run plain move-to-front on it, and replay those moves
/// on the original instance. The result serves every request at most as
/// expensively as move-to-front serves the singletons.
pub fn derive_mtfb_from_opt(inst: &Instance, opt: &OptResult) -> Result<OfflineTrace> {
    let singletons = singleton_reduction(inst, opt)?;
    // Move-to-front on the singleton instance fixes the move sequence.
    let mut perm = inst.initial().clone();
    let mut perms = vec![perm.clone()];
    let mut steps = Vec::with_capacity(inst.m());
    let mut total = 0u64;
    for (req, reduced) in inst.requests().iter().zip(singletons.requests()) {
        let choice = reduced.elements()[0];
        let access = access_cost(&perm, req)?;
        let reorder = perm.move_to_front_in_place(choice)?;
        total += access + reorder;
        steps.push(OfflineStep { access, reorder, moved: Some(choice) });
        perms.push(perm.clone());
    }
    Ok(OfflineTrace { steps, perms, total })
}

fn check_opt_matches(inst: &Instance, opt: &OptResult) -> Result<()> {
    if opt.perms.len() != inst.m() + 1 {
        return Err(Error::TraceMismatch(format!(
            "optimum trace has {} permutations for {} requests",
            opt.perms.len(),
            inst.m()
        )));
    }
    if opt.perms[0] != *inst.initial() {
        return Err(Error::TraceMismatch(
            "optimum trace starts from a different permutation".into(),
        ));
    }
    Ok(())
}
