//! Randomized audit campaigns: every amortized inequality is checked on live
//! traces, in exact rational arithmetic, across a hundred thousand steps.

use mssc_core::adversary::{random_instance, RequestDistribution};
use mssc_core::dlm::AlgState;
use mssc_core::potentials::{
    audit_stage1_step, audit_stage2_move, total_potential, PairState, PotentialParams,
};
use mssc_core::rational::ratio_int;
use mssc_core::{ElementId, Permutation};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut order: Vec<ElementId> = (0..n).collect();
    order.shuffle(rng);
    Permutation::from_order(&order).unwrap()
}

#[test]
fn stage1_and_fetch_audits_pass_against_fixed_offline_lists() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5747_0001);
    let mut steps = 0usize;
    let mut fetch_audits = 0usize;
    let mut campaign = 0u64;
    while steps < 100_000 {
        let n = rng.random_range(8..=40);
        let r = rng.random_range(1..=6usize.min(n));
        let m = rng.random_range(50..=400);
        let inst = random_instance(n, r, m, RequestDistribution::Uniform, campaign).unwrap();
        campaign += 1;
        let params = PotentialParams::new(r);
        let off = random_perm(&mut rng, n);
        let mut pair = PairState::new(AlgState::dlm(inst.initial().clone()), off).unwrap();
        for req in inst.requests() {
            let audit = audit_stage1_step(&params, &mut pair, req).unwrap();
            assert!(
                audit.stage1.pass,
                "stage-1 bound violated: lhs {:?} bound {:?}",
                audit.stage1.lhs(),
                audit.stage1.bound
            );
            for verdict in &audit.fetch_verdicts {
                assert!(
                    verdict.pass,
                    "fetch bound violated: lhs {:?} bound {:?}",
                    verdict.lhs(),
                    verdict.bound
                );
            }
            fetch_audits += audit.fetch_verdicts.len();
            steps += 1;
        }
    }
    assert!(fetch_audits >= 100_000);
}

#[test]
fn stage2_audits_pass_along_mtfb_plays() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5747_0002);
    let mut moves = 0usize;
    let mut campaign = 1_000u64;
    while moves < 100_000 {
        let n = rng.random_range(8..=40);
        let r = rng.random_range(1..=6usize.min(n));
        let m = rng.random_range(50..=400);
        let inst = random_instance(n, r, m, RequestDistribution::Uniform, campaign).unwrap();
        campaign += 1;
        let params = PotentialParams::new(r);
        let mut pair =
            PairState::new(AlgState::dlm(inst.initial().clone()), inst.initial().clone()).unwrap();
        for req in inst.requests() {
            let audit = audit_stage1_step(&params, &mut pair, req).unwrap();
            assert!(audit.all_pass());
            // The offline side plays MTF-based: one requested element to the front.
            let pick = req.elements()[rng.random_range(0..req.cardinality())];
            let verdict = audit_stage2_move(&params, &mut pair, pick).unwrap();
            assert!(
                verdict.pass,
                "stage-2 bound violated: lhs {:?} bound {:?}",
                verdict.lhs(),
                verdict.bound
            );
            moves += 1;
            if moves.is_multiple_of(1_000) {
                let (phi, psi) = total_potential(&params, &pair);
                assert!(phi >= ratio_int(0) && psi >= ratio_int(0));
            }
        }
    }
}

#[test]
fn audited_deltas_telescope_to_the_total_potential_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5747_0003);
    for seed in 0..20u64 {
        let n = rng.random_range(5..=25);
        let r = rng.random_range(1..=4usize.min(n));
        let inst = random_instance(n, r, 120, RequestDistribution::Uniform, seed).unwrap();
        let params = PotentialParams::new(r);
        let mut pair =
            PairState::new(AlgState::dlm(inst.initial().clone()), inst.initial().clone()).unwrap();
        let (phi0, psi0) = total_potential(&params, &pair);
        assert_eq!((phi0, psi0), (ratio_int(0), ratio_int(0)));

        let mut phi_sum = ratio_int(0);
        let mut psi_sum = ratio_int(0);
        for req in inst.requests() {
            let audit = audit_stage1_step(&params, &mut pair, req).unwrap();
            phi_sum += audit.stage1.delta_phi;
            psi_sum += audit.stage1.delta_psi;
            let pick = req.elements()[rng.random_range(0..req.cardinality())];
            let verdict = audit_stage2_move(&params, &mut pair, pick).unwrap();
            phi_sum += verdict.delta_phi;
            psi_sum += verdict.delta_psi;
        }
        let (phi_m, psi_m) = total_potential(&params, &pair);
        assert_eq!(phi_m - phi0, phi_sum);
        assert_eq!(psi_m - psi0, psi_sum);
    }
}
