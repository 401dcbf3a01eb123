mod common;

use common::oracle;
use proptest::prelude::*;
use vnstt::construct::{construct, Outcome};
use vnstt::cost::{hard_violations, PartialAssignment, Scope};
use vnstt::Problem;

fn as_slots(outcome: &Outcome) -> Option<Vec<oracle::Slot>> {
    outcome.solution().map(|s| {
        s.placements()
            .iter()
            .map(|p| (p.timeslot, p.room))
            .collect()
    })
}

fn check_against_oracle(seed: u64, n: usize, max_t: usize, arrangement_seed: u64) {
    let inst = oracle::random_micro_instance(seed, n, max_t);
    let problem = Problem::new(inst.clone()).unwrap();
    let mut arrangement: Vec<usize> = (0..n).collect();
    // cheap deterministic shuffle, independent of the solver
    let mut x = arrangement_seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1);
    for i in (1..n).rev() {
        x = x
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        arrangement.swap(i, (x >> 33) as usize % (i + 1));
    }

    let ours = construct(&problem, &arrangement).unwrap();
    let reference = oracle::construct(&inst, &arrangement);
    assert_eq!(ours.cost_evaluations, reference.evaluations, "seed {seed}");
    match (&ours.outcome, reference.failed) {
        (Outcome::Failure { event }, Some(e)) => assert_eq!(*event, e, "seed {seed}"),
        (Outcome::Success(sol), None) => {
            let slots = as_slots(&ours.outcome).unwrap();
            let expected: Vec<_> = reference.map.iter().map(|s| s.unwrap()).collect();
            assert_eq!(slots, expected, "seed {seed}");
            let full: Vec<_> = expected.iter().copied().map(Some).collect();
            assert_eq!(sol.cost(), oracle::cost(&inst, &full), "seed {seed}");
            assert!(oracle::feasible(&inst, &full));
        }
        (o, f) => panic!("seed {seed}: solver {o:?} vs oracle failure {f:?}"),
    }
}

#[test]
fn matches_brute_force_on_micro_instances() {
    for seed in 0..300 {
        let n = 1 + (seed as usize % 5);
        check_against_oracle(seed, n, 4, seed * 7 + 1);
    }
}

#[test]
fn each_commit_is_the_first_cheapest_option() {
    // The oracle's options are the complete list of feasible timeslots, so a
    // committed placement must carry the minimum cost among them.
    for seed in 0..100 {
        let inst = oracle::random_micro_instance(seed, 4, 6);
        let arrangement: Vec<usize> = (0..4).collect();
        let g = oracle::construct(&inst, &arrangement);
        let problem = Problem::new(inst.clone()).unwrap();
        let ours = construct(&problem, &arrangement).unwrap();
        let Some(sol) = ours.outcome.solution() else {
            continue;
        };
        for (e, options) in &g.steps {
            let p = sol.placement(*e);
            let min = options.iter().map(|o| o.2).fold(f64::INFINITY, f64::min);
            let first = options.iter().find(|o| o.2 <= min + 1e-9).unwrap();
            assert_eq!((p.timeslot, p.room), (first.0, first.1), "seed {seed}");
        }
    }
}

#[test]
fn every_prefix_of_a_construction_is_feasible() {
    for seed in 0..60 {
        let inst = oracle::random_micro_instance(seed, 5, 6);
        let problem = Problem::new(inst.clone()).unwrap();
        let arrangement: Vec<usize> = (0..5).rev().collect();
        let Outcome::Success(sol) = construct(&problem, &arrangement).unwrap().outcome else {
            continue;
        };
        let mut partial = PartialAssignment::with_fixed(&problem);
        for &e in &arrangement {
            if problem.fixed(e).is_none() {
                partial.place(&problem, e, sol.placement(e));
            }
            assert!(hard_violations(&problem, partial.as_map(), Scope::Partial).is_empty());
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    for seed in 0..20 {
        let inst = oracle::random_micro_instance(seed, 5, 5);
        let problem = Problem::new(inst).unwrap();
        let arrangement: Vec<usize> = (0..5).collect();
        let a = construct(&problem, &arrangement).unwrap();
        let b = construct(&problem, &arrangement).unwrap();
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.cost_evaluations, b.cost_evaluations);
    }
}

proptest! {
    #[test]
    fn arbitrary_micro_instances_agree(seed in 1000u64..100_000, n in 1usize..=5, arr in 0u64..1000) {
        check_against_oracle(seed, n, 4, arr);
    }

    #[test]
    fn evaluations_bounded_by_scan(seed in 0u64..10_000, n in 1usize..=6) {
        let inst = oracle::random_micro_instance(seed, n, 6);
        let t = inst.calendar.timeslots() as u64;
        let problem = Problem::new(inst).unwrap();
        let r = construct(&problem, &problem.identity_arrangement()).unwrap();
        prop_assert!(r.cost_evaluations <= n as u64 * t);
    }
}
