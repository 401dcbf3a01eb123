//! Greedy sequential construction.
//!
//! Events are taken in arrangement order. Each non-fixed event is tried at
//! every timeslot; at each timeslot the tightest free room that seats the
//! event is used, the partial solution is costed, and scanning continues to
//! the last timeslot. The event is then committed to the cheapest option
//! (lowest timeslot on ties). An event with no feasible option aborts the
//! construction.

use crate::cost::{first_min_index, CostEvaluator, PartialAssignment};
use crate::error::{Error, Result};
use crate::model::{Placement, Problem, Solution};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Success(Solution),
    /// First event (instance index) that could not be placed anywhere.
    Failure {
        event: usize,
    },
}

impl Outcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Outcome::Success(s) => Some(s),
            Outcome::Failure { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionResult {
    pub outcome: Outcome,
    /// Objective evaluations made by this call.
    pub cost_evaluations: u64,
    /// Per-event penalty terms summed by those evaluations.
    pub cost_terms: u64,
}

/// Room chosen for `event` at `timeslot`: the smallest free room that
/// seats it, ties by room id. `None` when nothing is feasible.
pub fn select_room(
    problem: &Problem,
    partial: &PartialAssignment,
    event: usize,
    timeslot: usize,
) -> Option<usize> {
    if !partial.people_free(problem, event, timeslot) {
        return None;
    }
    problem.events[event]
        .rooms_by_fit
        .iter()
        .copied()
        .find(|&r| partial.room_free(r, timeslot))
}

pub(crate) fn check_permutation(problem: &Problem, arrangement: &[usize]) -> Result<()> {
    let n = problem.num_events();
    if arrangement.len() != n {
        return Err(Error::NotAPermutation);
    }
    let mut seen = vec![false; n];
    for &e in arrangement {
        if e >= n || std::mem::replace(&mut seen[e], true) {
            return Err(Error::NotAPermutation);
        }
    }
    Ok(())
}

/// Builds a timetable by placing events in `arrangement` order.
/// `arrangement` must be a permutation of the instance event indices.
pub fn construct(problem: &Problem, arrangement: &[usize]) -> Result<ConstructionResult> {
    check_permutation(problem, arrangement)?;
    let mut evaluator = CostEvaluator::new();
    let outcome = construct_counted(problem, arrangement, &mut evaluator);
    Ok(ConstructionResult {
        outcome,
        cost_evaluations: evaluator.calls,
        cost_terms: evaluator.terms,
    })
}

/// Same as [`construct`] without the permutation check, accumulating into
/// a caller-owned evaluator.
pub(crate) fn construct_counted(
    problem: &Problem,
    arrangement: &[usize],
    evaluator: &mut CostEvaluator,
) -> Outcome {
    let mut partial = PartialAssignment::with_fixed(problem);
    let mut options: Vec<(Placement, f64)> = Vec::with_capacity(problem.timeslots());

    for &event in arrangement {
        if problem.fixed(event).is_some() {
            continue;
        }
        options.clear();
        for timeslot in 0..problem.timeslots() {
            let Some(room) = select_room(problem, &partial, event, timeslot) else {
                continue;
            };
            let placement = Placement { timeslot, room };
            partial.place(problem, event, placement);
            let cost = evaluator.evaluate(problem, &partial);
            partial.unplace(problem, event);
            options.push((placement, cost));
        }
        let Some(best) = first_min_index(options.iter().map(|&(_, c)| Some(c))) else {
            return Outcome::Failure { event };
        };
        partial.place(problem, event, options[best].0);
    }

    let placements: Vec<Placement> = partial
        .as_map()
        .iter()
        .map(|p| p.expect("every event placed"))
        .collect();
    let cost = crate::cost::cost(problem, &partial);
    Outcome::Success(Solution::from_parts(
        problem.id().to_string(),
        placements,
        cost,
    ))
}
