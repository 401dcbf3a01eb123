//! Neighborhood-structure rotation search.
//!
//! The instance event order is split into `k` contiguous structures. Each
//! structure in turn is rotated left one position at a time through a full
//! circle; every rotation yields an arrangement (all structures
//! concatenated) that is fed to [`construct`](crate::construct::construct)
//! and logged. The structure is then left at its cheapest rotation before
//! moving on to the next one. A final construction on the resulting
//! arrangement produces the answer.

use std::time::{Duration, Instant};

use crate::construct::{construct_counted, Outcome};
use crate::cost::{first_min_index, CostEvaluator, COST_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{Problem, Solution};

/// The arrangement split into `k` ordered blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodStructures {
    structures: Vec<Vec<usize>>,
}

impl NeighborhoodStructures {
    pub fn k(&self) -> usize {
        self.structures.len()
    }

    pub fn structures(&self) -> &[Vec<usize>] {
        &self.structures
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.structures.iter().map(Vec::len).collect()
    }

    /// Concatenation of all structures.
    pub fn arrangement(&self) -> Vec<usize> {
        self.structures.concat()
    }

    fn arrangement_with(&self, index: usize, replacement: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.structures.iter().map(Vec::len).sum());
        for (i, s) in self.structures.iter().enumerate() {
            out.extend_from_slice(if i == index { replacement } else { s });
        }
        out
    }
}

/// Largest admissible `k` for `n` events.
pub fn max_k(n: usize) -> usize {
    n / 2
}

/// Splits the instance event order into `k` contiguous structures; the
/// first `N mod k` get one extra event.
pub fn partition_events(problem: &Problem, k: usize) -> Result<NeighborhoodStructures> {
    let n = problem.num_events();
    if k < 2 || k > max_k(n) {
        return Err(Error::KOutOfRange {
            k,
            max: max_k(n),
            events: n,
        });
    }
    let (base, extra) = (n / k, n % k);
    let mut next = 0;
    let structures = (0..k)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let s: Vec<usize> = (next..next + len).collect();
            next += len;
            s
        })
        .collect();
    Ok(NeighborhoodStructures { structures })
}

/// Cyclic left rotation by `steps` (mod length).
pub fn rotate_left<T: Clone>(structure: &[T], steps: usize) -> Vec<T> {
    if structure.is_empty() {
        return Vec::new();
    }
    let mut out = structure.to_vec();
    out.rotate_left(steps % structure.len());
    out
}

/// One construction made while rotating a structure.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// 1-based structure number.
    pub structure: usize,
    /// Left shifts applied to the structure's stage-entry order.
    pub rotation: usize,
    /// Instance index of the event at the structure's first position.
    pub leading_event: usize,
    /// `None` when the construction failed.
    pub cost: Option<f64>,
    pub cost_evaluations: u64,
}

/// The construction on the final arrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalRecord {
    /// Instance index of the first event of the final arrangement.
    pub leading_event: usize,
    pub cost: Option<f64>,
    pub cost_evaluations: u64,
}

/// Rotates `structure` so the rotation with the cheapest record leads.
/// `records` must be this structure's records for rotations `0..len` in
/// order. Failed records lose to any cost; if all failed the structure is
/// returned unchanged.
pub fn realign_to_best(structure: &[usize], records: &[TraceRecord]) -> Result<Vec<usize>> {
    let complete = records.len() == structure.len()
        && records.iter().enumerate().all(|(r, rec)| {
            rec.rotation == r && rec.leading_event == structure[r % structure.len()]
        });
    if !complete {
        return Err(Error::IncompleteRecords);
    }
    let best = first_min_index(records.iter().map(|r| r.cost)).unwrap_or(0);
    Ok(rotate_left(structure, best))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VnsRun {
    pub instance_id: String,
    pub k: usize,
    pub structure_sizes: Vec<usize>,
    /// One record per rotation, in execution order.
    pub trace: Vec<TraceRecord>,
    pub final_record: FinalRecord,
    /// Structures after every realignment.
    pub final_structures: NeighborhoodStructures,
    pub final_solution: Option<Solution>,
    pub construct_calls: u64,
    pub cost_evaluations: u64,
    /// Per-event penalty terms summed over all evaluations.
    pub cost_terms: u64,
    pub elapsed: Duration,
}

impl VnsRun {
    pub fn solution(&self) -> Result<&Solution> {
        self.final_solution
            .as_ref()
            .ok_or(Error::AllConstructionsFailed)
    }

    /// Records of structure `i` (1-based).
    pub fn stage(&self, i: usize) -> impl Iterator<Item = &TraceRecord> {
        self.trace.iter().filter(move |r| r.structure == i)
    }

    /// Cheapest successful cost per structure; `None` where every
    /// rotation failed.
    pub fn stage_minima(&self) -> Vec<Option<f64>> {
        (1..=self.k)
            .map(|i| {
                self.stage(i)
                    .filter_map(|r| r.cost)
                    .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.min(c))))
            })
            .collect()
    }

    /// Stage minima never increase (within tolerance), ignoring stages
    /// where everything failed.
    pub fn stage_minima_non_increasing(&self) -> bool {
        let minima: Vec<f64> = self.stage_minima().into_iter().flatten().collect();
        minima.windows(2).all(|w| w[1] <= w[0] + COST_TOLERANCE)
    }

    pub fn all_succeeded(&self) -> bool {
        self.trace.iter().all(|r| r.cost.is_some()) && self.final_record.cost.is_some()
    }
}

/// Runs the rotation search with `k` structures.
pub fn solve_vns(problem: &Problem, k: usize) -> Result<VnsRun> {
    let started = Instant::now();
    let mut structures = partition_events(problem, k)?;
    let structure_sizes = structures.sizes();
    let mut evaluator = CostEvaluator::new();
    let mut construct_calls = 0u64;
    let mut trace = Vec::with_capacity(problem.num_events());

    for i in 0..structures.k() {
        let entry = structures.structures[i].clone();
        let stage_start = trace.len();
        for rotation in 0..entry.len() {
            let rotated = rotate_left(&entry, rotation);
            let arrangement = structures.arrangement_with(i, &rotated);
            let before = evaluator.calls;
            let outcome = construct_counted(problem, &arrangement, &mut evaluator);
            construct_calls += 1;
            trace.push(TraceRecord {
                structure: i + 1,
                rotation,
                leading_event: rotated[0],
                cost: outcome.solution().map(Solution::cost),
                cost_evaluations: evaluator.calls - before,
            });
        }
        structures.structures[i] = realign_to_best(&entry, &trace[stage_start..])?;
    }

    let arrangement = structures.arrangement();
    let before = evaluator.calls;
    let outcome = construct_counted(problem, &arrangement, &mut evaluator);
    construct_calls += 1;
    let final_solution = match outcome {
        Outcome::Success(s) => Some(s),
        Outcome::Failure { .. } => None,
    };
    let final_record = FinalRecord {
        leading_event: arrangement[0],
        cost: final_solution.as_ref().map(Solution::cost),
        cost_evaluations: evaluator.calls - before,
    };

    Ok(VnsRun {
        instance_id: problem.id().to_string(),
        k,
        structure_sizes,
        trace,
        final_record,
        final_structures: structures,
        final_solution,
        construct_calls,
        cost_evaluations: evaluator.calls,
        cost_terms: evaluator.terms,
        elapsed: started.elapsed(),
    })
}

/// Cheapest record of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestRecord {
    pub cost: f64,
    /// 1-based structure number.
    pub structure: usize,
    pub leading_event: usize,
}

/// The cheapest successful rotation record; ties go to the earliest.
pub fn best_of_trace(run: &VnsRun) -> Result<BestRecord> {
    let best =
        first_min_index(run.trace.iter().map(|r| r.cost)).ok_or(Error::AllConstructionsFailed)?;
    let rec = &run.trace[best];
    Ok(BestRecord {
        cost: rec.cost.unwrap(),
        structure: rec.structure,
        leading_event: rec.leading_event,
    })
}
