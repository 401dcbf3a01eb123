//! Objective, hard constraints and optimality tests.
//!
//! The objective is a sum of independent per-event penalties:
//!
//! ```text
//! penalty(e, t, r) = w_late  * period(t) / (P - 1)          (0 when P = 1)
//!                  + w_slack * (capacity(r) - attendees(e)) / capacity(r)
//!                  + w_unpref * [t is unpreferred by e]
//! ```
//!
//! Because the terms are per event, the cost of a partial assignment is
//! simply the sum over its placed events, which is what the constructive
//! search evaluates after every tentative placement.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Placement, Problem, Solution};

/// Absolute tolerance used whenever two costs are compared for a tie.
pub const COST_TOLERANCE: f64 = 1e-9;

/// Index of the first value within [`COST_TOLERANCE`] of the minimum.
/// `None` values never win; returns `None` if every value is `None`.
pub fn first_min_index<I>(values: I) -> Option<usize>
where
    I: IntoIterator<Item = Option<f64>>,
    I::IntoIter: Clone,
{
    let iter = values.into_iter();
    let min = iter.clone().flatten().fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    iter.enumerate()
        .find(|(_, v)| matches!(v, Some(c) if *c <= min + COST_TOLERANCE))
        .map(|(i, _)| i)
}

/// Standalone penalty of putting `event` at `placement`.
pub fn placement_penalty(problem: &Problem, event: usize, placement: Placement) -> f64 {
    let w = problem.weights();
    let periods = problem.calendar().periods_per_day;
    let late = if periods > 1 {
        problem.calendar().period(placement.timeslot) as f64 / (periods - 1) as f64
    } else {
        0.0
    };
    let capacity = f64::from(problem.room_capacity(placement.room));
    let slack = (capacity - problem.attendees(event) as f64) / capacity;
    let unpref = if problem.is_unpreferred(event, placement.timeslot) {
        1.0
    } else {
        0.0
    };
    w.w_late * late + w.w_slack * slack + w.w_unpref * unpref
}

/// Events placed so far, with occupancy counters per lecturer, group and
/// room at every timeslot.
#[derive(Debug, Clone)]
pub struct PartialAssignment {
    placements: Vec<Option<Placement>>,
    /// Placed events in ascending index order, so summation order never
    /// depends on the order events were placed in.
    placed: Vec<usize>,
    timeslots: usize,
    lecturer_load: Vec<u32>,
    group_load: Vec<u32>,
    room_load: Vec<u32>,
}

impl PartialAssignment {
    pub fn empty(problem: &Problem) -> Self {
        let t = problem.timeslots();
        Self {
            placements: vec![None; problem.num_events()],
            placed: Vec::with_capacity(problem.num_events()),
            timeslots: t,
            lecturer_load: vec![0; problem.num_lecturers() * t],
            group_load: vec![0; problem.num_groups() * t],
            room_load: vec![0; problem.num_rooms() * t],
        }
    }

    /// Starts from the fixed events only.
    pub fn with_fixed(problem: &Problem) -> Self {
        let mut partial = Self::empty(problem);
        for e in 0..problem.num_events() {
            if let Some(p) = problem.fixed(e) {
                partial.place(problem, e, p);
            }
        }
        partial
    }

    pub fn from_solution(problem: &Problem, solution: &Solution) -> Self {
        let mut partial = Self::empty(problem);
        for (e, &p) in solution.placements().iter().enumerate() {
            partial.place(problem, e, p);
        }
        partial
    }

    /// Places `event`. Panics if it is already placed.
    pub fn place(&mut self, problem: &Problem, event: usize, placement: Placement) {
        assert!(
            self.placements[event].is_none(),
            "event {event} placed twice"
        );
        self.placements[event] = Some(placement);
        let pos = self.placed.binary_search(&event).unwrap_err();
        self.placed.insert(pos, event);
        self.adjust(problem, event, placement, true);
    }

    /// Removes `event` and returns where it was.
    pub fn unplace(&mut self, problem: &Problem, event: usize) -> Option<Placement> {
        let placement = self.placements[event].take()?;
        let pos = self.placed.binary_search(&event).expect("placed index");
        self.placed.remove(pos);
        self.adjust(problem, event, placement, false);
        Some(placement)
    }

    fn adjust(&mut self, problem: &Problem, event: usize, p: Placement, add: bool) {
        let t = p.timeslot;
        let n = self.timeslots;
        let bump = |slot: &mut u32| {
            if add {
                *slot += 1
            } else {
                *slot -= 1
            }
        };
        bump(&mut self.lecturer_load[problem.lecturer_of(event) * n + t]);
        for &g in problem.groups_of(event) {
            bump(&mut self.group_load[g * n + t]);
        }
        bump(&mut self.room_load[p.room * n + t]);
    }

    pub fn placement(&self, event: usize) -> Option<Placement> {
        self.placements[event]
    }

    pub fn placed_events(&self) -> &[usize] {
        &self.placed
    }

    pub fn as_map(&self) -> &[Option<Placement>] {
        &self.placements
    }

    pub fn is_complete(&self) -> bool {
        self.placed.len() == self.placements.len()
    }

    pub(crate) fn room_free(&self, room: usize, t: usize) -> bool {
        self.room_load[room * self.timeslots + t] == 0
    }

    /// Lecturer and every group of `event` are free at `t`.
    pub(crate) fn people_free(&self, problem: &Problem, event: usize, t: usize) -> bool {
        let n = self.timeslots;
        self.lecturer_load[problem.lecturer_of(event) * n + t] == 0
            && problem
                .groups_of(event)
                .iter()
                .all(|&g| self.group_load[g * n + t] == 0)
    }
}

/// Cost of the placed events. Linear in the number of placed events.
pub fn cost(problem: &Problem, partial: &PartialAssignment) -> f64 {
    partial
        .placed
        .iter()
        .map(|&e| placement_penalty(problem, e, partial.placements[e].unwrap()))
        .fold(0.0, |acc, p| acc + p)
}

/// Cost of an arbitrary assignment map, summed in event index order.
pub fn cost_of_map(problem: &Problem, map: &[Option<Placement>]) -> f64 {
    map.iter()
        .enumerate()
        .filter_map(|(e, p)| p.map(|p| placement_penalty(problem, e, p)))
        .fold(0.0, |acc, p| acc + p)
}

/// Counts calls to the objective and the per-event terms they summed.
/// Owned by a single run; never shared.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CostEvaluator {
    /// Number of objective evaluations.
    pub calls: u64,
    /// Per-event penalty terms summed across all evaluations.
    pub terms: u64,
}

impl CostEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn evaluate(&mut self, problem: &Problem, partial: &PartialAssignment) -> f64 {
        self.calls += 1;
        self.terms += partial.placed.len() as u64;
        cost(problem, partial)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HardViolationKind {
    LecturerClash,
    GroupClash,
    RoomClash,
    Capacity,
    Unassigned,
}

impl HardViolationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LecturerClash => "LECTURER_CLASH",
            Self::GroupClash => "GROUP_CLASH",
            Self::RoomClash => "ROOM_CLASH",
            Self::Capacity => "CAPACITY",
            Self::Unassigned => "UNASSIGNED",
        }
    }
}

impl fmt::Display for HardViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A reason an assignment is outside the feasible set.
///
/// `resource` indexes lecturers, groups or rooms depending on `kind`
/// (it is the room for `Capacity`, unset for `Unassigned`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardViolation {
    pub kind: HardViolationKind,
    pub events: Vec<usize>,
    pub timeslot: Option<usize>,
    pub resource: Option<usize>,
}

impl HardViolation {
    pub fn describe(&self, problem: &Problem) -> String {
        let inst = problem.instance();
        let events: Vec<&str> = self.events.iter().map(|&e| problem.event_id(e)).collect();
        let resource = self.resource.map(|r| match self.kind {
            HardViolationKind::LecturerClash => format!("lecturer `{}`", inst.lecturers[r].id),
            HardViolationKind::GroupClash => format!("group `{}`", inst.groups[r].id),
            _ => format!("room `{}`", inst.rooms[r].id),
        });
        let mut out = format!("{}: events {}", self.kind, events.join(", "));
        if let Some(r) = resource {
            out.push_str(&format!(" on {r}"));
        }
        if let Some(t) = self.timeslot {
            out.push_str(&format!(" at timeslot {t}"));
        }
        out
    }
}

/// Whether unplaced events count as violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Only placed events are checked.
    Partial,
    /// Every event must be placed.
    Full,
}

/// Every hard-constraint violation in `map` (one entry per event, `None`
/// for unplaced). Clashes are reported once per (resource, timeslot).
pub fn hard_violations(
    problem: &Problem,
    map: &[Option<Placement>],
    scope: Scope,
) -> Vec<HardViolation> {
    use HardViolationKind::*;

    let t_max = problem.timeslots();
    let mut lecturer = vec![Vec::new(); problem.num_lecturers() * t_max];
    let mut group = vec![Vec::new(); problem.num_groups() * t_max];
    let mut room = vec![Vec::new(); problem.num_rooms() * t_max];
    let mut out = Vec::new();

    for (e, p) in map.iter().enumerate() {
        let Some(p) = p else { continue };
        let t = p.timeslot;
        lecturer[problem.lecturer_of(e) * t_max + t].push(e);
        for &g in problem.groups_of(e) {
            group[g * t_max + t].push(e);
        }
        room[p.room * t_max + t].push(e);
    }

    for (kind, buckets) in [
        (LecturerClash, &lecturer),
        (GroupClash, &group),
        (RoomClash, &room),
    ] {
        for (i, events) in buckets.iter().enumerate() {
            if events.len() > 1 {
                out.push(HardViolation {
                    kind,
                    events: events.clone(),
                    timeslot: Some(i % t_max),
                    resource: Some(i / t_max),
                });
            }
        }
    }

    for (e, p) in map.iter().enumerate() {
        match p {
            Some(p) if problem.attendees(e) > u64::from(problem.room_capacity(p.room)) => {
                out.push(HardViolation {
                    kind: Capacity,
                    events: vec![e],
                    timeslot: Some(p.timeslot),
                    resource: Some(p.room),
                });
            }
            None if scope == Scope::Full => out.push(HardViolation {
                kind: Unassigned,
                events: vec![e],
                timeslot: None,
                resource: None,
            }),
            _ => {}
        }
    }
    out
}

/// Whether `event` can go to (`timeslot`, `room`) without breaking a hard
/// constraint against what is already placed. `event` must be unplaced.
pub fn is_feasible_placement(
    problem: &Problem,
    partial: &PartialAssignment,
    event: usize,
    timeslot: usize,
    room: usize,
) -> bool {
    timeslot < problem.timeslots()
        && room < problem.num_rooms()
        && problem.attendees(event) <= u64::from(problem.room_capacity(room))
        && partial.room_free(room, timeslot)
        && partial.people_free(problem, event, timeslot)
}

/// `f_h <= f_ref + eps`.
pub fn absolute_gap_ok(f_h: f64, f_ref: f64, eps: f64) -> bool {
    f_h <= f_ref + eps
}

/// `(f_h - f_ref) / f_h`, normalized by the heuristic value.
pub fn relative_gap(f_h: f64, f_ref: f64) -> Result<f64> {
    if f_h == 0.0 {
        return Err(Error::ZeroHeuristicValue);
    }
    Ok((f_h - f_ref) / f_h)
}

/// True iff no feasible single-event relocation (one non-fixed event moved
/// to another timeslot/room, all else unchanged) is cheaper than
/// `solution` by more than [`COST_TOLERANCE`].
pub fn is_local_optimum(problem: &Problem, solution: &Solution) -> Result<bool> {
    let violations = hard_violations(problem, &solution.as_map(), Scope::Full);
    if !violations.is_empty() {
        return Err(Error::Infeasible(violations.len()));
    }
    let base = solution.cost();
    let mut partial = PartialAssignment::from_solution(problem, solution);
    for e in 0..problem.num_events() {
        if problem.fixed(e).is_some() {
            continue;
        }
        let original = partial.unplace(problem, e).expect("complete solution");
        for timeslot in 0..problem.timeslots() {
            for room in 0..problem.num_rooms() {
                let candidate = Placement { timeslot, room };
                if candidate == original
                    || !is_feasible_placement(problem, &partial, e, timeslot, room)
                {
                    continue;
                }
                partial.place(problem, e, candidate);
                let c = cost(problem, &partial);
                partial.unplace(problem, e);
                if c < base - COST_TOLERANCE {
                    return Ok(false);
                }
            }
        }
        partial.place(problem, e, original);
    }
    Ok(true)
}
