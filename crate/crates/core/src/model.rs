//! Timetabling instances, their validation, and the compiled [`Problem`]
//! view the solver works on.
//!
//! An [`Instance`] mirrors the on-disk JSON document and refers to rooms,
//! lecturers and groups by string id. It may be structurally broken;
//! [`validate_instance`] lists everything that is wrong with it. A
//! [`Problem`] is only built from a valid instance and resolves every
//! reference to a dense index so the hot loops never touch strings.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Teaching week: `days` × `periods_per_day` timeslots, flattened as
/// `t = day * periods_per_day + period`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calendar {
    pub days: usize,
    pub periods_per_day: usize,
}

impl Calendar {
    pub fn new(days: usize, periods_per_day: usize) -> Self {
        Self {
            days,
            periods_per_day,
        }
    }

    pub fn timeslots(&self) -> usize {
        self.days * self.periods_per_day
    }

    pub fn day(&self, t: usize) -> usize {
        t / self.periods_per_day
    }

    pub fn period(&self, t: usize) -> usize {
        t % self.periods_per_day
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Room {
    pub id: String,
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lecturer {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentGroup {
    pub id: String,
    pub size: u32,
}

/// A pre-assignment the solver must respect and never move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPlacement {
    pub timeslot: usize,
    pub room: String,
}

/// One teaching session. Its 1-based index in the instance event list is
/// the number used in traces and reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub id: String,
    pub lecturer: String,
    pub groups: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<FixedPlacement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unpreferred_timeslots: Vec<usize>,
}

/// Weights of the three per-event penalty terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub w_late: f64,
    pub w_slack: f64,
    pub w_unpref: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            w_late: 1.0,
            w_slack: 0.5,
            w_unpref: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub calendar: Calendar,
    pub rooms: Vec<Room>,
    pub lecturers: Vec<Lecturer>,
    pub groups: Vec<StudentGroup>,
    pub events: Vec<Event>,
    #[serde(default)]
    pub weights: CostWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    NoEvents,
    BadCalendar,
    DuplicateId,
    BadCapacity,
    BadGroupSize,
    EmptyGroups,
    UnknownLecturer,
    UnknownGroup,
    UnknownRoom,
    TimeslotOutOfRange,
    NegativeWeight,
    FixedConflict,
    FixedCapacity,
}

impl ViolationCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::NoEvents => "NO_EVENTS",
            Self::BadCalendar => "BAD_CALENDAR",
            Self::DuplicateId => "DUPLICATE_ID",
            Self::BadCapacity => "BAD_CAPACITY",
            Self::BadGroupSize => "BAD_GROUP_SIZE",
            Self::EmptyGroups => "EMPTY_GROUPS",
            Self::UnknownLecturer => "UNKNOWN_LECTURER",
            Self::UnknownGroup => "UNKNOWN_GROUP",
            Self::UnknownRoom => "UNKNOWN_ROOM",
            Self::TimeslotOutOfRange => "TIMESLOT_OUT_OF_RANGE",
            Self::NegativeWeight => "NEGATIVE_WEIGHT",
            Self::FixedConflict => "FIXED_CONFLICT",
            Self::FixedCapacity => "FIXED_CAPACITY",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A structural defect of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

fn duplicates<'a>(
    kind: &str,
    ids: impl Iterator<Item = &'a str>,
    out: &mut Vec<Violation>,
) -> HashSet<&'a str> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            out.push(Violation::new(
                ViolationCode::DuplicateId,
                format!("{kind} id `{id}` is used more than once"),
            ));
        }
    }
    seen
}

/// Lists every violated structural invariant of `instance`. An empty list
/// means the instance is valid and [`Problem::new`] will accept it.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    use ViolationCode::*;

    let mut out = Vec::new();
    let cal = instance.calendar;
    if cal.days == 0 || cal.periods_per_day == 0 {
        out.push(Violation::new(
            BadCalendar,
            format!(
                "calendar needs days >= 1 and periods_per_day >= 1, got {}x{}",
                cal.days, cal.periods_per_day
            ),
        ));
    }
    let timeslots = cal.timeslots();

    if instance.events.is_empty() {
        out.push(Violation::new(NoEvents, "instance has no events"));
    }

    let w = instance.weights;
    for (name, value) in [
        ("w_late", w.w_late),
        ("w_slack", w.w_slack),
        ("w_unpref", w.w_unpref),
    ] {
        if !(value >= 0.0 && value.is_finite()) {
            out.push(Violation::new(
                NegativeWeight,
                format!("weight {name} = {value} must be a finite value >= 0"),
            ));
        }
    }

    duplicates(
        "room",
        instance.rooms.iter().map(|r| r.id.as_str()),
        &mut out,
    );
    let lecturers = duplicates(
        "lecturer",
        instance.lecturers.iter().map(|l| l.id.as_str()),
        &mut out,
    );
    let groups = duplicates(
        "group",
        instance.groups.iter().map(|g| g.id.as_str()),
        &mut out,
    );
    duplicates(
        "event",
        instance.events.iter().map(|e| e.id.as_str()),
        &mut out,
    );

    for room in &instance.rooms {
        if room.capacity == 0 {
            out.push(Violation::new(
                BadCapacity,
                format!("room `{}` has capacity 0", room.id),
            ));
        }
    }
    for group in &instance.groups {
        if group.size == 0 {
            out.push(Violation::new(
                BadGroupSize,
                format!("group `{}` has size 0", group.id),
            ));
        }
    }

    let capacity: HashMap<&str, u32> = instance
        .rooms
        .iter()
        .map(|r| (r.id.as_str(), r.capacity))
        .collect();
    let size: HashMap<&str, u32> = instance
        .groups
        .iter()
        .map(|g| (g.id.as_str(), g.size))
        .collect();

    for event in &instance.events {
        if !lecturers.contains(event.lecturer.as_str()) {
            out.push(Violation::new(
                UnknownLecturer,
                format!(
                    "event `{}` references unknown lecturer `{}`",
                    event.id, event.lecturer
                ),
            ));
        }
        if event.groups.is_empty() {
            out.push(Violation::new(
                EmptyGroups,
                format!("event `{}` has no student groups", event.id),
            ));
        }
        let mut own = HashSet::new();
        for g in &event.groups {
            if !groups.contains(g.as_str()) {
                out.push(Violation::new(
                    UnknownGroup,
                    format!("event `{}` references unknown group `{}`", event.id, g),
                ));
            }
            if !own.insert(g.as_str()) {
                out.push(Violation::new(
                    DuplicateId,
                    format!("event `{}` lists group `{}` twice", event.id, g),
                ));
            }
        }
        for &t in &event.unpreferred_timeslots {
            if t >= timeslots {
                out.push(Violation::new(
                    TimeslotOutOfRange,
                    format!(
                        "event `{}` marks timeslot {t} unpreferred, outside [0, {timeslots})",
                        event.id
                    ),
                ));
            }
        }
        if let Some(fixed) = &event.fixed {
            if fixed.timeslot >= timeslots {
                out.push(Violation::new(
                    TimeslotOutOfRange,
                    format!(
                        "event `{}` is fixed at timeslot {}, outside [0, {timeslots})",
                        event.id, fixed.timeslot
                    ),
                ));
            }
            match capacity.get(fixed.room.as_str()) {
                None => out.push(Violation::new(
                    UnknownRoom,
                    format!(
                        "event `{}` is fixed in unknown room `{}`",
                        event.id, fixed.room
                    ),
                )),
                Some(&cap) => {
                    let attendees: u64 = event
                        .groups
                        .iter()
                        .filter_map(|g| size.get(g.as_str()))
                        .map(|&s| u64::from(s))
                        .sum();
                    if attendees > u64::from(cap) {
                        out.push(Violation::new(
                            FixedCapacity,
                            format!(
                                "event `{}` ({attendees} students) is fixed in room `{}` of capacity {cap}",
                                event.id, fixed.room
                            ),
                        ));
                    }
                }
            }
        }
    }

    let fixed: Vec<(&Event, &FixedPlacement)> = instance
        .events
        .iter()
        .filter_map(|e| e.fixed.as_ref().map(|f| (e, f)))
        .collect();
    for (i, (a, fa)) in fixed.iter().enumerate() {
        for (b, fb) in &fixed[i + 1..] {
            if fa.timeslot != fb.timeslot {
                continue;
            }
            let mut shared = Vec::new();
            if a.lecturer == b.lecturer {
                shared.push(format!("lecturer `{}`", a.lecturer));
            }
            if let Some(g) = a.groups.iter().find(|g| b.groups.contains(g)) {
                shared.push(format!("group `{g}`"));
            }
            if fa.room == fb.room {
                shared.push(format!("room `{}`", fa.room));
            }
            if !shared.is_empty() {
                out.push(Violation::new(
                    FixedConflict,
                    format!(
                        "fixed events `{}` and `{}` share {} at timeslot {}",
                        a.id,
                        b.id,
                        shared.join(", "),
                        fa.timeslot
                    ),
                ));
            }
        }
    }

    out
}

/// A (timeslot, room) pair; `room` indexes [`Instance::rooms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub timeslot: usize,
    pub room: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct EventData {
    pub lecturer: usize,
    pub groups: Vec<usize>,
    pub attendees: u64,
    pub fixed: Option<Placement>,
    pub unpreferred: Vec<bool>,
    /// Rooms that can seat the event, tightest first, ties by room id.
    pub rooms_by_fit: Vec<usize>,
}

/// A validated instance with every id resolved to an index.
#[derive(Debug, Clone)]
pub struct Problem {
    instance: Instance,
    pub(crate) events: Vec<EventData>,
    event_index: HashMap<String, usize>,
    room_index: HashMap<String, usize>,
}

impl Problem {
    /// Compiles `instance`, rejecting it if [`validate_instance`] finds
    /// anything.
    pub fn new(instance: Instance) -> Result<Self> {
        let violations = validate_instance(&instance);
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }

        let index_of = |ids: Vec<&String>| -> HashMap<String, usize> {
            ids.into_iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), i))
                .collect()
        };
        let room_index = index_of(instance.rooms.iter().map(|r| &r.id).collect());
        let lecturer_index = index_of(instance.lecturers.iter().map(|l| &l.id).collect());
        let group_index = index_of(instance.groups.iter().map(|g| &g.id).collect());
        let event_index = index_of(instance.events.iter().map(|e| &e.id).collect());
        let timeslots = instance.calendar.timeslots();

        let mut rooms_sorted: Vec<usize> = (0..instance.rooms.len()).collect();
        rooms_sorted.sort_by(|&a, &b| {
            let (ra, rb) = (&instance.rooms[a], &instance.rooms[b]);
            ra.capacity
                .cmp(&rb.capacity)
                .then_with(|| ra.id.cmp(&rb.id))
        });

        let events = instance
            .events
            .iter()
            .map(|e| {
                let groups: Vec<usize> = e.groups.iter().map(|g| group_index[g]).collect();
                let attendees = groups
                    .iter()
                    .map(|&g| u64::from(instance.groups[g].size))
                    .sum();
                let mut unpreferred = vec![false; timeslots];
                for &t in &e.unpreferred_timeslots {
                    unpreferred[t] = true;
                }
                EventData {
                    lecturer: lecturer_index[&e.lecturer],
                    groups,
                    attendees,
                    fixed: e.fixed.as_ref().map(|f| Placement {
                        timeslot: f.timeslot,
                        room: room_index[&f.room],
                    }),
                    unpreferred,
                    rooms_by_fit: rooms_sorted
                        .iter()
                        .copied()
                        .filter(|&r| u64::from(instance.rooms[r].capacity) >= attendees)
                        .collect(),
                }
            })
            .collect();

        Ok(Self {
            instance,
            events,
            event_index,
            room_index,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn id(&self) -> &str {
        &self.instance.id
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn num_rooms(&self) -> usize {
        self.instance.rooms.len()
    }

    pub fn num_lecturers(&self) -> usize {
        self.instance.lecturers.len()
    }

    pub fn num_groups(&self) -> usize {
        self.instance.groups.len()
    }

    pub fn calendar(&self) -> Calendar {
        self.instance.calendar
    }

    pub fn timeslots(&self) -> usize {
        self.instance.calendar.timeslots()
    }

    pub fn weights(&self) -> CostWeights {
        self.instance.weights
    }

    pub fn event_id(&self, event: usize) -> &str {
        &self.instance.events[event].id
    }

    pub fn room_id(&self, room: usize) -> &str {
        &self.instance.rooms[room].id
    }

    pub fn room_capacity(&self, room: usize) -> u32 {
        self.instance.rooms[room].capacity
    }

    pub fn event_by_id(&self, id: &str) -> Option<usize> {
        self.event_index.get(id).copied()
    }

    pub fn room_by_id(&self, id: &str) -> Option<usize> {
        self.room_index.get(id).copied()
    }

    /// Total students attending `event` across its groups.
    pub fn attendees(&self, event: usize) -> u64 {
        self.events[event].attendees
    }

    pub fn fixed(&self, event: usize) -> Option<Placement> {
        self.events[event].fixed
    }

    pub fn is_unpreferred(&self, event: usize, timeslot: usize) -> bool {
        self.events[event].unpreferred[timeslot]
    }

    pub fn lecturer_of(&self, event: usize) -> usize {
        self.events[event].lecturer
    }

    pub fn groups_of(&self, event: usize) -> &[usize] {
        &self.events[event].groups
    }

    /// The identity arrangement: events in instance order.
    pub fn identity_arrangement(&self) -> Vec<usize> {
        (0..self.num_events()).collect()
    }
}

/// A complete, hard-feasible timetable with its cached cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    instance_id: String,
    placements: Vec<Placement>,
    cost: f64,
}

impl Solution {
    /// Builds a solution from one placement per event (in instance
    /// order), checking completeness, fixed placements and hard
    /// feasibility, and caching the recomputed cost.
    pub fn new(problem: &Problem, placements: Vec<Placement>) -> Result<Self> {
        if placements.len() != problem.num_events() {
            let missing = placements.len().min(problem.num_events());
            return Err(Error::MissingAssignment(
                problem.event_id(missing).to_string(),
            ));
        }
        let t_max = problem.timeslots();
        for (e, p) in placements.iter().enumerate() {
            if p.timeslot >= t_max {
                return Err(Error::TimeslotOutOfRange {
                    timeslot: p.timeslot,
                    timeslots: t_max,
                });
            }
            if p.room >= problem.num_rooms() {
                return Err(Error::UnknownRoom(format!("#{}", p.room)));
            }
            if let Some(fixed) = problem.fixed(e) {
                if fixed != *p {
                    return Err(Error::FixedMoved(problem.event_id(e).to_string()));
                }
            }
        }
        let map: Vec<Option<Placement>> = placements.iter().copied().map(Some).collect();
        let violations = crate::cost::hard_violations(problem, &map, crate::cost::Scope::Full);
        if !violations.is_empty() {
            return Err(Error::Infeasible(violations.len()));
        }
        let cost = crate::cost::cost_of_map(problem, &map);
        Ok(Self {
            instance_id: problem.id().to_string(),
            placements,
            cost,
        })
    }

    pub(crate) fn from_parts(instance_id: String, placements: Vec<Placement>, cost: f64) -> Self {
        Self {
            instance_id,
            placements,
            cost,
        }
    }

    pub fn instance_id(&self) -> &str {
        &self.instance_id
    }

    /// Placement of every event, indexed like the instance event list.
    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn placement(&self, event: usize) -> Placement {
        self.placements[event]
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn as_map(&self) -> Vec<Option<Placement>> {
        self.placements.iter().copied().map(Some).collect()
    }
}
