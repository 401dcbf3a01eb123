//! Seeded synthetic instances.
//!
//! Randomness comes from ChaCha8 (`rand_chacha` 0.3) seeded through
//! `SeedableRng::seed_from_u64`; retry attempt `a` uses ChaCha stream `a`.
//! Integer draws go through 64-bit ranges so results do not depend on the
//! platform's pointer width. Changing any of this changes every generated
//! instance.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::construct;
use crate::error::{Error, Result};
use crate::model::{
    validate_instance, Calendar, CostWeights, Event, FixedPlacement, Instance, Lecturer, Problem,
    Room, StudentGroup,
};

pub const MAX_ATTEMPTS: usize = 10;

/// Probability that an event is shared by two groups.
const SHARED_EVENT_PROBABILITY: f64 = 0.3;

pub const PRESETS: [&str; 3] = ["N18", "N90", "N130"];

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    /// Instance id of the result.
    pub name: String,
    pub events: usize,
    pub students: usize,
    pub groups: usize,
    pub lecturers: usize,
    pub rooms: usize,
    pub calendar: Calendar,
    pub seed: u64,
    pub fixed_fraction: f64,
    pub unpref_fraction: f64,
}

impl GenSpec {
    /// A spec with default calendar (5 × 8) and fractions.
    pub fn new(
        events: usize,
        students: usize,
        groups: usize,
        lecturers: usize,
        rooms: usize,
        seed: u64,
    ) -> Self {
        Self {
            name: format!("gen-n{events}-s{seed}"),
            events,
            students,
            groups,
            lecturers,
            rooms,
            calendar: Calendar::new(5, 8),
            seed,
            fixed_fraction: 0.0,
            unpref_fraction: 0.1,
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGenSpec(msg));
        if self.events == 0 || self.groups == 0 || self.lecturers == 0 || self.rooms == 0 {
            return bad("events, groups, lecturers and rooms must all be >= 1".into());
        }
        if self.students < self.groups {
            return bad(format!(
                "{} students cannot fill {} non-empty groups",
                self.students, self.groups
            ));
        }
        if self.calendar.days == 0 || self.calendar.periods_per_day == 0 {
            return bad("calendar needs at least one day and one period".into());
        }
        if self.rooms * self.calendar.timeslots() < self.events {
            return bad(format!(
                "{} rooms x {} timeslots cannot hold {} events",
                self.rooms,
                self.calendar.timeslots(),
                self.events
            ));
        }
        for (name, f) in [
            ("fixed_fraction", self.fixed_fraction),
            ("unpref_fraction", self.unpref_fraction),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("{name} = {f} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Dataset shapes: (events, students, groups, lecturers, rooms).
fn preset_counts(name: &str) -> Option<(usize, usize, usize, usize, usize)> {
    match name {
        "N18" => Some((18, 52, 4, 10, 10)),
        "N90" => Some((90, 175, 14, 29, 18)),
        "N130" => Some((130, 274, 21, 37, 22)),
        _ => None,
    }
}

pub fn preset(name: &str, seed: u64) -> Result<GenSpec> {
    let (n, s, g, l, r) =
        preset_counts(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    let mut spec = GenSpec::new(n, s, g, l, r, seed);
    spec.name = format!("{name}-s{seed}");
    Ok(spec)
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

fn ids(prefix: &str, count: usize) -> Vec<String> {
    let width = count.to_string().len();
    (1..=count)
        .map(|i| format!("{prefix}{i:0width$}"))
        .collect()
}

/// Generates an instance that validates and whose identity arrangement
/// constructs successfully, retrying on fresh streams up to
/// [`MAX_ATTEMPTS`] times.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.check()?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(attempt as u64);
        let Some(instance) = draw(spec, &mut rng) else {
            continue;
        };
        if !validate_instance(&instance).is_empty() {
            continue;
        }
        let problem = Problem::new(instance)?;
        let solvable = construct(&problem, &problem.identity_arrangement())?
            .outcome
            .solution()
            .is_some();
        if solvable {
            return Ok(problem.instance().clone());
        }
    }
    Err(Error::UnsatisfiableSpec(MAX_ATTEMPTS))
}

fn draw(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Option<Instance> {
    let timeslots = spec.calendar.timeslots();

    let group_ids = ids("g", spec.groups);
    let (base, extra) = (spec.students / spec.groups, spec.students % spec.groups);
    let groups: Vec<StudentGroup> = group_ids
        .iter()
        .enumerate()
        .map(|(i, id)| StudentGroup {
            id: id.clone(),
            size: (base + usize::from(i < extra)) as u32,
        })
        .collect();

    let lecturers: Vec<Lecturer> = ids("l", spec.lecturers)
        .into_iter()
        .map(|id| Lecturer { id })
        .collect();
    let mut lecturer_order: Vec<usize> = (0..spec.lecturers).collect();
    lecturer_order.shuffle(rng);

    let unpref_count = (spec.unpref_fraction * timeslots as f64).floor() as usize;
    let mut events = Vec::with_capacity(spec.events);
    let mut attendees = Vec::with_capacity(spec.events);
    for (i, id) in ids("e", spec.events).into_iter().enumerate() {
        let shared = spec.groups >= 2 && rng.gen_bool(SHARED_EVENT_PROBABILITY);
        let mut chosen = index::sample(rng, spec.groups, 1 + usize::from(shared)).into_vec();
        chosen.sort_unstable();
        attendees.push(chosen.iter().map(|&g| groups[g].size).sum::<u32>());
        let mut unpreferred = index::sample(rng, timeslots, unpref_count).into_vec();
        unpreferred.sort_unstable();
        events.push(Event {
            id,
            lecturer: lecturers[lecturer_order[i % spec.lecturers]].id.clone(),
            groups: chosen.into_iter().map(|g| group_ids[g].clone()).collect(),
            fixed: None,
            unpreferred_timeslots: unpreferred,
        });
    }

    let round_up = |c: u32| c.div_ceil(5) * 5;
    let mut rooms: Vec<Room> = ids("r", spec.rooms)
        .into_iter()
        .map(|id| {
            let basis = attendees[below(rng, spec.events)];
            let capacity = round_up(basis + rng.gen_range(0..=10u32));
            Room { id, capacity }
        })
        .collect();
    let largest = attendees.iter().copied().max().unwrap_or(1);
    let biggest_room = (0..rooms.len())
        .max_by_key(|&r| (rooms[r].capacity, std::cmp::Reverse(r)))
        .unwrap();
    if rooms[biggest_room].capacity < largest {
        rooms[biggest_room].capacity = round_up(largest);
    }

    let fixed_count = (spec.fixed_fraction * spec.events as f64).floor() as usize;
    if fixed_count > 0 {
        let mut to_fix = index::sample(rng, spec.events, fixed_count).into_vec();
        to_fix.sort_unstable();
        let mut taken: Vec<(usize, usize)> = Vec::new();
        for e in to_fix {
            let mut slots: Vec<(usize, usize)> = (0..timeslots)
                .flat_map(|t| (0..spec.rooms).map(move |r| (t, r)))
                .collect();
            slots.shuffle(rng);
            let free = slots.into_iter().find(|&(t, r)| {
                rooms[r].capacity >= attendees[e]
                    && taken.iter().all(|&(other, _)| {
                        let o = &events[other];
                        let placed = o.fixed.as_ref().unwrap();
                        placed.timeslot != t
                            || (o.lecturer != events[e].lecturer
                                && placed.room != rooms[r].id
                                && !o.groups.iter().any(|g| events[e].groups.contains(g)))
                    })
            })?;
            events[e].fixed = Some(FixedPlacement {
                timeslot: free.0,
                room: rooms[free.1].id.clone(),
            });
            taken.push((e, free.0));
        }
    }

    Some(Instance {
        id: spec.name.clone(),
        calendar: spec.calendar,
        rooms,
        lecturers,
        groups,
        events,
        weights: CostWeights::default(),
    })
}
