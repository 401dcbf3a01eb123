//! Brute-force reference implementations used as test oracles.
//!
//! Everything here works on the raw `Instance` (string ids, linear
//! lookups), checks feasibility by comparing every pair of placed events,
//! and recosts the whole assignment from scratch. It shares no code with
//! the solver beyond the data types.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vnstt::model::{
    validate_instance, Calendar, CostWeights, Event, FixedPlacement, Instance, Lecturer, Room,
    StudentGroup,
};

pub const TOL: f64 = 1e-9;

/// (timeslot, room index)
pub type Slot = (usize, usize);

/// (timeslot, room index, partial cost after placing there)
pub type Candidate = (usize, usize, f64);

pub fn attendees(inst: &Instance, e: usize) -> u64 {
    inst.events[e]
        .groups
        .iter()
        .map(|g| u64::from(inst.groups.iter().find(|x| &x.id == g).unwrap().size))
        .sum()
}

fn room_index(inst: &Instance, id: &str) -> usize {
    inst.rooms.iter().position(|r| r.id == id).unwrap()
}

pub fn fixed_slot(inst: &Instance, e: usize) -> Option<Slot> {
    inst.events[e]
        .fixed
        .as_ref()
        .map(|f| (f.timeslot, room_index(inst, &f.room)))
}

pub fn penalty(inst: &Instance, e: usize, (t, r): Slot) -> f64 {
    let periods = inst.calendar.periods_per_day;
    let late = if periods == 1 {
        0.0
    } else {
        (t % periods) as f64 / (periods - 1) as f64
    };
    let cap = f64::from(inst.rooms[r].capacity);
    let slack = (cap - attendees(inst, e) as f64) / cap;
    let unpref = if inst.events[e].unpreferred_timeslots.contains(&t) {
        1.0
    } else {
        0.0
    };
    let w = inst.weights;
    w.w_late * late + w.w_slack * slack + w.w_unpref * unpref
}

/// Sum of penalties of placed events, in event order.
pub fn cost(inst: &Instance, map: &[Option<Slot>]) -> f64 {
    let mut total = 0.0;
    for (e, slot) in map.iter().enumerate() {
        if let Some(s) = slot {
            total += penalty(inst, e, *s);
        }
    }
    total
}

/// No clash between any two placed events and every room big enough.
pub fn feasible(inst: &Instance, map: &[Option<Slot>]) -> bool {
    for (a, sa) in map.iter().enumerate() {
        let Some((ta, ra)) = *sa else { continue };
        if attendees(inst, a) > u64::from(inst.rooms[ra].capacity) {
            return false;
        }
        for (b, sb) in map.iter().enumerate().skip(a + 1) {
            let Some((tb, rb)) = *sb else { continue };
            if ta != tb {
                continue;
            }
            let (ea, eb) = (&inst.events[a], &inst.events[b]);
            if ra == rb
                || ea.lecturer == eb.lecturer
                || ea.groups.iter().any(|g| eb.groups.contains(g))
            {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct Greedy {
    pub map: Vec<Option<Slot>>,
    pub failed: Option<usize>,
    pub evaluations: u64,
    /// Per committed event: every feasible option (timeslot, room, cost).
    pub steps: Vec<(usize, Vec<Candidate>)>,
}

/// Greedy construction by exhaustive scan of every (timeslot, room) at
/// every step.
pub fn construct(inst: &Instance, arrangement: &[usize]) -> Greedy {
    let n = inst.events.len();
    let mut map: Vec<Option<Slot>> = (0..n).map(|e| fixed_slot(inst, e)).collect();
    let mut out = Greedy {
        map: Vec::new(),
        failed: None,
        evaluations: 0,
        steps: Vec::new(),
    };
    for &e in arrangement {
        if inst.events[e].fixed.is_some() {
            continue;
        }
        let mut options = Vec::new();
        for t in 0..inst.calendar.timeslots() {
            let mut chosen: Option<usize> = None;
            for r in 0..inst.rooms.len() {
                map[e] = Some((t, r));
                if feasible(inst, &map) {
                    let better = match chosen {
                        None => true,
                        Some(c) => {
                            let (rc, rr) = (&inst.rooms[c], &inst.rooms[r]);
                            (rr.capacity, &rr.id) < (rc.capacity, &rc.id)
                        }
                    };
                    if better {
                        chosen = Some(r);
                    }
                }
                map[e] = None;
            }
            if let Some(r) = chosen {
                map[e] = Some((t, r));
                options.push((t, r, cost(inst, &map)));
                map[e] = None;
                out.evaluations += 1;
            }
        }
        if options.is_empty() {
            out.failed = Some(e);
            out.map = map;
            return out;
        }
        let min = options.iter().map(|o| o.2).fold(f64::INFINITY, f64::min);
        let &(t, r, _) = options.iter().find(|o| o.2 <= min + TOL).unwrap();
        map[e] = Some((t, r));
        out.steps.push((e, options));
    }
    out.map = map;
    out
}

fn cost_cell(c: Option<f64>) -> String {
    match c {
        Some(c) => format!("{c:.6},true"),
        None => ",false".to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct Replay {
    pub trace_csv: String,
    pub final_map: Option<Vec<Slot>>,
    pub final_cost: Option<f64>,
    pub constructs: usize,
    pub evaluations: u64,
}

/// Re-enacts the rotation schedule explicitly: contiguous blocks, every
/// left rotation of each block in turn, block left at its first cheapest
/// rotation, then one final construction.
pub fn replay(inst: &Instance, k: usize) -> Replay {
    let n = inst.events.len();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut start = 0;
    for i in 0..k {
        let len = n / k + if i < n % k { 1 } else { 0 };
        blocks.push((start..start + len).collect());
        start += len;
    }
    let mut csv = String::from("k,structure,rotation,leading_event,cost,feasible\n");
    let mut constructs = 0;
    let mut evaluations = 0;
    for i in 0..k {
        let entry = blocks[i].clone();
        let len = entry.len();
        let mut costs = Vec::new();
        for r in 0..len {
            let rotated: Vec<usize> = (0..len).map(|j| entry[(j + r) % len]).collect();
            let mut arrangement = Vec::new();
            for (b, block) in blocks.iter().enumerate() {
                arrangement.extend(if b == i { &rotated } else { block });
            }
            let g = construct(inst, &arrangement);
            constructs += 1;
            evaluations += g.evaluations;
            let c = g.failed.is_none().then(|| cost(inst, &g.map));
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                k,
                i + 1,
                r,
                rotated[0] + 1,
                cost_cell(c)
            ));
            costs.push(c);
        }
        let min = costs.iter().flatten().fold(f64::INFINITY, |a, &b| a.min(b));
        let best = costs
            .iter()
            .position(|c| matches!(c, Some(c) if *c <= min + TOL))
            .unwrap_or(0);
        blocks[i] = (0..len).map(|j| entry[(j + best) % len]).collect();
    }
    let arrangement: Vec<usize> = blocks.concat();
    let g = construct(inst, &arrangement);
    constructs += 1;
    evaluations += g.evaluations;
    let final_cost = g.failed.is_none().then(|| cost(inst, &g.map));
    csv.push_str(&format!(
        "{},0,0,{},{}\n",
        k,
        arrangement[0] + 1,
        cost_cell(final_cost)
    ));
    Replay {
        trace_csv: csv,
        final_map: final_cost.map(|_| g.map.iter().map(|s| s.unwrap()).collect()),
        final_cost,
        constructs,
        evaluations,
    }
}

/// The solution document, laid out by hand.
pub fn solution_json(inst: &Instance, map: &[Slot], cost: f64) -> String {
    let q = |s: &str| serde_json::to_string(s).unwrap();
    let mut order: Vec<usize> = (0..map.len()).collect();
    order.sort_by(|&a, &b| inst.events[a].id.cmp(&inst.events[b].id));
    let entries: Vec<String> = order
        .iter()
        .map(|&e| {
            format!(
                "    {{\n      \"event\": {},\n      \"timeslot\": {},\n      \"room\": {}\n    }}",
                q(&inst.events[e].id),
                map[e].0,
                q(&inst.rooms[map[e].1].id)
            )
        })
        .collect();
    format!(
        "{{\n  \"instance_id\": {},\n  \"cost\": {},\n  \"assignments\": [\n{}\n  ]\n}}",
        q(&inst.id),
        serde_json::to_string(&cost).unwrap(),
        entries.join(",\n")
    )
}

/// No single relocation of a non-fixed event to any other feasible
/// (timeslot, room) is cheaper by more than `TOL`.
pub fn is_local_optimum(inst: &Instance, map: &[Slot]) -> bool {
    let mut m: Vec<Option<Slot>> = map.iter().copied().map(Some).collect();
    let base = cost(inst, &m);
    for e in 0..map.len() {
        if inst.events[e].fixed.is_some() {
            continue;
        }
        for t in 0..inst.calendar.timeslots() {
            for r in 0..inst.rooms.len() {
                if (t, r) == map[e] {
                    continue;
                }
                m[e] = Some((t, r));
                if feasible(inst, &m) && cost(inst, &m) < base - TOL {
                    return false;
                }
            }
        }
        m[e] = Some(map[e]);
    }
    true
}

/// Small random instance: `events` events, at most `max_timeslots`
/// timeslots, up to 3 rooms/lecturers/groups, occasional fixed events.
pub fn random_micro_instance(seed: u64, events: usize, max_timeslots: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let periods = rng.gen_range(1..=3usize.min(max_timeslots));
    let days = rng.gen_range(1..=(max_timeslots / periods).max(1));
    let rooms: Vec<Room> = (0..rng.gen_range(1..=3))
        .map(|i| Room {
            id: format!("r{i}"),
            capacity: [10, 15, 20, 30][rng.gen_range(0..4)],
        })
        .collect();
    let lecturers: Vec<Lecturer> = (0..rng.gen_range(1..=3))
        .map(|i| Lecturer {
            id: format!("l{i}"),
        })
        .collect();
    let groups: Vec<StudentGroup> = (0..rng.gen_range(1..=3))
        .map(|i| StudentGroup {
            id: format!("g{i}"),
            size: rng.gen_range(5..=15),
        })
        .collect();
    let timeslots = days * periods;
    let mut evs: Vec<Event> = (0..events)
        .map(|i| {
            let first = rng.gen_range(0..groups.len());
            let mut gs = vec![groups[first].id.clone()];
            if groups.len() > 1 && rng.gen_bool(0.3) {
                let second = (first + rng.gen_range(1..groups.len())) % groups.len();
                gs.push(groups[second].id.clone());
            }
            Event {
                id: format!("e{i}"),
                lecturer: lecturers[rng.gen_range(0..lecturers.len())].id.clone(),
                groups: gs,
                fixed: None,
                unpreferred_timeslots: (0..timeslots).filter(|_| rng.gen_bool(0.25)).collect(),
            }
        })
        .collect();
    for e in evs.iter_mut() {
        if rng.gen_bool(0.15) {
            e.fixed = Some(FixedPlacement {
                timeslot: rng.gen_range(0..timeslots),
                room: rooms[rng.gen_range(0..rooms.len())].id.clone(),
            });
        }
    }
    let weights = if rng.gen_bool(0.5) {
        CostWeights::default()
    } else {
        let w = [0.0, 0.25, 1.0, 3.0];
        CostWeights {
            w_late: w[rng.gen_range(0..4)],
            w_slack: w[rng.gen_range(0..4)],
            w_unpref: w[rng.gen_range(0..4)],
        }
    };
    let mut inst = Instance {
        id: format!("micro-{seed}"),
        calendar: Calendar::new(days, periods),
        rooms,
        lecturers,
        groups,
        events: evs,
        weights,
    };
    if !validate_instance(&inst).is_empty() {
        for e in inst.events.iter_mut() {
            e.fixed = None;
        }
    }
    assert!(validate_instance(&inst).is_empty());
    inst
}

/// A random complete feasible assignment, if one is found by sampling.
pub fn random_feasible(inst: &Instance, seed: u64) -> Option<Vec<Slot>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = inst.events.len();
    'attempt: for _ in 0..200 {
        let mut map: Vec<Option<Slot>> = (0..n).map(|e| fixed_slot(inst, e)).collect();
        for e in 0..n {
            if map[e].is_some() {
                continue;
            }
            let mut slots: Vec<Slot> = (0..inst.calendar.timeslots())
                .flat_map(|t| (0..inst.rooms.len()).map(move |r| (t, r)))
                .collect();
            while !slots.is_empty() {
                let s = slots.swap_remove(rng.gen_range(0..slots.len()));
                map[e] = Some(s);
                if feasible(inst, &map) {
                    break;
                }
                map[e] = None;
            }
            if map[e].is_none() {
                continue 'attempt;
            }
        }
        return Some(map.into_iter().map(Option::unwrap).collect());
    }
    None
}
