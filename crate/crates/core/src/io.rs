//! JSON instance and solution files.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::{cost_of_map, hard_violations, Scope, COST_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{Instance, Placement, Problem, Solution};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, mut contents: String) -> Result<()> {
    contents.push('\n');
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn instance_from_str(text: &str) -> Result<Instance> {
    parse(Path::new("<string>"), text)
}

pub fn instance_to_string(instance: &Instance) -> String {
    serde_json::to_string_pretty(instance).expect("instance serializes")
}

/// Reads an instance file. Structural problems are not errors here; run
/// [`validate_instance`](crate::model::validate_instance) on the result.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    parse(path, &read(path)?)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), instance_to_string(instance))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentEntry {
    pub event: String,
    pub timeslot: usize,
    pub room: String,
}

/// The solution document as stored, before any checking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub instance_id: String,
    pub cost: f64,
    pub assignments: Vec<AssignmentEntry>,
}

impl SolutionFile {
    pub fn from_solution(problem: &Problem, solution: &Solution) -> Self {
        let mut assignments: Vec<AssignmentEntry> = solution
            .placements()
            .iter()
            .enumerate()
            .map(|(e, p)| AssignmentEntry {
                event: problem.event_id(e).to_string(),
                timeslot: p.timeslot,
                room: problem.room_id(p.room).to_string(),
            })
            .collect();
        assignments.sort_by(|a, b| a.event.cmp(&b.event));
        Self {
            instance_id: solution.instance_id().to_string(),
            cost: solution.cost(),
            assignments,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        parse(path, &read(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    /// Resolves ids against `problem`. Unassigned events map to `None`;
    /// unknown ids, duplicates and out-of-range timeslots are errors.
    /// Hard constraints are not checked.
    pub fn resolve(&self, problem: &Problem) -> Result<Vec<Option<Placement>>> {
        if self.instance_id != problem.id() {
            return Err(Error::InstanceMismatch {
                expected: problem.id().to_string(),
                found: self.instance_id.clone(),
            });
        }
        let mut map = vec![None; problem.num_events()];
        let mut seen = HashSet::new();
        for a in &self.assignments {
            let event = problem
                .event_by_id(&a.event)
                .ok_or_else(|| Error::UnknownEvent(a.event.clone()))?;
            let room = problem
                .room_by_id(&a.room)
                .ok_or_else(|| Error::UnknownRoom(a.room.clone()))?;
            if a.timeslot >= problem.timeslots() {
                return Err(Error::TimeslotOutOfRange {
                    timeslot: a.timeslot,
                    timeslots: problem.timeslots(),
                });
            }
            if !seen.insert(event) {
                return Err(Error::DuplicateAssignment {
                    event: a.event.clone(),
                });
            }
            map[event] = Some(Placement {
                timeslot: a.timeslot,
                room,
            });
        }
        Ok(map)
    }

    /// Fully checked [`Solution`]: complete, feasible, fixed events in
    /// place, and stored cost within tolerance of the recomputed one.
    pub fn into_solution(self, problem: &Problem) -> Result<Solution> {
        let map = self.resolve(problem)?;
        if let Some(e) = map.iter().position(Option::is_none) {
            return Err(Error::MissingAssignment(problem.event_id(e).to_string()));
        }
        let recomputed = cost_of_map(problem, &map);
        let violations = hard_violations(problem, &map, Scope::Full);
        if !violations.is_empty() {
            return Err(Error::Infeasible(violations.len()));
        }
        if (recomputed - self.cost).abs() > COST_TOLERANCE {
            return Err(Error::CostMismatch {
                stored: self.cost,
                recomputed,
            });
        }
        Solution::new(problem, map.into_iter().flatten().collect())
    }
}

pub fn solution_to_string(problem: &Problem, solution: &Solution) -> String {
    SolutionFile::from_solution(problem, solution).to_json()
}

pub fn save_solution(problem: &Problem, solution: &Solution, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), solution_to_string(problem, solution))
}

pub fn load_solution(path: impl AsRef<Path>, problem: &Problem) -> Result<Solution> {
    SolutionFile::load(path)?.into_solution(problem)
}
