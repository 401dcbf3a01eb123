use std::path::PathBuf;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed JSON or a schema mismatch; `message` carries serde's
    /// line/column and field context.
    #[error("{path}: parse error: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid instance ({} violation(s)): {}", .0.len(), first_violation(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("unknown event id `{0}`")]
    UnknownEvent(String),

    #[error("unknown room id `{0}`")]
    UnknownRoom(String),

    #[error("event `{event}` listed more than once")]
    DuplicateAssignment { event: String },

    #[error("event `{0}` has no assignment")]
    MissingAssignment(String),

    #[error("timeslot {timeslot} out of range [0, {timeslots})")]
    TimeslotOutOfRange { timeslot: usize, timeslots: usize },

    #[error("solution is for instance `{found}`, expected `{expected}`")]
    InstanceMismatch { expected: String, found: String },

    #[error("stored cost {stored} differs from recomputed cost {recomputed}")]
    CostMismatch { stored: f64, recomputed: f64 },

    #[error("solution violates {0} hard constraint(s)")]
    Infeasible(usize),

    #[error("fixed event `{0}` is not at its fixed placement")]
    FixedMoved(String),

    #[error("arrangement is not a permutation of the instance events")]
    NotAPermutation,

    #[error("k = {k} out of range: need k >= 2 and k <= N/2 = {max} (N = {events})")]
    KOutOfRange { k: usize, max: usize, events: usize },

    #[error("relative gap undefined for heuristic value 0")]
    ZeroHeuristicValue,

    #[error("trace records do not cover every rotation of the structure")]
    IncompleteRecords,

    #[error("no construction succeeded")]
    AllConstructionsFailed,

    #[error("unknown preset `{0}` (valid presets: N18, N90, N130)")]
    UnknownPreset(String),

    #[error("invalid generator spec: {0}")]
    InvalidGenSpec(String),

    #[error("could not generate a solvable instance after {0} attempts")]
    UnsatisfiableSpec(usize),
}

fn first_violation(v: &[Violation]) -> String {
    v.first().map(|v| v.to_string()).unwrap_or_default()
}
