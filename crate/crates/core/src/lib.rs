//! University course timetabling by neighborhood-structure rotation.
//!
//! The solver splits the event order into `k` blocks, rotates each block
//! through a full circle while rebuilding the timetable greedily after
//! every shift, and keeps each block at its best rotation. See
//! [`vns::solve_vns`].
//!
//! ```
//! use vnstt::{gen, model::Problem, vns};
//!
//! let instance = gen::generate(&gen::preset("N18", 7).unwrap()).unwrap();
//! let problem = Problem::new(instance).unwrap();
//! let run = vns::solve_vns(&problem, 2).unwrap();
//! assert_eq!(run.construct_calls, 19);
//! assert!(run.solution().is_ok());
//! ```

pub mod construct;
pub mod cost;
pub mod error;
pub mod gen;
pub mod io;
pub mod model;
pub mod trace;
pub mod vns;

pub use error::{Error, Result};
pub use model::{Instance, Placement, Problem, Solution};
