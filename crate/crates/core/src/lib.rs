//! thtn: a toolkit for temporal hierarchical planning in HDDL 2.1.
//!
//! The crate is organised as a pipeline:
//!
//! * [`parser`] reads HDDL domains, problems and timed hierarchical plans;
//! * [`model`] holds the object model (tasks, actions, methods, temporal
//!   task networks and their constraint stores) and validates it;
//! * [`ground`] instantiates schemas over the object pool, discharging
//!   variable constraints and pruning statics;
//! * [`semantics`] executes timed plans (happenings, non-interference,
//!   invariants) and checks ordering, duration and decomposition constraints;
//! * [`decomp`] rewrites networks by method application and replays
//!   decomposition traces;
//! * [`validator`] wires the pipeline into a single plan-validation verdict;
//! * [`planner`] is a small reference solver (decomposition search plus
//!   integer scheduling over the point algebra) whose output the validator
//!   certifies.

pub mod logic;
pub mod model;
pub mod span;
pub mod sym;

pub use logic::{evaluate, ground as ground_formula, holds, substitute, Formula, ObjectPool, State};
pub use model::{Diagnostic, Domain, Problem, Severity};
pub use span::SourceSpan;
pub use sym::Sym;
