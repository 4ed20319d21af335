//! Feasibility recovery for conflict-free vehicle plans.
//!
//! When a fleet drifts from its nominal conflict-free plan, the vehicles that
//! are late or early may collide. This crate computes optimal corrective
//! delays (and, when the vehicles can speed up, corrective anticipations) that
//! restore a conflict-free schedule. Every recovery problem is a system of
//! difference constraints over the conflict graph, so each solve reduces to one
//! or two seeded shortest-path runs.
//!
//! Module map:
//!
//! - [`model`]: conflict graphs, instances, plans, validation and objectives.
//! - [`sssp`]: the seeded one-to-all shortest-path engine and its
//!   label-correcting cross-check.
//! - [`delay`]: recovery with corrective delays only.
//! - [`anticipation`]: recovery with delays and anticipations (two-stage).
//! - [`nominal`]: deviations and slacks derived from a nominal timetable.
//! - [`generator`]: reproducible random instances.
//! - [`lp`]: an independent bounded-variable simplex used as an oracle.
//! - [`format`]: the JSON instance and solution file formats.

// `!(a <= b)` is used on purpose so that NaN counts as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod anticipation;
pub mod delay;
pub mod error;
pub mod format;
pub mod generator;
pub mod lp;
pub mod model;
pub mod nominal;
pub mod sssp;

pub use anticipation::{
    anticipation_bound, reverse_graph, solve_anticipation_delay, solve_anticipations_only,
    AdSolution, SpeedModel,
};
pub use delay::{
    build_core_auxiliary, build_lateness_extension, build_makespan_extension, solve_delay,
    AuxiliaryGraph, ExtraVertex,
};
pub use error::RecoveryError;
pub use generator::{generate, GenConfig};
pub use model::{
    check_feasibility, dev_percent, evaluate_objective, uniform_delay_solution, validate_instance,
    ConflictArc, ConflictGraph, Location, Mode, Objective, RecoveryInstance, RecoveryPlan,
    ValidationReport, Violation, ViolationKind, DEFAULT_TOLERANCE,
};
pub use sssp::{
    shortest_paths_label_correcting, shortest_paths_seeded, SeedLabels, WeightedDigraph,
};

/// Solves `instance` in the requested mode and returns the recovery plan.
pub fn solve(
    instance: &RecoveryInstance,
    objective: Objective,
    mode: Mode,
) -> Result<RecoveryPlan, RecoveryError> {
    match mode {
        Mode::Delay => solve_delay(instance, objective),
        Mode::AnticipationDelay => solve_anticipation_delay(instance, objective).map(|s| s.plan),
    }
}
