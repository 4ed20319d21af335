//! Domain types shared by the solvers, plus validation, feasibility checking
//! and objective evaluation.
//!
//! Vehicles are indexed from 0. A conflict arc `(h, k, s)` states that vehicle
//! `h` may be shifted at most `s` time units later than vehicle `k` without the
//! two conflicting; a missing arc means the pair can never conflict.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::RecoveryError;

/// Absolute tolerance used by feasibility checks unless the caller overrides it.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConflictArc {
    pub from: usize,
    pub to: usize,
    pub slack: f64,
}

impl ConflictArc {
    pub fn new(from: usize, to: usize, slack: f64) -> Self {
        Self { from, to, slack }
    }
}

/// Vehicles as vertices, finite-slack ordered pairs as weighted arcs.
///
/// The graph may be cyclic and disconnected. Construction does not validate;
/// use [`ConflictGraph::violations`] or [`validate_instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictGraph {
    pub vehicle_count: usize,
    pub arcs: Vec<ConflictArc>,
}

impl ConflictGraph {
    pub fn new(vehicle_count: usize, arcs: Vec<ConflictArc>) -> Self {
        Self {
            vehicle_count,
            arcs,
        }
    }

    pub fn empty(vehicle_count: usize) -> Self {
        Self::new(vehicle_count, Vec::new())
    }

    /// The same vehicles with every arc `(h, k, s)` turned into `(k, h, s)`.
    pub fn reversed(&self) -> Self {
        Self {
            vehicle_count: self.vehicle_count,
            arcs: self
                .arcs
                .iter()
                .map(|a| ConflictArc::new(a.to, a.from, a.slack))
                .collect(),
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.vehicle_count;
        let mut seen = HashSet::with_capacity(self.arcs.len());
        for a in &self.arcs {
            let loc = Location::Arc {
                from: a.from,
                to: a.to,
            };
            if a.from >= n || a.to >= n {
                out.push(Violation::new(
                    ViolationKind::IndexOutOfRange,
                    loc,
                    a.from.max(a.to) as f64,
                ));
                continue;
            }
            if a.from == a.to {
                out.push(Violation::new(ViolationKind::SelfLoop, loc, 0.0));
            }
            if !seen.insert((a.from, a.to)) {
                out.push(Violation::new(ViolationKind::DuplicateArc, loc, 0.0));
            }
            if !a.slack.is_finite() {
                out.push(Violation::new(ViolationKind::NonFiniteValue, loc, a.slack));
            } else if a.slack < 0.0 {
                out.push(Violation::new(ViolationKind::NegativeSlack, loc, -a.slack));
            }
        }
        out
    }
}

/// The four performance measures a recovery can minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `z1 = Σ u_h`
    TotalDelay,
    /// `z2 = Σ w_h u_h`
    WeightedDelay,
    /// `z3 = max_h (c_h + u_h)`
    Makespan,
    /// `z4 = Σ max(0, u_h - ρ_h)`
    TotalLateness,
}

impl Objective {
    pub const ALL: [Objective; 4] = [
        Objective::TotalDelay,
        Objective::WeightedDelay,
        Objective::Makespan,
        Objective::TotalLateness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::TotalDelay => "total-delay",
            Objective::WeightedDelay => "weighted-delay",
            Objective::Makespan => "makespan",
            Objective::TotalLateness => "lateness",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "total-delay" | "delay" | "z1" => Ok(Objective::TotalDelay),
            "weighted-delay" | "weighted" | "z2" => Ok(Objective::WeightedDelay),
            "makespan" | "z3" => Ok(Objective::Makespan),
            "lateness" | "total-lateness" | "z4" => Ok(Objective::TotalLateness),
            other => Err(format!("unknown objective `{other}`")),
        }
    }
}

/// Which corrective actions are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Delay,
    AnticipationDelay,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Delay, Mode::AnticipationDelay];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Delay => "delay",
            Mode::AnticipationDelay => "anticipation-delay",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delay" | "d" => Ok(Mode::Delay),
            "anticipation-delay" | "ad" => Ok(Mode::AnticipationDelay),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Everything a solver needs: the conflict graph, the observed deviations and
/// the data of whichever objective is going to be minimized.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryInstance {
    pub graph: ConflictGraph,
    /// Observed deviation `d_h`; positive means late.
    pub deviations: Vec<f64>,
    pub weights: Option<Vec<f64>>,
    pub completion_times: Option<Vec<f64>>,
    pub due_dates: Option<Vec<f64>>,
    /// Upper bound `L_h` on the anticipation of each vehicle.
    pub anticipation_bounds: Option<Vec<f64>>,
    pub alpha: f64,
    pub beta: f64,
}

impl RecoveryInstance {
    pub const DEFAULT_ALPHA: f64 = 1000.0;
    pub const DEFAULT_BETA: f64 = 1.0;

    pub fn new(graph: ConflictGraph, deviations: Vec<f64>) -> Self {
        Self {
            graph,
            deviations,
            weights: None,
            completion_times: None,
            due_dates: None,
            anticipation_bounds: None,
            alpha: Self::DEFAULT_ALPHA,
            beta: Self::DEFAULT_BETA,
        }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    pub fn with_completion_times(mut self, completion_times: Vec<f64>) -> Self {
        self.completion_times = Some(completion_times);
        self
    }

    pub fn with_due_dates(mut self, due_dates: Vec<f64>) -> Self {
        self.due_dates = Some(due_dates);
        self
    }

    pub fn with_anticipation_bounds(mut self, bounds: Vec<f64>) -> Self {
        self.anticipation_bounds = Some(bounds);
        self
    }

    pub fn with_costs(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn vehicle_count(&self) -> usize {
        self.graph.vehicle_count
    }

    pub(crate) fn require_weights(&self) -> Result<&[f64], RecoveryError> {
        self.weights
            .as_deref()
            .ok_or(RecoveryError::MissingData("weights"))
    }

    pub(crate) fn require_completion_times(&self) -> Result<&[f64], RecoveryError> {
        self.completion_times
            .as_deref()
            .ok_or(RecoveryError::MissingData("completion_times"))
    }

    pub(crate) fn require_due_dates(&self) -> Result<&[f64], RecoveryError> {
        self.due_dates
            .as_deref()
            .ok_or(RecoveryError::MissingData("due_dates"))
    }

    pub(crate) fn require_anticipation_bounds(&self) -> Result<&[f64], RecoveryError> {
        self.anticipation_bounds
            .as_deref()
            .ok_or(RecoveryError::MissingData("anticipation_bounds"))
    }
}

/// Output of every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryPlan {
    /// Net shift of each vehicle w.r.t. the nominal plan after recovery.
    pub u: Vec<f64>,
    /// Corrective anticipations; all zero in delay-only mode.
    pub x: Vec<f64>,
    /// Corrective action `u_h - d_h`.
    pub delta: Vec<f64>,
    /// Per-vehicle lateness, present when the lateness objective was solved.
    pub lateness: Option<Vec<f64>>,
    pub objective_value: f64,
    /// `alpha * z + beta * Σ x`, anticipation-delay mode only.
    pub combined_value: Option<f64>,
}

impl RecoveryPlan {
    /// Builds a plan from shifts, filling `delta = u - d`.
    pub fn from_shifts(deviations: &[f64], u: Vec<f64>, x: Vec<f64>) -> Self {
        let delta = u.iter().zip(deviations).map(|(u, d)| u - d).collect();
        Self {
            u,
            x,
            delta,
            lateness: None,
            objective_value: 0.0,
            combined_value: None,
        }
    }

    pub fn total_anticipation(&self) -> f64 {
        self.x.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    EmptyFleet,
    LengthMismatch,
    NonFiniteValue,
    IndexOutOfRange,
    SelfLoop,
    DuplicateArc,
    NegativeSlack,
    NegativeWeight,
    NegativeDueDate,
    NegativeAnticipationBound,
    NonPositiveAlpha,
    NegativeBeta,
    MissingWeights,
    MissingCompletionTimes,
    MissingDueDates,
    MissingAnticipationBounds,
    /// A conflict arc constraint does not hold.
    ConflictArc,
    /// A vehicle is shifted less than its observed deviation.
    BelowDeviation,
    NegativeAnticipation,
    AnticipationAboveBound,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::EmptyFleet => "empty fleet",
            ViolationKind::LengthMismatch => "length mismatch",
            ViolationKind::NonFiniteValue => "non-finite value",
            ViolationKind::IndexOutOfRange => "index out of range",
            ViolationKind::SelfLoop => "self-loop",
            ViolationKind::DuplicateArc => "duplicate arc",
            ViolationKind::NegativeSlack => "negative slack",
            ViolationKind::NegativeWeight => "negative weight",
            ViolationKind::NegativeDueDate => "negative due date",
            ViolationKind::NegativeAnticipationBound => "negative anticipation bound",
            ViolationKind::NonPositiveAlpha => "alpha must be positive",
            ViolationKind::NegativeBeta => "beta must be nonnegative",
            ViolationKind::MissingWeights => "missing weights",
            ViolationKind::MissingCompletionTimes => "missing completion_times",
            ViolationKind::MissingDueDates => "missing due_dates",
            ViolationKind::MissingAnticipationBounds => "missing anticipation_bounds",
            ViolationKind::ConflictArc => "conflict constraint violated",
            ViolationKind::BelowDeviation => "shift below observed deviation",
            ViolationKind::NegativeAnticipation => "negative anticipation",
            ViolationKind::AnticipationAboveBound => "anticipation above bound",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Instance,
    Vehicle(usize),
    Arc { from: usize, to: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Instance => f.write_str("instance"),
            Location::Vehicle(h) => write!(f, "vehicle {h}"),
            Location::Arc { from, to } => write!(f, "arc ({from},{to})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
    pub magnitude: f64,
}

impl Violation {
    pub fn new(kind: ViolationKind, location: Location, magnitude: f64) -> Self {
        Self {
            kind,
            location,
            magnitude,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.kind, self.location)?;
        if self.magnitude != 0.0 {
            write!(f, " (by {})", self.magnitude)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub(crate) fn into_result(self) -> Result<(), RecoveryError> {
        if self.ok() {
            Ok(())
        } else {
            Err(RecoveryError::InvalidInstance(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_vector(
    out: &mut Vec<Violation>,
    values: &[f64],
    n: usize,
    negative: Option<ViolationKind>,
) {
    if values.len() != n {
        out.push(Violation::new(
            ViolationKind::LengthMismatch,
            Location::Instance,
            values.len() as f64,
        ));
        return;
    }
    for (h, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            out.push(Violation::new(
                ViolationKind::NonFiniteValue,
                Location::Vehicle(h),
                v,
            ));
        } else if let Some(kind) = negative {
            if v < 0.0 {
                out.push(Violation::new(kind, Location::Vehicle(h), -v));
            }
        }
    }
}

/// Reports every structural problem of `instance` and every piece of data
/// missing for solving `objective` in `mode`.
pub fn validate_instance(
    instance: &RecoveryInstance,
    objective: Objective,
    mode: Mode,
) -> ValidationReport {
    let n = instance.vehicle_count();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Violation::new(
            ViolationKind::EmptyFleet,
            Location::Instance,
            0.0,
        ));
    }
    out.extend(instance.graph.violations());
    check_vector(&mut out, &instance.deviations, n, None);
    if let Some(w) = &instance.weights {
        check_vector(&mut out, w, n, Some(ViolationKind::NegativeWeight));
    }
    if let Some(c) = &instance.completion_times {
        check_vector(&mut out, c, n, None);
    }
    if let Some(rho) = &instance.due_dates {
        check_vector(&mut out, rho, n, Some(ViolationKind::NegativeDueDate));
    }
    if let Some(l) = &instance.anticipation_bounds {
        check_vector(
            &mut out,
            l,
            n,
            Some(ViolationKind::NegativeAnticipationBound),
        );
    }
    if !(instance.alpha > 0.0 && instance.alpha.is_finite()) {
        out.push(Violation::new(
            ViolationKind::NonPositiveAlpha,
            Location::Instance,
            instance.alpha,
        ));
    }
    if !(instance.beta >= 0.0 && instance.beta.is_finite()) {
        out.push(Violation::new(
            ViolationKind::NegativeBeta,
            Location::Instance,
            instance.beta,
        ));
    }

    let missing = match objective {
        Objective::TotalDelay => None,
        Objective::WeightedDelay => instance
            .weights
            .is_none()
            .then_some(ViolationKind::MissingWeights),
        Objective::Makespan => instance
            .completion_times
            .is_none()
            .then_some(ViolationKind::MissingCompletionTimes),
        Objective::TotalLateness => instance
            .due_dates
            .is_none()
            .then_some(ViolationKind::MissingDueDates),
    };
    if let Some(kind) = missing {
        out.push(Violation::new(kind, Location::Instance, 0.0));
    }
    if mode == Mode::AnticipationDelay && instance.anticipation_bounds.is_none() {
        out.push(Violation::new(
            ViolationKind::MissingAnticipationBounds,
            Location::Instance,
            0.0,
        ));
    }
    ValidationReport { violations: out }
}

/// Shifts every vehicle by the largest observed deviation.
///
/// Every conflict constraint then has a zero left-hand side, so the plan is
/// always feasible. `objective_value` is the total delay of the plan.
pub fn uniform_delay_solution(instance: &RecoveryInstance) -> RecoveryPlan {
    let n = instance.vehicle_count();
    let top = instance
        .deviations
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut plan = RecoveryPlan::from_shifts(&instance.deviations, vec![top; n], vec![0.0; n]);
    plan.objective_value = plan.u.iter().sum();
    plan
}

/// Checks the conflict, deviation and anticipation-bound constraints of `plan`.
///
/// In delay-only mode `x` is ignored. Dimension mismatches are errors, not
/// violations.
pub fn check_feasibility(
    instance: &RecoveryInstance,
    plan: &RecoveryPlan,
    mode: Mode,
    tolerance: f64,
) -> Result<ValidationReport, RecoveryError> {
    let n = instance.vehicle_count();
    let dims = [
        ("deviations", instance.deviations.len()),
        ("u", plan.u.len()),
        ("x", plan.x.len()),
    ];
    for (what, found) in dims {
        if found != n {
            return Err(RecoveryError::DimensionMismatch {
                what,
                expected: n,
                found,
            });
        }
    }
    let bounds = match mode {
        Mode::Delay => None,
        Mode::AnticipationDelay => {
            let l = instance.require_anticipation_bounds()?;
            if l.len() != n {
                return Err(RecoveryError::DimensionMismatch {
                    what: "anticipation_bounds",
                    expected: n,
                    found: l.len(),
                });
            }
            Some(l)
        }
    };

    let net = |h: usize| match mode {
        Mode::Delay => plan.u[h],
        Mode::AnticipationDelay => plan.u[h] - plan.x[h],
    };

    let mut out = Vec::new();
    for a in &instance.graph.arcs {
        if a.from >= n || a.to >= n {
            return Err(RecoveryError::DimensionMismatch {
                what: "arc endpoint",
                expected: n,
                found: a.from.max(a.to),
            });
        }
        let lhs = net(a.from) - net(a.to);
        // NaN-safe: a NaN shift is reported too.
        if !(lhs <= a.slack + tolerance) {
            out.push(Violation::new(
                ViolationKind::ConflictArc,
                Location::Arc {
                    from: a.from,
                    to: a.to,
                },
                lhs - a.slack,
            ));
        }
    }
    for h in 0..n {
        let d = instance.deviations[h];
        if !(plan.u[h] >= d - tolerance) {
            out.push(Violation::new(
                ViolationKind::BelowDeviation,
                Location::Vehicle(h),
                d - plan.u[h],
            ));
        }
        if let Some(l) = bounds {
            if !(plan.x[h] >= -tolerance) {
                out.push(Violation::new(
                    ViolationKind::NegativeAnticipation,
                    Location::Vehicle(h),
                    -plan.x[h],
                ));
            }
            if !(plan.x[h] <= l[h] + tolerance) {
                out.push(Violation::new(
                    ViolationKind::AnticipationAboveBound,
                    Location::Vehicle(h),
                    plan.x[h] - l[h],
                ));
            }
        }
    }
    Ok(ValidationReport { violations: out })
}

/// Evaluates `objective` at the shifts `u`.
pub fn objective_at(
    instance: &RecoveryInstance,
    u: &[f64],
    objective: Objective,
) -> Result<f64, RecoveryError> {
    let n = instance.vehicle_count();
    if u.len() != n {
        return Err(RecoveryError::DimensionMismatch {
            what: "u",
            expected: n,
            found: u.len(),
        });
    }
    let data = match objective {
        Objective::TotalDelay => None,
        Objective::WeightedDelay => Some(("weights", instance.require_weights()?)),
        Objective::Makespan => Some(("completion_times", instance.require_completion_times()?)),
        Objective::TotalLateness => Some(("due_dates", instance.require_due_dates()?)),
    };
    if let Some((what, values)) = data {
        if values.len() != n {
            return Err(RecoveryError::DimensionMismatch {
                what,
                expected: n,
                found: values.len(),
            });
        }
    }
    let value = match (objective, data) {
        (Objective::TotalDelay, _) => u.iter().sum(),
        (Objective::WeightedDelay, Some((_, w))) => u.iter().zip(w).map(|(u, w)| w * u).sum(),
        (Objective::Makespan, Some((_, c))) => u
            .iter()
            .zip(c)
            .map(|(u, c)| c + u)
            .fold(f64::NEG_INFINITY, f64::max),
        (Objective::TotalLateness, Some((_, rho))) => {
            u.iter().zip(rho).map(|(u, rho)| (u - rho).max(0.0)).sum()
        }
        _ => unreachable!("objective data checked above"),
    };
    Ok(value)
}

/// Evaluates `objective` at the shifts of `plan`. In anticipation-delay mode
/// the caller composes `alpha * z + beta * Σ x`.
pub fn evaluate_objective(
    instance: &RecoveryInstance,
    plan: &RecoveryPlan,
    objective: Objective,
) -> Result<f64, RecoveryError> {
    objective_at(instance, &plan.u, objective)
}

/// Percentage improvement of the anticipation-delay objective over the
/// delay-only one: `100 (z_d - z_ad) / |z_d|`.
///
/// Returns `Some(0.0)` when both values are zero and `None` when only the
/// delay-only value is.
pub fn dev_percent(z_delay: f64, z_anticipation: f64) -> Option<f64> {
    if z_delay == 0.0 {
        return (z_anticipation == 0.0).then_some(0.0);
    }
    Some(100.0 * (z_delay - z_anticipation) / z_delay.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cascade() -> RecoveryInstance {
        let arcs = vec![
            ConflictArc::new(0, 1, 1.0),
            ConflictArc::new(1, 2, 5.0),
            ConflictArc::new(1, 3, 2.0),
            ConflictArc::new(3, 2, 1.0),
        ];
        RecoveryInstance::new(
            ConflictGraph::new(7, arcs),
            vec![5.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        )
    }

    #[test]
    fn well_formed_instance_validates() {
        let inst = RecoveryInstance::new(
            ConflictGraph::new(3, vec![ConflictArc::new(0, 1, 2.0)]),
            vec![1.0, 0.0, -1.0],
        );
        let report = validate_instance(&inst, Objective::TotalDelay, Mode::Delay);
        assert!(report.ok(), "{report}");
    }

    #[test]
    fn negative_slack_is_reported() {
        let inst = RecoveryInstance::new(
            ConflictGraph::new(2, vec![ConflictArc::new(0, 1, -1.0)]),
            vec![0.0, 0.0],
        );
        let report = validate_instance(&inst, Objective::TotalDelay, Mode::Delay);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::NegativeSlack);
        assert_eq!(
            report.violations[0].to_string(),
            "negative slack at arc (0,1) (by 1)"
        );
    }

    #[test]
    fn missing_objective_data_is_reported() {
        let inst = cascade();
        let report = validate_instance(&inst, Objective::Makespan, Mode::Delay);
        assert!(!report.ok());
        assert_eq!(report.violations.len(), 1);
        assert_eq!(
            report.violations[0].kind.as_str(),
            "missing completion_times"
        );

        let report = validate_instance(&inst, Objective::TotalDelay, Mode::AnticipationDelay);
        assert!(report.has(ViolationKind::MissingAnticipationBounds));
    }

    #[test]
    fn structural_problems_are_all_reported() {
        let arcs = vec![
            ConflictArc::new(0, 0, 1.0),
            ConflictArc::new(0, 1, 1.0),
            ConflictArc::new(0, 1, 2.0),
            ConflictArc::new(0, 5, 2.0),
            ConflictArc::new(1, 0, f64::INFINITY),
        ];
        let inst = RecoveryInstance::new(ConflictGraph::new(2, arcs), vec![0.0, 0.0])
            .with_anticipation_bounds(vec![-1.0, 0.0])
            .with_costs(0.0, -1.0);
        let report = validate_instance(&inst, Objective::TotalDelay, Mode::AnticipationDelay);
        for kind in [
            ViolationKind::SelfLoop,
            ViolationKind::DuplicateArc,
            ViolationKind::IndexOutOfRange,
            ViolationKind::NonFiniteValue,
            ViolationKind::NegativeAnticipationBound,
            ViolationKind::NonPositiveAlpha,
            ViolationKind::NegativeBeta,
        ] {
            assert!(report.has(kind), "expected {kind} in {report}");
        }
    }

    #[test]
    fn empty_fleet_and_length_mismatch() {
        let inst = RecoveryInstance::new(ConflictGraph::empty(0), vec![]);
        assert!(validate_instance(&inst, Objective::TotalDelay, Mode::Delay)
            .has(ViolationKind::EmptyFleet));
        let inst = RecoveryInstance::new(ConflictGraph::empty(2), vec![1.0]);
        assert!(validate_instance(&inst, Objective::TotalDelay, Mode::Delay)
            .has(ViolationKind::LengthMismatch));
    }

    #[test]
    fn uniform_delay_examples() {
        let inst = RecoveryInstance::new(ConflictGraph::empty(3), vec![1.0, 0.0, 0.0]);
        let plan = uniform_delay_solution(&inst);
        assert_eq!(plan.u, vec![1.0, 1.0, 1.0]);
        assert_eq!(plan.delta, vec![0.0, 1.0, 1.0]);
        assert_eq!(plan.x, vec![0.0; 3]);

        let inst = RecoveryInstance::new(ConflictGraph::empty(2), vec![-1.0, 0.0]);
        let plan = uniform_delay_solution(&inst);
        assert_eq!(plan.u, vec![0.0, 0.0]);
        assert_eq!(plan.delta, vec![1.0, 0.0]);

        let inst = RecoveryInstance::new(ConflictGraph::empty(4), vec![0.0; 4]);
        assert_eq!(uniform_delay_solution(&inst).u, vec![0.0; 4]);
    }

    #[test]
    fn cascade_feasibility() {
        let inst = cascade();
        let good = RecoveryPlan::from_shifts(
            &inst.deviations,
            vec![5.0, 4.0, 1.0, 2.0, 0.0, 0.0, 0.0],
            vec![0.0; 7],
        );
        assert!(check_feasibility(&inst, &good, Mode::Delay, 0.0)
            .unwrap()
            .ok());

        let bad = RecoveryPlan::from_shifts(
            &inst.deviations,
            vec![5.0, 3.0, 1.0, 2.0, 0.0, 0.0, 0.0],
            vec![0.0; 7],
        );
        let report = check_feasibility(&inst, &bad, Mode::Delay, 0.0).unwrap();
        assert!(!report.ok());
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::ConflictArc
                && v.location == Location::Arc { from: 0, to: 1 }
                && v.magnitude == 1.0));

        let uniform = uniform_delay_solution(&inst);
        assert!(check_feasibility(&inst, &uniform, Mode::Delay, 0.0)
            .unwrap()
            .ok());
    }

    #[test]
    fn anticipation_mode_feasibility_uses_net_shift() {
        let inst = RecoveryInstance::new(
            ConflictGraph::new(2, vec![ConflictArc::new(0, 1, 0.0)]),
            vec![3.0, 0.0],
        )
        .with_anticipation_bounds(vec![2.0, 0.0]);
        let plan = RecoveryPlan::from_shifts(&inst.deviations, vec![3.0, 1.0], vec![2.0, 0.0]);
        assert!(
            check_feasibility(&inst, &plan, Mode::AnticipationDelay, 1e-9)
                .unwrap()
                .ok()
        );
        // Without the anticipation the same shifts conflict.
        assert!(!check_feasibility(&inst, &plan, Mode::Delay, 1e-9)
            .unwrap()
            .ok());

        let over = RecoveryPlan::from_shifts(&inst.deviations, vec![3.0, 0.0], vec![3.0, -1.0]);
        let report = check_feasibility(&inst, &over, Mode::AnticipationDelay, 1e-9).unwrap();
        assert!(report.has(ViolationKind::AnticipationAboveBound));
        assert!(report.has(ViolationKind::NegativeAnticipation));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let inst = cascade();
        let plan = RecoveryPlan::from_shifts(&[0.0; 2], vec![0.0; 2], vec![0.0; 2]);
        assert!(matches!(
            check_feasibility(&inst, &plan, Mode::Delay, 1e-9),
            Err(RecoveryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn objective_examples() {
        let inst = cascade();
        let u = vec![5.0, 4.0, 1.0, 2.0, 0.0, 0.0, 0.0];
        assert_eq!(
            objective_at(&inst, &u, Objective::TotalDelay).unwrap(),
            12.0
        );

        let inst = RecoveryInstance::new(ConflictGraph::empty(2), vec![0.0, 0.0])
            .with_completion_times(vec![10.0, 8.0])
            .with_due_dates(vec![1.0, 3.0]);
        let plan = RecoveryPlan::from_shifts(&inst.deviations, vec![2.0, 2.0], vec![0.0; 2]);
        assert_eq!(
            evaluate_objective(&inst, &plan, Objective::Makespan).unwrap(),
            12.0
        );
        assert_eq!(
            evaluate_objective(&inst, &plan, Objective::TotalLateness).unwrap(),
            1.0
        );
        assert!(matches!(
            evaluate_objective(&inst, &plan, Objective::WeightedDelay),
            Err(RecoveryError::MissingData("weights"))
        ));
    }

    #[test]
    fn dev_percent_cases() {
        assert_eq!(dev_percent(6.0, 4.0).unwrap(), 100.0 * 2.0 / 6.0);
        assert_eq!(dev_percent(0.0, 0.0), Some(0.0));
        assert_eq!(dev_percent(0.0, -1.0), None);
        assert_eq!(dev_percent(-2.0, -3.0), Some(50.0));
    }

    #[test]
    fn objective_and_mode_parse_round_trip() {
        for o in Objective::ALL {
            assert_eq!(o.as_str().parse::<Objective>().unwrap(), o);
        }
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
        assert!("bogus".parse::<Objective>().is_err());
    }
}
