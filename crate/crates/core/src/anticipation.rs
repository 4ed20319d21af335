//! Recovery with corrective delays and anticipations.
//!
//! A vehicle that can run at `k` times its nominal speed for at most `T`
//! seconds can gain up to `L_h` time units on its plan. With anticipation `x_h`
//! the effective shift of vehicle `h` is `u_h - x_h`, so the conflict
//! constraints become `(u_h - x_h) - (u_k - x_k) <= s_hk`.
//!
//! The solver works in two shortest-path stages:
//!
//! 1. Every vehicle is granted its full anticipation `L_h`. The least
//!    effective shift `ū` under lower bounds `d_h - L_h` minimizes the
//!    performance measure; the corrective delays are `max(0, ū_h - d_h)`.
//! 2. Keeping the measure at its optimum, the total anticipation is minimized
//!    by pushing the effective shifts as late as possible. That is a least-shift
//!    problem on the reversed conflict graph.
//!
//! Delays and anticipations never coexist on one vehicle in the returned plan.

use crate::delay::least_shifts;
use crate::error::RecoveryError;
use crate::model::{
    objective_at, validate_instance, ConflictGraph, Mode, Objective, RecoveryInstance,
    RecoveryPlan, DEFAULT_TOLERANCE,
};

/// Two-level speed model of a vehicle fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedModel {
    /// Ratio between boosted and nominal speed; must exceed 1.
    pub k_ratio: f64,
    /// Longest time the boosted speed may be held.
    pub boost_limit: f64,
    /// Per vehicle, time until the first conflict at nominal speed.
    pub time_to_conflict: Vec<f64>,
}

impl SpeedModel {
    pub fn new(
        k_ratio: f64,
        boost_limit: f64,
        time_to_conflict: Vec<f64>,
    ) -> Result<Self, RecoveryError> {
        let model = Self {
            k_ratio,
            boost_limit,
            time_to_conflict,
        };
        model.bounds()?;
        Ok(model)
    }

    pub fn bounds(&self) -> Result<Vec<f64>, RecoveryError> {
        self.time_to_conflict
            .iter()
            .map(|&tc| anticipation_bound(self.k_ratio, self.boost_limit, tc))
            .collect()
    }
}

/// Largest anticipation reachable by boosting: `min((k-1) T, (k-1)/k · t_c)`.
pub fn anticipation_bound(
    k_ratio: f64,
    boost_limit: f64,
    time_to_conflict: f64,
) -> Result<f64, RecoveryError> {
    if !(k_ratio > 1.0 && k_ratio.is_finite()) {
        return Err(RecoveryError::InvalidSpeedModel(format!(
            "speed ratio must be finite and greater than 1, got {k_ratio}"
        )));
    }
    if !(boost_limit >= 0.0) {
        return Err(RecoveryError::InvalidSpeedModel(format!(
            "boost limit must be nonnegative, got {boost_limit}"
        )));
    }
    if !(time_to_conflict >= 0.0) {
        return Err(RecoveryError::InvalidSpeedModel(format!(
            "time to conflict must be nonnegative, got {time_to_conflict}"
        )));
    }
    let by_budget = (k_ratio - 1.0) * boost_limit;
    let by_conflict = (k_ratio - 1.0) / k_ratio * time_to_conflict;
    Ok(by_budget.min(by_conflict))
}

impl RecoveryInstance {
    /// Fills the anticipation bounds from `model` unless the instance already
    /// carries its own.
    pub fn with_speed_model(mut self, model: &SpeedModel) -> Result<Self, RecoveryError> {
        if self.anticipation_bounds.is_none() {
            self.anticipation_bounds = Some(model.bounds()?);
        }
        Ok(self)
    }
}

pub fn reverse_graph(graph: &ConflictGraph) -> ConflictGraph {
    graph.reversed()
}

/// Anticipations only, with unbounded `L_h`: vehicles keep `u_h = d_h` and the
/// least total anticipation is found on the reversed graph with deviations
/// `-d_h`. Any `anticipation_bounds` in the instance are ignored.
///
/// `objective_value` is the (fixed) total delay and `combined_value` adds the
/// anticipation cost.
pub fn solve_anticipations_only(
    instance: &RecoveryInstance,
) -> Result<RecoveryPlan, RecoveryError> {
    validate_instance(instance, Objective::TotalDelay, Mode::Delay).into_result()?;
    let d = &instance.deviations;
    let neg_d: Vec<f64> = d.iter().map(|v| -v).collect();
    let shifted = least_shifts(&reverse_graph(&instance.graph), &neg_d)?;
    let x: Vec<f64> = shifted.iter().zip(d).map(|(xb, d)| xb + d).collect();
    let mut plan = RecoveryPlan::from_shifts(d, d.clone(), x);
    plan.objective_value = plan.u.iter().sum();
    plan.combined_value =
        Some(instance.alpha * plan.objective_value + instance.beta * plan.total_anticipation());
    Ok(plan)
}

/// Result of the two-stage anticipation-delay solver.
#[derive(Debug, Clone, PartialEq)]
pub struct AdSolution {
    pub plan: RecoveryPlan,
    /// Stage-1 effective shifts `ū` (every vehicle at full anticipation).
    pub stage1_net: Vec<f64>,
    /// Stage-1 corrective delays `max(0, ū_h - d_h)`.
    pub stage1_delay: Vec<f64>,
    /// Negated effective shift of the final plan, so that
    /// `stage2_shift[h] + delta[h] + d_h == x[h]`.
    pub stage2_shift: Vec<f64>,
}

/// Upper limits on `u` that keep the measure at its stage-1 optimum.
///
/// `None` means the optimal face is the single point `best_u`.
fn optimal_face_limits(
    instance: &RecoveryInstance,
    objective: Objective,
    best_u: &[f64],
) -> Result<Option<Vec<f64>>, RecoveryError> {
    let limits = match objective {
        Objective::TotalDelay => return Ok(None),
        Objective::WeightedDelay => {
            let w = instance.require_weights()?;
            if w.iter().all(|&w| w > 0.0) {
                return Ok(None);
            }
            // A weightless vehicle can absorb any delay; past the largest
            // deviation there is nothing left to gain from it.
            let cap = instance
                .deviations
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            best_u
                .iter()
                .zip(w)
                .map(|(&u, &w)| if w > 0.0 { u } else { u.max(cap) })
                .collect()
        }
        Objective::Makespan => {
            let c = instance.require_completion_times()?;
            let best = objective_at(instance, best_u, objective)?;
            best_u
                .iter()
                .zip(c)
                .map(|(&u, &c)| u.max(best - c))
                .collect()
        }
        Objective::TotalLateness => {
            let rho = instance.require_due_dates()?;
            best_u.iter().zip(rho).map(|(&u, &r)| u.max(r)).collect()
        }
    };
    Ok(Some(limits))
}

/// Optimal recovery with corrective delays and anticipations, minimizing
/// `alpha * z + beta * Σ x` under the operating assumption `alpha >> beta`.
pub fn solve_anticipation_delay(
    instance: &RecoveryInstance,
    objective: Objective,
) -> Result<AdSolution, RecoveryError> {
    validate_instance(instance, objective, Mode::AnticipationDelay).into_result()?;
    let n = instance.vehicle_count();
    let d = &instance.deviations;
    let bounds = instance.require_anticipation_bounds()?;

    // Stage 1: full anticipation everywhere.
    let lower: Vec<f64> = d.iter().zip(bounds).map(|(d, l)| d - l).collect();
    let net = least_shifts(&instance.graph, &lower)?;
    let stage1_u: Vec<f64> = net.iter().zip(d).map(|(&v, &d)| v.max(d)).collect();
    let stage1_delay: Vec<f64> = stage1_u.iter().zip(d).map(|(u, d)| u - d).collect();

    let (mut u, mut x) = if instance.beta == 0.0 {
        // Anticipation is free: keep whatever stage 1 granted.
        let x = (0..n)
            .map(|h| (d[h] - net[h]).max(0.0).min(bounds[h]))
            .collect();
        (stage1_u.clone(), x)
    } else {
        // Stage 2: latest effective shifts not exceeding the optimal-face
        // limits. Stage 1's `ū` is feasible here, so it is a lower envelope.
        let face = optimal_face_limits(instance, objective, &stage1_u)?;
        let limits = face.as_deref().unwrap_or(&stage1_u);
        let neg_limits: Vec<f64> = limits.iter().map(|v| -v).collect();
        let reversed = least_shifts(&reverse_graph(&instance.graph), &neg_limits)?;
        let latest: Vec<f64> = reversed
            .iter()
            .zip(&net)
            .map(|(&xb, &v)| (-xb).max(v))
            .collect();
        let x: Vec<f64> = (0..n)
            .map(|h| (d[h] - latest[h]).max(0.0).min(bounds[h]))
            .collect();
        let u = match face {
            None => stage1_u.clone(),
            Some(_) => {
                // Pull every delay back to the least one compatible with `x`.
                let lower: Vec<f64> = d.iter().zip(&x).map(|(d, x)| d - x).collect();
                let least = least_shifts(&instance.graph, &lower)?;
                (0..n)
                    .map(|h| if x[h] > 0.0 { d[h] } else { least[h] })
                    .collect()
            }
        };
        (u, x)
    };

    // A vehicle is never both delayed and accelerated; move any overlap back.
    for h in 0..n {
        let delay = u[h] - d[h];
        if delay > DEFAULT_TOLERANCE && x[h] > DEFAULT_TOLERANCE {
            let overlap = delay.min(x[h]);
            u[h] -= overlap;
            x[h] -= overlap;
        }
    }

    let stage2_shift = x.iter().zip(&u).map(|(x, u)| x - u).collect();
    let mut plan = RecoveryPlan::from_shifts(d, u, x);
    plan.objective_value = objective_at(instance, &plan.u, objective)?;
    if objective == Objective::TotalLateness {
        let rho = instance.require_due_dates()?;
        plan.lateness = Some(
            plan.u
                .iter()
                .zip(rho)
                .map(|(u, r)| (u - r).max(0.0))
                .collect(),
        );
    }
    plan.combined_value =
        Some(instance.alpha * plan.objective_value + instance.beta * plan.total_anticipation());
    Ok(AdSolution {
        plan,
        stage1_net: net,
        stage1_delay,
        stage2_shift,
    })
}
