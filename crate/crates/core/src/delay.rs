//! Recovery with corrective delays only.
//!
//! The delay-only recovery LP is the dual of a seeded shortest-path problem on
//! the conflict graph: the optimal shift of vehicle `k` is
//!
//! ```text
//! u*_k = max over vehicles h and paths h → k of (d_h - Σ slacks on the path)
//! ```
//!
//! i.e. the negated shortest-path distance when every vehicle `h` is seeded
//! with `-d_h`. The same `u*` is the least feasible shift vector, so it is
//! optimal for all four objectives. Makespan and lateness values are read off
//! sink vertices appended to the graph.

use crate::error::RecoveryError;
use crate::model::{
    objective_at, validate_instance, ConflictGraph, Mode, Objective, RecoveryInstance, RecoveryPlan,
};
use crate::sssp::{shortest_paths_seeded, SeedLabels, WeightedDigraph};

/// Role of a vertex appended after the `n` vehicle vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtraVertex {
    /// Collects `max_h (c_h + u_h) - max_k c_k`.
    MakespanSink,
    /// Collects the lateness of the given vehicle.
    LatenessSink(usize),
}

/// A conflict graph extended for one objective, ready for the shortest-path
/// engine. Vertex `core_count + i` plays the role `extra[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryGraph {
    pub graph: WeightedDigraph,
    pub seeds: SeedLabels,
    pub core_count: usize,
    pub extra: Vec<ExtraVertex>,
}

impl AuxiliaryGraph {
    pub fn vertex_count(&self) -> usize {
        self.core_count + self.extra.len()
    }

    pub fn solve(&self) -> Result<Vec<f64>, RecoveryError> {
        Ok(shortest_paths_seeded(&self.graph, &self.seeds)?)
    }
}

fn conflict_arcs(graph: &ConflictGraph) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
    graph.arcs.iter().map(|a| (a.from, a.to, a.slack))
}

fn assemble(
    graph: &ConflictGraph,
    lower_bounds: &[f64],
    extra: Vec<ExtraVertex>,
    extra_arcs: Vec<(usize, usize, f64)>,
    extra_seeds: Vec<(usize, f64)>,
) -> Result<AuxiliaryGraph, RecoveryError> {
    let n = graph.vehicle_count;
    let digraph = WeightedDigraph::new(n + extra.len(), conflict_arcs(graph).chain(extra_arcs))?;
    let seeds = lower_bounds
        .iter()
        .enumerate()
        .map(|(h, &d)| (h, -d))
        .chain(extra_seeds)
        .collect();
    Ok(AuxiliaryGraph {
        graph: digraph,
        seeds: SeedLabels::new(seeds)?,
        core_count: n,
        extra,
    })
}

fn core_auxiliary(
    graph: &ConflictGraph,
    lower_bounds: &[f64],
) -> Result<AuxiliaryGraph, RecoveryError> {
    assemble(graph, lower_bounds, Vec::new(), Vec::new(), Vec::new())
}

fn makespan_auxiliary(instance: &RecoveryInstance) -> Result<AuxiliaryGraph, RecoveryError> {
    let n = instance.vehicle_count();
    let c = instance.require_completion_times()?;
    let latest = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // The sink is left unseeded: its label is fed only through the incoming arcs.
    let arcs = (0..n).map(|h| (h, n, latest - c[h])).collect();
    assemble(
        &instance.graph,
        &instance.deviations,
        vec![ExtraVertex::MakespanSink],
        arcs,
        Vec::new(),
    )
}

fn lateness_auxiliary(instance: &RecoveryInstance) -> Result<AuxiliaryGraph, RecoveryError> {
    let n = instance.vehicle_count();
    let rho = instance.require_due_dates()?;
    let extra = (0..n).map(ExtraVertex::LatenessSink).collect();
    let arcs = (0..n).map(|h| (h, n + h, rho[h])).collect();
    // Seeding each sink with 0 encodes y_h >= 0.
    let seeds = (0..n).map(|h| (n + h, 0.0)).collect();
    assemble(&instance.graph, &instance.deviations, extra, arcs, seeds)
}

/// The conflict graph with every vehicle `h` seeded at `-d_h`.
pub fn build_core_auxiliary(instance: &RecoveryInstance) -> Result<AuxiliaryGraph, RecoveryError> {
    validate_instance(instance, Objective::TotalDelay, Mode::Delay).into_result()?;
    core_auxiliary(&instance.graph, &instance.deviations)
}

/// Core graph plus a sink `n` with arcs `(h, n, max_k c_k - c_h)`.
pub fn build_makespan_extension(
    instance: &RecoveryInstance,
) -> Result<AuxiliaryGraph, RecoveryError> {
    instance.require_completion_times()?;
    validate_instance(instance, Objective::Makespan, Mode::Delay).into_result()?;
    makespan_auxiliary(instance)
}

/// Core graph plus one sink `n + h` per vehicle with arc `(h, n + h, ρ_h)`.
pub fn build_lateness_extension(
    instance: &RecoveryInstance,
) -> Result<AuxiliaryGraph, RecoveryError> {
    instance.require_due_dates()?;
    validate_instance(instance, Objective::TotalLateness, Mode::Delay).into_result()?;
    lateness_auxiliary(instance)
}

/// Least shift vector satisfying `u_h - u_k <= s_hk` on `graph` and
/// `u_h >= lower_bounds[h]`. Inputs must already be validated.
pub(crate) fn least_shifts(
    graph: &ConflictGraph,
    lower_bounds: &[f64],
) -> Result<Vec<f64>, RecoveryError> {
    let aux = core_auxiliary(graph, lower_bounds)?;
    let dist = aux.solve()?;
    Ok(dist.iter().map(|d| -d + 0.0).collect())
}

/// Optimal recovery with corrective delays only.
///
/// One shortest-path run on the objective's auxiliary graph yields `u*` for
/// every vehicle and, for makespan and lateness, the sink labels that give the
/// objective value.
pub fn solve_delay(
    instance: &RecoveryInstance,
    objective: Objective,
) -> Result<RecoveryPlan, RecoveryError> {
    validate_instance(instance, objective, Mode::Delay).into_result()?;
    let n = instance.vehicle_count();
    let aux = match objective {
        Objective::Makespan => makespan_auxiliary(instance)?,
        Objective::TotalLateness => lateness_auxiliary(instance)?,
        Objective::TotalDelay | Objective::WeightedDelay => {
            core_auxiliary(&instance.graph, &instance.deviations)?
        }
    };
    let dist = aux.solve()?;
    let label = |v: usize| -dist[v] + 0.0;

    let u = (0..n).map(label).collect();
    let mut plan = RecoveryPlan::from_shifts(&instance.deviations, u, vec![0.0; n]);
    plan.objective_value = match objective {
        Objective::TotalDelay => plan.u.iter().sum(),
        Objective::WeightedDelay => objective_at(instance, &plan.u, objective)?,
        Objective::Makespan => {
            let latest = instance
                .require_completion_times()?
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            latest + label(n)
        }
        Objective::TotalLateness => {
            let y: Vec<f64> = (n..2 * n).map(label).collect();
            let total = y.iter().sum();
            plan.lateness = Some(y);
            total
        }
    };

    if cfg!(debug_assertions) {
        let closed = objective_at(instance, &plan.u, objective)?;
        let scale = 1.0 + closed.abs().max(plan.objective_value.abs());
        debug_assert!(
            (closed - plan.objective_value).abs() <= 1e-9 * scale,
            "sink value {} disagrees with closed form {closed} for {objective}",
            plan.objective_value
        );
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_feasibility, uniform_delay_solution, ConflictArc};
    use crate::sssp::WeightedDigraph;

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
    fn core_auxiliary_construction() {
        let aux = build_core_auxiliary(&cascade()).unwrap();
        assert_eq!(aux.vertex_count(), 7);
        assert_eq!(aux.graph.arc_count(), 4);
        let seeds: Vec<_> = aux.seeds.iter().collect();
        let want: Vec<_> = [-5.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
            .iter()
            .enumerate()
            .map(|(h, &s)| (h, s))
            .collect();
        assert_eq!(seeds, want);

        let single = RecoveryInstance::new(ConflictGraph::empty(1), vec![0.0]);
        let aux = build_core_auxiliary(&single).unwrap();
        assert_eq!(aux.vertex_count(), 1);
        assert_eq!(aux.seeds.iter().collect::<Vec<_>>(), vec![(0, -0.0)]);

        let pair = RecoveryInstance::new(
            ConflictGraph::new(2, vec![ConflictArc::new(0, 1, 1.0)]),
            vec![5.0, 1.0],
        );
        let aux = build_core_auxiliary(&pair).unwrap();
        assert_eq!(aux.graph.arcs().collect::<Vec<_>>(), vec![(0, 1, 1.0)]);
        assert_eq!(
            aux.seeds.iter().collect::<Vec<_>>(),
            vec![(0, -5.0), (1, -1.0)]
        );
    }

    fn extra_arcs(aux: &AuxiliaryGraph) -> Vec<(usize, usize, f64)> {
        aux.graph
            .arcs()
            .filter(|&(_, h, _)| h >= aux.core_count)
            .collect()
    }

    #[test]
    fn makespan_extension_construction() {
        let inst = RecoveryInstance::new(ConflictGraph::empty(2), vec![0.0, 0.0])
            .with_completion_times(vec![10.0, 8.0]);
        let aux = build_makespan_extension(&inst).unwrap();
        assert_eq!(aux.extra, vec![ExtraVertex::MakespanSink]);
        assert_eq!(extra_arcs(&aux), vec![(0, 2, 0.0), (1, 2, 2.0)]);

        let inst = RecoveryInstance::new(ConflictGraph::empty(3), vec![0.0; 3])
            .with_completion_times(vec![7.0; 3]);
        let aux = build_makespan_extension(&inst).unwrap();
        assert!(extra_arcs(&aux).iter().all(|a| a.2 == 0.0));

        let inst = RecoveryInstance::new(ConflictGraph::empty(1), vec![0.0])
            .with_completion_times(vec![100.0]);
        assert_eq!(
            extra_arcs(&build_makespan_extension(&inst).unwrap()),
            vec![(0, 1, 0.0)]
        );

        let missing = RecoveryInstance::new(ConflictGraph::empty(1), vec![0.0]);
        assert!(matches!(
            build_makespan_extension(&missing),
            Err(RecoveryError::MissingData("completion_times"))
        ));
    }

    #[test]
    fn lateness_extension_construction() {
        let inst = RecoveryInstance::new(ConflictGraph::empty(2), vec![0.0, 0.0])
            .with_due_dates(vec![1.0, 3.0]);
        let aux = build_lateness_extension(&inst).unwrap();
        assert_eq!(aux.vertex_count(), 4);
        assert_eq!(extra_arcs(&aux), vec![(0, 2, 1.0), (1, 3, 3.0)]);

        let inst =
            RecoveryInstance::new(ConflictGraph::empty(1), vec![-2.0]).with_due_dates(vec![10.0]);
        let plan = solve_delay(&inst, Objective::TotalLateness).unwrap();
        assert_eq!(plan.lateness, Some(vec![0.0]));
        assert_eq!(plan.u, vec![-2.0]);

        let inst = RecoveryInstance::new(
            ConflictGraph::new(2, vec![ConflictArc::new(0, 1, 0.5)]),
            vec![3.0, -1.0],
        )
        .with_due_dates(vec![0.0, 0.0]);
        let plan = solve_delay(&inst, Objective::TotalLateness).unwrap();
        let expect: Vec<f64> = plan.u.iter().map(|u| u.max(0.0)).collect();
        assert_eq!(plan.lateness.unwrap(), expect);

        let missing = RecoveryInstance::new(ConflictGraph::empty(1), vec![0.0]);
        assert!(matches!(
            build_lateness_extension(&missing),
            Err(RecoveryError::MissingData("due_dates"))
        ));
    }

    #[test]
    fn cascade_delays() {
        let inst = cascade();
        let plan = solve_delay(&inst, Objective::TotalDelay).unwrap();
        assert_eq!(plan.u, vec![5.0, 4.0, 1.0, 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(plan.delta, vec![0.0, 3.0, 1.0, 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(plan.objective_value, 12.0);
        assert!(check_feasibility(&inst, &plan, Mode::Delay, 0.0)
            .unwrap()
            .ok());
    }

    #[test]
    fn decoupled_early_vehicle_stays_early() {
        let inst = RecoveryInstance::new(ConflictGraph::empty(2), vec![-1.0, 0.0]);
        let plan = solve_delay(&inst, Objective::TotalDelay).unwrap();
        assert_eq!(plan.u, vec![-1.0, 0.0]);
        assert_eq!(plan.objective_value, -1.0);
    }

    #[test]
    fn makespan_pair() {
        let inst = RecoveryInstance::new(
            ConflictGraph::new(2, vec![ConflictArc::new(0, 1, 0.0)]),
            vec![2.0, 0.0],
        )
        .with_completion_times(vec![10.0, 8.0]);
        let aux = build_makespan_extension(&inst).unwrap();
        let dist = aux.solve().unwrap();
        assert_eq!(-dist[2], 2.0);
        let plan = solve_delay(&inst, Objective::Makespan).unwrap();
        assert_eq!(plan.u, vec![2.0, 2.0]);
        assert_eq!(plan.objective_value, 12.0);
    }

    #[test]
    fn makespan_can_drop_below_nominal() {
        // Every vehicle ahead of schedule: the fleet finishes earlier than planned.
        let inst = RecoveryInstance::new(ConflictGraph::empty(2), vec![-3.0, -1.0])
            .with_completion_times(vec![10.0, 8.0]);
        let plan = solve_delay(&inst, Objective::Makespan).unwrap();
        assert_eq!(plan.objective_value, 7.0);
    }

    #[test]
    fn single_vehicle() {
        let inst = RecoveryInstance::new(ConflictGraph::empty(1), vec![4.5])
            .with_weights(vec![2.0])
            .with_completion_times(vec![10.0])
            .with_due_dates(vec![3.0]);
        let values: Vec<f64> = Objective::ALL
            .iter()
            .map(|&o| solve_delay(&inst, o).unwrap().objective_value)
            .collect();
        assert_eq!(values, vec![4.5, 9.0, 14.5, 1.5]);
    }

    #[test]
    fn null_deviations_give_identity() {
        let inst = RecoveryInstance::new(
            ConflictGraph::new(
                3,
                vec![ConflictArc::new(0, 1, 1.0), ConflictArc::new(2, 0, 0.0)],
            ),
            vec![0.0; 3],
        )
        .with_completion_times(vec![100.0, 105.0, 101.0])
        .with_due_dates(vec![1.0, 2.0, 3.0]);
        let plan = solve_delay(&inst, Objective::Makespan).unwrap();
        assert_eq!(plan.u, vec![0.0; 3]);
        assert_eq!(plan.objective_value, 105.0);
        assert_eq!(
            solve_delay(&inst, Objective::TotalLateness)
                .unwrap()
                .objective_value,
            0.0
        );
        assert_eq!(
            solve_delay(&inst, Objective::TotalDelay)
                .unwrap()
                .objective_value,
            0.0
        );
    }

    #[test]
    fn invalid_instance_is_rejected() {
        let inst = RecoveryInstance::new(
            ConflictGraph::new(2, vec![ConflictArc::new(0, 1, -1.0)]),
            vec![0.0, 0.0],
        );
        assert!(matches!(
            solve_delay(&inst, Objective::TotalDelay),
            Err(RecoveryError::InvalidInstance(_))
        ));
        let missing = cascade();
        let err = solve_delay(&missing, Objective::TotalLateness).unwrap_err();
        assert!(err.to_string().contains("missing due_dates"), "{err}");
    }

    #[test]
    fn beats_uniform_delay() {
        let inst = cascade();
        let plan = solve_delay(&inst, Objective::TotalDelay).unwrap();
        assert!(plan.objective_value <= uniform_delay_solution(&inst).objective_value);
    }

    #[test]
    fn least_shifts_matches_fixed_point() {
        let inst = cascade();
        let u = least_shifts(&inst.graph, &inst.deviations).unwrap();
        let g = WeightedDigraph::new(7, inst.graph.arcs.iter().map(|a| (a.from, a.to, a.slack)))
            .unwrap();
        for k in 0..7 {
            let mut best = inst.deviations[k];
            for (t, h, w) in g.arcs() {
                if h == k {
                    best = best.max(u[t] - w);
                }
            }
            assert_eq!(u[k], best);
        }
    }
}
