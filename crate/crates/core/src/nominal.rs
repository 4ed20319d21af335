//! Solver inputs derived from the nominal plan: deviations from observed
//! positions and pairwise slacks from resource-occupancy timetables.
//!
//! A delayed vehicle shifts all of its occupancy intervals rigidly. The slack
//! `s_hk` is then the largest such shift of `h` that keeps `h` clear of `k` at
//! every resource where `h` passes before `k`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ConflictArc, ConflictGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("vehicle {vehicle}, occupancy {index}: entry {entry} must precede exit {exit}")]
    EmptyInterval {
        vehicle: usize,
        index: usize,
        entry: f64,
        exit: f64,
    },

    #[error("vehicle {vehicle}, occupancy {index}: times must be finite")]
    NonFinite { vehicle: usize, index: usize },

    #[error("vehicle {vehicle}, occupancy {index} starts before the previous one ends")]
    Overlap { vehicle: usize, index: usize },

    #[error("headway must be finite and nonnegative, got {0}")]
    InvalidHeadway(f64),

    #[error("vehicle {vehicle} out of range for a fleet of {vehicle_count}")]
    VehicleOutOfRange {
        vehicle: usize,
        vehicle_count: usize,
    },

    #[error(
        "vehicle {vehicle}: plan coordinate {coordinate} outside its horizon [{start}, {end}]"
    )]
    OutsideHorizon {
        vehicle: usize,
        coordinate: f64,
        start: f64,
        end: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Occupancy {
    pub resource: String,
    pub entry: f64,
    pub exit: f64,
}

impl Occupancy {
    pub fn new(resource: impl Into<String>, entry: f64, exit: f64) -> Self {
        Self {
            resource: resource.into(),
            entry,
            exit,
        }
    }
}

/// Per vehicle, the time-ordered resources it occupies in the nominal plan.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NominalPlan {
    pub vehicles: Vec<Vec<Occupancy>>,
}

impl NominalPlan {
    pub fn new(vehicles: Vec<Vec<Occupancy>>) -> Result<Self, PlanError> {
        let plan = Self { vehicles };
        plan.validate()?;
        Ok(plan)
    }

    pub fn vehicle_count(&self) -> usize {
        self.vehicles.len()
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        for (vehicle, occs) in self.vehicles.iter().enumerate() {
            let mut previous_exit = f64::NEG_INFINITY;
            for (index, o) in occs.iter().enumerate() {
                if !o.entry.is_finite() || !o.exit.is_finite() {
                    return Err(PlanError::NonFinite { vehicle, index });
                }
                if o.entry >= o.exit {
                    return Err(PlanError::EmptyInterval {
                        vehicle,
                        index,
                        entry: o.entry,
                        exit: o.exit,
                    });
                }
                if o.entry < previous_exit {
                    return Err(PlanError::Overlap { vehicle, index });
                }
                previous_exit = o.exit;
            }
        }
        Ok(())
    }

    /// Exit time of each vehicle's last occupancy (0 for an empty route).
    pub fn completion_times(&self) -> Vec<f64> {
        self.vehicles
            .iter()
            .map(|occs| occs.last().map_or(0.0, |o| o.exit))
            .collect()
    }

    /// `[first entry, last exit]` of a vehicle, if it occupies anything.
    pub fn horizon(&self, vehicle: usize) -> Option<(f64, f64)> {
        let occs = self.vehicles.get(vehicle)?;
        Some((occs.first()?.entry, occs.last()?.exit))
    }

    fn by_resource(&self) -> HashMap<&str, Vec<(usize, f64, f64)>> {
        let mut map: HashMap<&str, Vec<(usize, f64, f64)>> = HashMap::new();
        for (vehicle, occs) in self.vehicles.iter().enumerate() {
            for o in occs {
                map.entry(o.resource.as_str())
                    .or_default()
                    .push((vehicle, o.entry, o.exit));
            }
        }
        map
    }

    /// Pairs of vehicles that share a resource closer than `headway` apart
    /// (or overlap outright) in the nominal plan, as `(first, second, resource)`.
    pub fn headway_conflicts(&self, headway: f64) -> Vec<(usize, usize, String)> {
        let mut out = Vec::new();
        for (resource, occs) in self.by_resource() {
            for (i, &(h, h_entry, h_exit)) in occs.iter().enumerate() {
                for &(k, k_entry, k_exit) in &occs[i + 1..] {
                    if h == k {
                        continue;
                    }
                    let separated = h_exit + headway <= k_entry || k_exit + headway <= h_entry;
                    if !separated {
                        out.push((h.min(k), h.max(k), resource.to_string()));
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Observed fleet state: for each vehicle, the nominal-plan time at which its
/// observed position was scheduled.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedState {
    pub timestamp: f64,
    pub plan_coordinates: Vec<f64>,
}

impl ObservedState {
    pub fn new(timestamp: f64, plan_coordinates: Vec<f64>) -> Self {
        Self {
            timestamp,
            plan_coordinates,
        }
    }

    /// Checks every coordinate lies within its vehicle's plan horizon.
    pub fn validate_against(&self, plan: &NominalPlan) -> Result<(), PlanError> {
        for (vehicle, &coordinate) in self.plan_coordinates.iter().enumerate() {
            if let Some((start, end)) = plan.horizon(vehicle) {
                if !(coordinate >= start && coordinate <= end) {
                    return Err(PlanError::OutsideHorizon {
                        vehicle,
                        coordinate,
                        start,
                        end,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn deviations(&self) -> Vec<f64> {
        self.plan_coordinates
            .iter()
            .map(|c| self.timestamp - c)
            .collect()
    }
}

/// `d_h = t - ξ_h⁻¹(observed position)`: positive when late, negative when early.
pub fn compute_deviation(state: &ObservedState, vehicle: usize) -> Result<f64, PlanError> {
    state
        .plan_coordinates
        .get(vehicle)
        .map(|c| state.timestamp - c)
        .ok_or(PlanError::VehicleOutOfRange {
            vehicle,
            vehicle_count: state.plan_coordinates.len(),
        })
}

/// Conflict graph of a nominal plan.
///
/// For every ordered pair `(h, k)` and every resource where `h` exits no later
/// than `k` enters, the gap `entry_k - exit_h - headway` bounds the delay of
/// `h`. The smallest gap, clamped at 0, becomes the slack of arc `(h, k)`.
/// Pairs with no such resource get no arc. Overlapping occupancies contribute
/// nothing; see [`NominalPlan::headway_conflicts`] to detect them.
pub fn compute_slacks(plan: &NominalPlan, headway: f64) -> Result<ConflictGraph, PlanError> {
    if !(headway >= 0.0 && headway.is_finite()) {
        return Err(PlanError::InvalidHeadway(headway));
    }
    plan.validate()?;
    let mut slacks: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for occs in plan.by_resource().values() {
        for &(h, _, h_exit) in occs {
            for &(k, k_entry, _) in occs {
                if h == k || h_exit > k_entry {
                    continue;
                }
                let gap = (k_entry - h_exit - headway).max(0.0);
                slacks
                    .entry((h, k))
                    .and_modify(|s| *s = s.min(gap))
                    .or_insert(gap);
            }
        }
    }
    let arcs = slacks
        .into_iter()
        .map(|((h, k), s)| ConflictArc::new(h, k, s))
        .collect();
    Ok(ConflictGraph::new(plan.vehicle_count(), arcs))
}
