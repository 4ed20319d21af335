//! JSON instance and solution files.
//!
//! Indices are 0-based. Unknown keys are rejected. Numbers are written with
//! the shortest representation that round-trips, so rewriting a file that was
//! read reproduces the same values bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{GenConfig, ALGORITHM};
use crate::model::{ConflictArc, ConflictGraph, Mode, Objective, RecoveryInstance, RecoveryPlan};
use crate::nominal::{compute_slacks, NominalPlan, Occupancy, PlanError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("nominal plan: {0}")]
    Plan(#[from] PlanError),

    #[error("{0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorInfo {
    pub seed: u64,
    pub p: f64,
    pub algorithm: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    /// May be omitted when `nominal_plan` is given; arcs are then derived from
    /// the plan with zero headway.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arcs: Option<Vec<ConflictArc>>,
    pub deviations: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion_times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub due_dates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anticipation_bounds: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_plan: Option<Vec<Vec<Occupancy>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorInfo>,
}

impl InstanceFile {
    pub fn from_instance(instance: &RecoveryInstance) -> Self {
        Self {
            n: instance.vehicle_count(),
            arcs: Some(instance.graph.arcs.clone()),
            deviations: instance.deviations.clone(),
            weights: instance.weights.clone(),
            completion_times: instance.completion_times.clone(),
            due_dates: instance.due_dates.clone(),
            anticipation_bounds: instance.anticipation_bounds.clone(),
            alpha: Some(instance.alpha),
            beta: Some(instance.beta),
            nominal_plan: None,
            generator: None,
        }
    }

    pub fn generated(instance: &RecoveryInstance, config: &GenConfig) -> Self {
        Self {
            generator: Some(GeneratorInfo {
                seed: config.seed,
                p: config.p,
                algorithm: ALGORITHM.to_string(),
            }),
            ..Self::from_instance(instance)
        }
    }

    /// Builds the solver instance. Structural checks (indices, lengths, signs)
    /// are left to instance validation so they are reported uniformly.
    pub fn to_instance(&self) -> Result<RecoveryInstance, FormatError> {
        let plan = self
            .nominal_plan
            .clone()
            .map(NominalPlan::new)
            .transpose()?;
        if let Some(plan) = &plan {
            if plan.vehicle_count() != self.n {
                return Err(FormatError::Inconsistent(format!(
                    "nominal_plan has {} vehicles but n is {}",
                    plan.vehicle_count(),
                    self.n
                )));
            }
        }
        let arcs: Vec<ConflictArc> = match (&self.arcs, &plan) {
            (Some(arcs), _) => arcs.clone(),
            (None, Some(plan)) => compute_slacks(plan, 0.0)?.arcs,
            (None, None) => {
                return Err(FormatError::Inconsistent(
                    "missing arcs (and no nominal_plan to derive them from)".into(),
                ))
            }
        };
        let completion_times = self
            .completion_times
            .clone()
            .or_else(|| plan.as_ref().map(NominalPlan::completion_times));

        let mut instance =
            RecoveryInstance::new(ConflictGraph::new(self.n, arcs), self.deviations.clone());
        instance.weights = self.weights.clone();
        instance.completion_times = completion_times;
        instance.due_dates = self.due_dates.clone();
        instance.anticipation_bounds = self.anticipation_bounds.clone();
        if let Some(alpha) = self.alpha {
            instance.alpha = alpha;
        }
        if let Some(beta) = self.beta {
            instance.beta = beta;
        }
        Ok(instance)
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        Self::from_json(&read_text(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        write_text(path, &self.to_json())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub objective: Objective,
    pub mode: Mode,
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    pub delta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lateness: Option<Vec<f64>>,
    pub objective_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combined_value: Option<f64>,
}

impl SolutionFile {
    pub fn new(objective: Objective, mode: Mode, plan: &RecoveryPlan) -> Self {
        Self {
            objective,
            mode,
            u: plan.u.clone(),
            x: plan.x.clone(),
            delta: plan.delta.clone(),
            lateness: plan.lateness.clone(),
            objective_value: plan.objective_value,
            combined_value: plan.combined_value,
        }
    }

    pub fn to_plan(&self) -> RecoveryPlan {
        RecoveryPlan {
            u: self.u.clone(),
            x: self.x.clone(),
            delta: self.delta.clone(),
            lateness: self.lateness.clone(),
            objective_value: self.objective_value,
            combined_value: self.combined_value,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        Self::from_json(&read_text(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        write_text(path, &self.to_json())
    }
}

fn read_text(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    std::fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}
