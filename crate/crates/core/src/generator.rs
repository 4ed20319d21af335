//! Reproducible random recovery instances.
//!
//! Sampling ranges: deviations `U[-10, 10]`, slacks `U[0, 13]`, weights
//! `U[0, 1]`, completion times `U[100, 110]`, due dates `U[0, 10]`. The conflict
//! graph has `round((1 - p)(n² - n))` arcs drawn without replacement from all
//! ordered pairs, so `p` is the fraction of missing arcs. Anticipation bounds
//! come from a speed model with time-to-conflict drawn uniformly.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anticipation::anticipation_bound;
use crate::error::RecoveryError;
use crate::model::{ConflictArc, ConflictGraph, RecoveryInstance};

/// Name of the PRNG recorded in generated instance files.
pub const ALGORITHM: &str = "chacha8-seed_from_u64";

pub const DEVIATION_RANGE: (f64, f64) = (-10.0, 10.0);
pub const SLACK_RANGE: (f64, f64) = (0.0, 13.0);
pub const WEIGHT_RANGE: (f64, f64) = (0.0, 1.0);
pub const COMPLETION_RANGE: (f64, f64) = (100.0, 110.0);
pub const DUE_DATE_RANGE: (f64, f64) = (0.0, 10.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    /// Fraction of ordered vehicle pairs without a conflict arc, in `[0, 1)`.
    pub p: f64,
    pub seed: u64,
    pub with_anticipations: bool,
    pub k_ratio: f64,
    pub boost_limit: f64,
    pub time_to_conflict_range: (f64, f64),
}

impl GenConfig {
    pub fn new(n: usize, p: f64, seed: u64) -> Self {
        Self {
            n,
            p,
            seed,
            with_anticipations: true,
            k_ratio: 1.5,
            boost_limit: 10.0,
            time_to_conflict_range: (0.0, 20.0),
        }
    }

    pub fn without_anticipations(mut self) -> Self {
        self.with_anticipations = false;
        self
    }

    fn validate(&self) -> Result<(), RecoveryError> {
        if self.n == 0 {
            return Err(RecoveryError::InvalidConfig("n must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.p) {
            return Err(RecoveryError::InvalidConfig(format!(
                "sparsity must lie in [0, 1), got {}",
                self.p
            )));
        }
        let (lo, hi) = self.time_to_conflict_range;
        if self.with_anticipations && !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(RecoveryError::InvalidConfig(format!(
                "bad time-to-conflict range [{lo}, {hi}]"
            )));
        }
        if self.with_anticipations {
            anticipation_bound(self.k_ratio, self.boost_limit, lo)?;
        }
        Ok(())
    }
}

/// Number of conflict arcs for `n` vehicles at sparsity `p`, rounding halves up.
pub fn arc_count(n: usize, p: f64) -> usize {
    let pairs = (n * n.saturating_sub(1)) as f64;
    ((1.0 - p) * pairs + 0.5).floor() as usize
}

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

pub fn generate(config: &GenConfig) -> Result<RecoveryInstance, RecoveryError> {
    config.validate()?;
    let n = config.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let deviations = uniform_vec(&mut rng, n, DEVIATION_RANGE);

    let pairs = n * (n - 1);
    let m = arc_count(n, config.p).min(pairs);
    let mut picked = sample(&mut rng, pairs, m).into_vec();
    picked.sort_unstable();
    let arcs = picked
        .into_iter()
        .map(|idx| {
            let from = idx / (n - 1);
            let r = idx % (n - 1);
            let to = if r >= from { r + 1 } else { r };
            let slack = rng.gen_range(SLACK_RANGE.0..=SLACK_RANGE.1);
            ConflictArc::new(from, to, slack)
        })
        .collect();

    let weights = uniform_vec(&mut rng, n, WEIGHT_RANGE);
    let completion_times = uniform_vec(&mut rng, n, COMPLETION_RANGE);
    let due_dates = uniform_vec(&mut rng, n, DUE_DATE_RANGE);

    let mut instance = RecoveryInstance::new(ConflictGraph::new(n, arcs), deviations)
        .with_weights(weights)
        .with_completion_times(completion_times)
        .with_due_dates(due_dates)
        .with_costs(1000.0, 1.0);

    if config.with_anticipations {
        let bounds = uniform_vec(&mut rng, n, config.time_to_conflict_range)
            .into_iter()
            .map(|tc| anticipation_bound(config.k_ratio, config.boost_limit, tc))
            .collect::<Result<Vec<_>, _>>()?;
        instance.anticipation_bounds = Some(bounds);
    }
    Ok(instance)
}
