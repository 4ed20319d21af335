//! Exact LP oracle for the recovery formulations.
//!
//! A dense bounded-variable primal simplex on a condensed tableau: only the
//! nonbasic columns are stored, so the tableau is `rows × structural
//! variables`. Every row `a·x <= b` gets a slack `b - a·x >= 0`; nonbasic
//! variables sit at one of their bounds (free ones at 0). Phase 1 minimizes the
//! sum of bound infeasibilities of the basic variables, phase 2 the objective.
//!
//! Pricing is Dantzig's largest reduced cost. After a run of degenerate pivots
//! the solver switches to Bland's smallest-index rule for both the entering and
//! the leaving variable, and switches back after the next nondegenerate pivot.
//! The oracle is meant for small instances and is never on the real-time path.

use thiserror::Error;

use crate::error::RecoveryError;
use crate::model::{validate_instance, Mode, Objective, RecoveryInstance};

const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const BLAND_AFTER: usize = 50;
const REFRESH_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("malformed LP: {0}")]
    Malformed(String),

    #[error("simplex did not terminate within {0} iterations")]
    IterationLimit(usize),

    #[error("simplex lost numerical consistency")]
    Numerical,
}

/// `Σ coeffs · x <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// `min objective · x` subject to `rows` and `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// `num_vars` free variables, zero objective, no rows.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            lower: vec![f64::NEG_INFINITY; num_vars],
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.rows.push(LpRow { coeffs, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars;
        for (what, len) in [
            ("objective", self.objective.len()),
            ("lower", self.lower.len()),
            ("upper", self.upper.len()),
        ] {
            if len != n {
                return Err(LpError::Malformed(format!(
                    "{what} has {len} entries for {n} variables"
                )));
            }
        }
        for (j, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(LpError::Malformed(format!("bad bounds on variable {j}")));
            }
            if !self.objective[j].is_finite() {
                return Err(LpError::Malformed(format!("bad cost on variable {j}")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::Malformed(format!("row {i} has a non-finite rhs")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n || !a.is_finite() {
                    return Err(LpError::Malformed(format!("row {i} has a bad entry")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Variable values; meaningful only when `status` is `Optimal`.
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

struct Tableau {
    rows: usize,
    cols: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    /// Basic variable `i` equals `constant[i] + Σ_c coef[i][c] · nonbasic value c`.
    coef: Vec<f64>,
    constant: Vec<f64>,
    nonbasic_value: Vec<f64>,
    basic_value: Vec<f64>,
}

struct Leaving {
    row: usize,
    bound: f64,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let rows = lp.rows.len();
        let cols = lp.num_vars;
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        lower.extend(std::iter::repeat_n(0.0, rows));
        upper.extend(std::iter::repeat_n(f64::INFINITY, rows));
        let mut cost = lp.objective.clone();
        cost.extend(std::iter::repeat_n(0.0, rows));

        let mut coef = vec![0.0; rows * cols];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                coef[i * cols + j] -= a;
            }
        }
        let constant = lp.rows.iter().map(|r| r.rhs).collect();
        let nonbasic_value = (0..cols)
            .map(|j| {
                if lower[j].is_finite() {
                    lower[j]
                } else if upper[j].is_finite() {
                    upper[j]
                } else {
                    0.0
                }
            })
            .collect();
        let mut t = Self {
            rows,
            cols,
            lower,
            upper,
            cost,
            basis: (cols..cols + rows).collect(),
            nonbasic: (0..cols).collect(),
            coef,
            constant,
            nonbasic_value,
            basic_value: vec![0.0; rows],
        };
        t.refresh();
        t
    }

    fn refresh(&mut self) {
        for i in 0..self.rows {
            let row = &self.coef[i * self.cols..(i + 1) * self.cols];
            self.basic_value[i] = self.constant[i]
                + row
                    .iter()
                    .zip(&self.nonbasic_value)
                    .map(|(a, v)| a * v)
                    .sum::<f64>();
        }
    }

    /// -1 below the lower bound, +1 above the upper bound, 0 when feasible.
    fn infeasibility(&self, i: usize) -> f64 {
        let var = self.basis[i];
        let v = self.basic_value[i];
        if v < self.lower[var] - FEAS_TOL {
            -1.0
        } else if v > self.upper[var] + FEAS_TOL {
            1.0
        } else {
            0.0
        }
    }

    fn reduced_costs(&self, basic_cost: &[f64], phase_one: bool) -> Vec<f64> {
        let mut d: Vec<f64> = if phase_one {
            vec![0.0; self.cols]
        } else {
            self.nonbasic.iter().map(|&v| self.cost[v]).collect()
        };
        for (i, &cb) in basic_cost.iter().enumerate() {
            if cb == 0.0 {
                continue;
            }
            let row = &self.coef[i * self.cols..(i + 1) * self.cols];
            for (dc, a) in d.iter_mut().zip(row) {
                *dc += cb * a;
            }
        }
        d
    }

    fn choose_entering(&self, reduced: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (c, &dc) in reduced.iter().enumerate() {
            let var = self.nonbasic[c];
            let value = self.nonbasic_value[c];
            let direction = if dc < -OPT_TOL && value < self.upper[var] {
                1.0
            } else if dc > OPT_TOL && value > self.lower[var] {
                -1.0
            } else {
                continue;
            };
            let better = match best {
                None => true,
                Some((b, _)) if bland => var < self.nonbasic[b],
                Some((b, _)) => dc.abs() > reduced[b].abs(),
            };
            if better {
                best = Some((c, direction));
            }
        }
        best
    }

    /// Largest step along the entering direction, and the row that blocks it
    /// (`None` when the entering variable reaches its own opposite bound).
    fn ratio_test(
        &self,
        col: usize,
        direction: f64,
        phase_one: bool,
        bland: bool,
    ) -> (f64, Option<Leaving>) {
        let entering = self.nonbasic[col];
        let mut step = self.upper[entering] - self.lower[entering];
        if step.is_nan() {
            step = f64::INFINITY;
        }
        let mut leaving: Option<Leaving> = None;
        let mut leaving_rate = 0.0;
        for i in 0..self.rows {
            let rate = direction * self.coef[i * self.cols + col];
            if rate.abs() < PIVOT_TOL {
                continue;
            }
            let var = self.basis[i];
            let v = self.basic_value[i];
            let (lo, hi) = (self.lower[var], self.upper[var]);
            let target = if phase_one && v < lo - FEAS_TOL {
                (rate > 0.0).then_some(lo)
            } else if phase_one && v > hi + FEAS_TOL {
                (rate < 0.0).then_some(hi)
            } else if rate > 0.0 {
                hi.is_finite().then_some(hi)
            } else {
                lo.is_finite().then_some(lo)
            };
            let Some(bound) = target else { continue };
            let limit = ((bound - v) / rate).max(0.0);
            let replace = if limit < step - DEGENERATE_STEP {
                true
            } else if limit <= step + DEGENERATE_STEP {
                match &leaving {
                    None => false,
                    Some(current) if bland => var < self.basis[current.row],
                    Some(_) => rate.abs() > leaving_rate,
                }
            } else {
                false
            };
            if replace {
                step = limit;
                leaving = Some(Leaving { row: i, bound });
                leaving_rate = rate.abs();
            }
        }
        (step, leaving)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let cols = self.cols;
        let p = self.coef[row * cols + col];
        {
            let r = &mut self.coef[row * cols..(row + 1) * cols];
            for (k, a) in r.iter_mut().enumerate() {
                *a = if k == col { 1.0 / p } else { -*a / p };
            }
        }
        self.constant[row] = -self.constant[row] / p;
        let pivot_row: Vec<f64> = self.coef[row * cols..(row + 1) * cols].to_vec();
        let pivot_constant = self.constant[row];
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let f = self.coef[i * cols + col];
            if f == 0.0 {
                continue;
            }
            let r = &mut self.coef[i * cols..(i + 1) * cols];
            r[col] = 0.0;
            for (a, pr) in r.iter_mut().zip(&pivot_row) {
                *a += f * pr;
            }
            self.constant[i] += f * pivot_constant;
        }
    }

    fn values(&self, num_vars: usize) -> Vec<f64> {
        let mut out = vec![0.0; num_vars];
        for (i, &var) in self.basis.iter().enumerate() {
            if var < num_vars {
                out[var] = self.basic_value[i];
            }
        }
        for (c, &var) in self.nonbasic.iter().enumerate() {
            if var < num_vars {
                out[var] = self.nonbasic_value[c];
            }
        }
        out
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.check()?;
    let mut t = Tableau::new(lp);
    let limit = 100 * (t.rows + t.cols) + 1000;
    let mut degenerate_run = 0usize;
    let mut iterations = 0usize;

    let status = loop {
        if iterations > limit {
            return Err(LpError::IterationLimit(limit));
        }
        if iterations.is_multiple_of(REFRESH_EVERY) {
            t.refresh();
        }
        let infeasibility: Vec<f64> = (0..t.rows).map(|i| t.infeasibility(i)).collect();
        let phase_one = infeasibility.iter().any(|&s| s != 0.0);
        let basic_cost: Vec<f64> = if phase_one {
            infeasibility
        } else {
            t.basis.iter().map(|&v| t.cost[v]).collect()
        };
        let reduced = t.reduced_costs(&basic_cost, phase_one);
        let bland = degenerate_run >= BLAND_AFTER;

        let Some((col, direction)) = t.choose_entering(&reduced, bland) else {
            // Confirm with freshly recomputed basic values before stopping.
            let before = t.basic_value.clone();
            t.refresh();
            let drifted = before
                .iter()
                .zip(&t.basic_value)
                .any(|(a, b)| (a - b).abs() > FEAS_TOL);
            if drifted {
                iterations += 1;
                continue;
            }
            break if phase_one {
                LpStatus::Infeasible
            } else {
                LpStatus::Optimal
            };
        };

        let (step, leaving) = t.ratio_test(col, direction, phase_one, bland);
        if step == f64::INFINITY {
            if phase_one {
                return Err(LpError::Numerical);
            }
            break LpStatus::Unbounded;
        }
        iterations += 1;
        degenerate_run = if step <= DEGENERATE_STEP {
            degenerate_run + 1
        } else {
            0
        };

        let delta = direction * step;
        for i in 0..t.rows {
            t.basic_value[i] += t.coef[i * t.cols + col] * delta;
        }
        let entering = t.nonbasic[col];
        match leaving {
            None => {
                t.nonbasic_value[col] = if direction > 0.0 {
                    t.upper[entering]
                } else {
                    t.lower[entering]
                };
            }
            Some(Leaving { row, bound }) => {
                let entering_value = t.nonbasic_value[col] + delta;
                t.pivot(row, col);
                let leaving_var = t.basis[row];
                t.basis[row] = entering;
                t.nonbasic[col] = leaving_var;
                t.nonbasic_value[col] = bound;
                t.basic_value[row] = entering_value;
            }
        }
    };

    let values = t.values(lp.num_vars);
    let objective = match status {
        LpStatus::Optimal => values.iter().zip(&lp.objective).map(|(x, c)| x * c).sum(),
        LpStatus::Unbounded => f64::NEG_INFINITY,
        LpStatus::Infeasible => f64::INFINITY,
    };
    Ok(LpSolution {
        status,
        values,
        objective,
        iterations,
    })
}

/// Where each group of variables lives in an encoded LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LpLayout {
    pub vehicles: usize,
    /// First index of the anticipation variables `x`, anticipation-delay only.
    pub anticipation: Option<usize>,
    /// Index of the makespan epigraph variable.
    pub makespan: Option<usize>,
    /// First index of the lateness variables `y`.
    pub lateness: Option<usize>,
}

impl LpLayout {
    pub fn shifts<'a>(&self, values: &'a [f64]) -> &'a [f64] {
        &values[..self.vehicles]
    }

    pub fn anticipations<'a>(&self, values: &'a [f64]) -> Option<&'a [f64]> {
        self.anticipation
            .map(|start| &values[start..start + self.vehicles])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedLp {
    pub lp: LinearProgram,
    pub layout: LpLayout,
}

fn encode(
    instance: &RecoveryInstance,
    objective: Objective,
    mode: Mode,
) -> Result<EncodedLp, RecoveryError> {
    validate_instance(instance, objective, mode).into_result()?;
    let n = instance.vehicle_count();
    let with_x = mode == Mode::AnticipationDelay;
    let mut layout = LpLayout {
        vehicles: n,
        anticipation: with_x.then_some(n),
        makespan: None,
        lateness: None,
    };
    let mut num_vars = if with_x { 2 * n } else { n };
    match objective {
        Objective::Makespan => {
            layout.makespan = Some(num_vars);
            num_vars += 1;
        }
        Objective::TotalLateness => {
            layout.lateness = Some(num_vars);
            num_vars += n;
        }
        Objective::TotalDelay | Objective::WeightedDelay => {}
    }

    let (alpha, beta) = if with_x {
        (instance.alpha, instance.beta)
    } else {
        (1.0, 0.0)
    };
    let mut lp = LinearProgram::new(num_vars);
    for h in 0..n {
        lp.set_bounds(h, instance.deviations[h], f64::INFINITY);
    }
    if let Some(xs) = layout.anticipation {
        let bounds = instance.require_anticipation_bounds()?;
        for h in 0..n {
            lp.set_bounds(xs + h, 0.0, bounds[h]);
            lp.objective[xs + h] = beta;
        }
    }

    for a in &instance.graph.arcs {
        let mut coeffs = vec![(a.from, 1.0), (a.to, -1.0)];
        if let Some(xs) = layout.anticipation {
            coeffs.extend([(xs + a.from, -1.0), (xs + a.to, 1.0)]);
        }
        lp.add_row(coeffs, a.slack);
    }

    match objective {
        Objective::TotalDelay => {
            for h in 0..n {
                lp.objective[h] = alpha;
            }
        }
        Objective::WeightedDelay => {
            let w = instance.require_weights()?;
            for h in 0..n {
                lp.objective[h] = alpha * w[h];
            }
        }
        Objective::Makespan => {
            let z = layout.makespan.expect("makespan variable allocated");
            let c = instance.require_completion_times()?;
            lp.objective[z] = alpha;
            for h in 0..n {
                // c_h + u_h <= z
                lp.add_row(vec![(h, 1.0), (z, -1.0)], -c[h]);
            }
        }
        Objective::TotalLateness => {
            let ys = layout.lateness.expect("lateness variables allocated");
            let rho = instance.require_due_dates()?;
            for h in 0..n {
                lp.set_bounds(ys + h, 0.0, f64::INFINITY);
                lp.objective[ys + h] = alpha;
                // u_h - ρ_h <= y_h
                lp.add_row(vec![(h, 1.0), (ys + h, -1.0)], rho[h]);
            }
        }
    }
    Ok(EncodedLp { lp, layout })
}

/// Explicit LP of delay-only recovery under `objective`.
pub fn encode_delay_lp(
    instance: &RecoveryInstance,
    objective: Objective,
) -> Result<EncodedLp, RecoveryError> {
    encode(instance, objective, Mode::Delay)
}

/// Explicit LP of anticipation-delay recovery: `alpha * z + beta * Σ x`.
pub fn encode_ad_lp(
    instance: &RecoveryInstance,
    objective: Objective,
) -> Result<EncodedLp, RecoveryError> {
    encode(instance, objective, Mode::AnticipationDelay)
}
