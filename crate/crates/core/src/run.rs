//! Run records and the budget-terminated loops for the single-agent and
//! swarm optimizers.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classic::{apply_schedule, step_in_place, OptimizerState, StepLrSchedule, UpdateRule};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::objectives::Objective;
use crate::swarm::{swarm_step, Swarm, SwarmParams, SwarmVariant};

/// Runs longer than this are downsampled when recorded.
pub const MAX_RECORDED_POINTS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: u64,
    pub theta: Vec<f64>,
    pub loss: f64,
}

/// Outcome of one optimizer run.
///
/// `charged_evals` is what the budget was charged: gradient evaluations for
/// gradient-based methods, function evaluations for swarms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub objective: String,
    pub optimizer: String,
    pub seed: u64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub iterations: u64,
    pub gradient_evals: u64,
    pub function_evals: u64,
    pub charged_evals: u64,
    pub final_loss: f64,
    pub final_distance: Option<f64>,
    /// Training accuracy, for classification objectives.
    #[serde(default)]
    pub final_accuracy: Option<f64>,
    pub wall_time: f64,
    /// Why the run stopped before its budget, if it did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diverged: Option<String>,
}

impl RunRecord {
    pub fn final_theta(&self) -> &[f64] {
        &self.trajectory.last().expect("trajectory holds at least the start point").theta
    }
}

/// Minimum Euclidean distance from `theta` to the objective's listed minima.
pub fn distance_to_optimum(obj: &Objective, theta: &[f64]) -> Result<f64> {
    obj.global_minima()
        .iter()
        .map(|g| g.iter().zip(theta).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::NoKnownOptimum(obj.name().to_string()))
}

/// Keeps every `stride`-th iterate plus the last one.
#[derive(Debug, Clone)]
pub struct Recorder {
    stride: u64,
    total: u64,
    points: Vec<TrajectoryPoint>,
    started: Instant,
    diverged: Option<String>,
}

impl Recorder {
    pub fn new(total_iterations: u64) -> Self {
        let stride = if total_iterations <= MAX_RECORDED_POINTS {
            1
        } else {
            total_iterations.div_ceil(MAX_RECORDED_POINTS)
        };
        Recorder { stride, total: total_iterations, points: Vec::new(), started: Instant::now(), diverged: None }
    }

    pub fn wants(&self, iteration: u64) -> bool {
        iteration.is_multiple_of(self.stride) || iteration == self.total
    }

    pub fn push(&mut self, iteration: u64, theta: &[f64], loss: f64) {
        self.points.push(TrajectoryPoint { iteration, theta: theta.to_vec(), loss });
    }

    /// Records `theta` if `iteration` is kept; `loss` is only evaluated then.
    pub fn offer(&mut self, iteration: u64, theta: &[f64], loss: impl FnOnce() -> f64) {
        if self.wants(iteration) {
            self.push(iteration, theta, loss());
        }
    }

    /// Ends the record at `iteration`, the last iterate that was reached.
    pub fn stop(&mut self, iteration: u64, theta: &[f64], loss: f64, reason: &crate::error::Error) {
        if self.points.last().is_none_or(|p| p.iteration != iteration) {
            self.push(iteration, theta, loss);
        }
        self.diverged = Some(reason.to_string());
    }

    pub fn finish(self, obj: &Objective, optimizer: &str, seed: u64, iterations: u64, charged: u64) -> RunRecord {
        let last = self.points.last().expect("start point recorded");
        let final_distance = distance_to_optimum(obj, &last.theta).ok();
        let counter = obj.counter();
        RunRecord {
            objective: obj.name().to_string(),
            optimizer: optimizer.to_string(),
            seed,
            final_loss: last.loss,
            final_distance,
            final_accuracy: None,
            trajectory: self.points,
            iterations,
            gradient_evals: counter.gradient_evals,
            function_evals: counter.function_evals,
            charged_evals: charged,
            wall_time: self.started.elapsed().as_secs_f64(),
            diverged: self.diverged,
        }
    }
}

/// One single-agent rule for `budget` iterations (one gradient each).
///
/// With a schedule, the loss at the current iterate is checked before every
/// step; this monitoring is not charged against the budget. A non-finite
/// gradient ends the run early and is noted in `diverged`.
pub fn run_classic(
    obj: &mut Objective,
    theta0: &[f64],
    rule: &UpdateRule,
    budget: u64,
    schedule: Option<StepLrSchedule>,
    label: &str,
    seed: u64,
) -> Result<RunRecord> {
    rule.validate()?;
    let mut theta = theta0.to_vec();
    let mut state = OptimizerState::new(theta.len());
    let mut schedule = schedule;
    let mut active = rule.clone();
    let mut rec = Recorder::new(budget);
    rec.push(0, &theta, obj.peek_value(&theta));

    let mut done = 0;
    for t in 1..=budget {
        if let Some(s) = schedule.as_mut().filter(|s| !s.fired) {
            active = apply_schedule(s, &active, obj.peek_value(&theta));
        }
        let g = obj.grad(&theta);
        match step_in_place(&active, &mut state, &mut theta, &g) {
            Ok(()) => rec.offer(t, &theta, || obj.peek_value(&theta)),
            Err(e) if e.is_divergence() => {
                rec.stop(t - 1, &theta, obj.peek_value(&theta), &e);
                break;
            }
            Err(e) => return Err(e),
        }
        done = t;
    }
    let charged = obj.counter().gradient_evals;
    Ok(rec.finish(obj, label, seed, done, charged))
}

/// Swarm baseline under a function-evaluation budget. Initialization
/// evaluates all `N` particles and counts as the first of `budget / N`
/// charged rounds. The recorded trajectory follows `gbest`.
pub fn run_swarm(
    obj: &mut Objective,
    center: &[f64],
    init_half_width: f64,
    variant: SwarmVariant,
    params: &SwarmParams,
    budget: u64,
    rng: &mut RngStream,
    label: &str,
    seed: u64,
) -> Result<RunRecord> {
    params.validate()?;
    let n = params.n_particles as u64;
    let rounds = budget / n;
    let steps = rounds.saturating_sub(1);
    let mut rec = Recorder::new(steps);
    if rounds == 0 {
        rec.push(0, center, obj.peek_value(center));
        return Ok(rec.finish(obj, label, seed, 0, 0));
    }
    let mut swarm = Swarm::init(obj, center, init_half_width, params.n_particles, &mut rng.fork(0));
    let mut step_rng = rng.fork(1);
    rec.push(0, &swarm.gbest, swarm.gbest_value);
    for t in 1..=steps {
        swarm_step(variant, &mut swarm, params, obj, &mut step_rng);
        if rec.wants(t) {
            rec.push(t, &swarm.gbest, swarm.gbest_value);
        }
    }
    let charged = obj.counter().function_evals;
    Ok(rec.finish(obj, label, seed, steps, charged))
}
