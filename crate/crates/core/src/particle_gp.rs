//! ParticleGP: sample a particle cloud around the agent, regress each
//! gradient component on its own coordinate with a scalar GP, and feed the
//! posterior gradient at the agent into a classic update rule.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classic::{apply_schedule, step_in_place, OptimizerState, RuleKind, StepLrSchedule, UpdateRule};
use crate::error::{Error, Result};
use crate::gp::{
    fit, optimize_hyperparams, posterior_at, GpModel, HyperGridSpec, Kernel, PriorMean,
    DEFAULT_JITTER, DEFAULT_NOISE,
};
use crate::numerics::{sample_mvn_isotropic, sample_normal, RngStream};
use crate::objectives::Objective;
use crate::run::{Recorder, RunRecord};

/// Radius of the particle cloud at step size `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusRule {
    /// `min(cap, α)`.
    MinOfStep { cap: f64 },
    Fixed(f64),
}

impl RadiusRule {
    pub fn radius(&self, step_size: f64) -> f64 {
        match *self {
            RadiusRule::MinOfStep { cap } => cap.min(step_size),
            RadiusRule::Fixed(r) => r,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientMode {
    #[default]
    Sample,
    Mean,
}

impl fmt::Display for GradientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientMode::Sample => "sample",
            GradientMode::Mean => "mean",
        })
    }
}

impl FromStr for GradientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sample" => Ok(GradientMode::Sample),
            "mean" => Ok(GradientMode::Mean),
            _ => Err(Error::config("gradient_mode", format!("expected `sample` or `mean`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleGpConfig {
    pub n_particles: usize,
    pub radius_rule: RadiusRule,
    pub base_rule: UpdateRule,
    pub gp_noise: f64,
    pub jitter: f64,
    pub prior_mean: PriorMean,
    pub hyper_grid: HyperGridSpec,
    pub gradient_mode: GradientMode,
    /// Re-run the hyperparameter search every this many iterations; the
    /// previous kernels are reused in between.
    pub hyper_refit_every: usize,
    /// Form a posterior before the hyperparameter search as well as after.
    pub two_pass: bool,
}

impl Default for ParticleGpConfig {
    fn default() -> Self {
        ParticleGpConfig {
            n_particles: 100,
            radius_rule: RadiusRule::MinOfStep { cap: 0.1 },
            base_rule: UpdateRule::with_default_step(RuleKind::Gd),
            gp_noise: DEFAULT_NOISE,
            jitter: DEFAULT_JITTER,
            prior_mean: PriorMean::Zero,
            hyper_grid: HyperGridSpec::default(),
            gradient_mode: GradientMode::Sample,
            hyper_refit_every: 1,
            two_pass: false,
        }
    }
}

impl ParticleGpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::config("n_particles", "must be at least 1"));
        }
        if self.hyper_refit_every == 0 {
            return Err(Error::config("hyper_refit_every", "must be at least 1"));
        }
        if !(self.gp_noise >= 0.0) {
            return Err(Error::config("gp_noise", "must be non-negative"));
        }
        if !(self.jitter >= 0.0) {
            return Err(Error::config("jitter", "must be non-negative"));
        }
        let r = match self.radius_rule {
            RadiusRule::MinOfStep { cap } => cap.min(self.base_rule.step_size),
            RadiusRule::Fixed(r) => r,
        };
        if !(r > 0.0) {
            return Err(Error::config("radius", "must be positive"));
        }
        self.hyper_grid.validate()?;
        self.base_rule.validate()
    }
}

/// Particle positions and the true gradients observed there.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    pub positions: Vec<Vec<f64>>,
    pub gradients: Vec<Vec<f64>>,
    pub radius: f64,
}

impl ParticleCloud {
    /// Evaluates `obj.grad` at every position (charged once each).
    pub fn observe(positions: Vec<Vec<f64>>, radius: f64, obj: &mut Objective) -> Self {
        let gradients = positions.iter().map(|p| obj.grad(p)).collect();
        ParticleCloud { positions, gradients, radius }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn column(rows: &[Vec<f64>], i: usize) -> Vec<f64> {
        rows.iter().map(|r| r[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub sampled: Vec<f64>,
}

/// `N` draws from `N(θ⁰, r²I)` with `r` from the radius rule at step `α`.
pub fn sample_particles(
    theta0: &[f64],
    cfg: &ParticleGpConfig,
    step_size: f64,
    rng: &mut RngStream,
) -> Result<Vec<Vec<f64>>> {
    let radius = cfg.radius_rule.radius(step_size);
    (0..cfg.n_particles).map(|_| sample_mvn_isotropic(rng, theta0, radius)).collect()
}

/// Per-dimension GP gradient estimator. Keeps the last selected kernels so
/// the hyperparameter search can be skipped between refits.
#[derive(Debug, Clone)]
pub struct GradientEstimator {
    cfg: ParticleGpConfig,
    kernels: Vec<Option<Kernel>>,
    calls: u64,
}

impl GradientEstimator {
    pub fn new(cfg: &ParticleGpConfig) -> Self {
        GradientEstimator { cfg: cfg.clone(), kernels: Vec::new(), calls: 0 }
    }

    pub fn kernels(&self) -> &[Option<Kernel>] {
        &self.kernels
    }

    /// Dimension `i` draws from `rng.fork(i)`, so the result does not depend
    /// on how the per-dimension fits are scheduled.
    pub fn estimate(
        &mut self,
        cloud: &ParticleCloud,
        theta0: &[f64],
        rng: &RngStream,
    ) -> Result<GradientEstimate> {
        let d = theta0.len();
        if cloud.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if let Some(bad) = cloud.positions.iter().chain(&cloud.gradients).find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
        }
        if self.kernels.len() != d {
            self.kernels = vec![None; d];
        }
        let refit = self.calls.is_multiple_of(self.cfg.hyper_refit_every as u64);
        self.calls += 1;

        let cfg = &self.cfg;
        let previous = &self.kernels;
        let per_dim: Vec<Result<(f64, f64, f64, Kernel)>> = (0..d)
            .into_par_iter()
            .map(|i| {
                let x = ParticleCloud::column(&cloud.positions, i);
                let y = ParticleCloud::column(&cloud.gradients, i);
                let start = previous[i].unwrap_or_default();
                let base = GpModel::new(x, y, start)?
                    .with_noise(cfg.gp_noise)
                    .with_jitter(cfg.jitter)
                    .with_prior_mean(cfg.prior_mean);
                let model = match previous[i] {
                    Some(_) if !refit => fit(base)?,
                    _ => {
                        if cfg.two_pass {
                            let first = fit(base.clone())?;
                            posterior_at(&first, theta0[i])?;
                        }
                        let grid = cfg.hyper_grid.resolve(cloud.radius, base.y_train(), base.prior_mean_value());
                        optimize_hyperparams(&base, &grid)?
                    }
                };
                let post = posterior_at(&model, theta0[i])?;
                let draw = match cfg.gradient_mode {
                    GradientMode::Mean => post.mean,
                    GradientMode::Sample => sample_normal(&mut rng.fork(i as u64), post.mean, post.variance)?,
                };
                Ok((post.mean, post.variance, draw, model.kernel()))
            })
            .collect();

        let mut est = GradientEstimate {
            mean: Vec::with_capacity(d),
            variance: Vec::with_capacity(d),
            sampled: Vec::with_capacity(d),
        };
        for (i, r) in per_dim.into_iter().enumerate() {
            let (m, v, s, k) = r?;
            est.mean.push(m);
            est.variance.push(v);
            est.sampled.push(s);
            self.kernels[i] = Some(k);
        }
        Ok(est)
    }
}

/// Stateless estimate with a full hyperparameter search in every dimension.
pub fn estimate_gradient(
    cloud: &ParticleCloud,
    theta0: &[f64],
    cfg: &ParticleGpConfig,
    rng: &RngStream,
) -> Result<GradientEstimate> {
    GradientEstimator::new(cfg).estimate(cloud, theta0, rng)
}

/// The agent: base-rule state, kernel cache and a per-iteration rng tree.
#[derive(Debug, Clone)]
pub struct ParticleGp {
    cfg: ParticleGpConfig,
    state: OptimizerState,
    estimator: GradientEstimator,
    rng: RngStream,
    iteration: u64,
}

impl ParticleGp {
    pub fn new(cfg: &ParticleGpConfig, dim: usize, rng: RngStream) -> Result<Self> {
        cfg.validate()?;
        Ok(ParticleGp {
            cfg: cfg.clone(),
            state: OptimizerState::new(dim),
            estimator: GradientEstimator::new(cfg),
            rng,
            iteration: 0,
        })
    }

    pub fn state(&self) -> &OptimizerState {
        &self.state
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// One iteration with `rule` (the base rule, possibly with a decayed
    /// step). A singular cloud is resampled once before giving up.
    pub fn step(&mut self, theta: &mut [f64], obj: &mut Objective, rule: &UpdateRule) -> Result<GradientEstimate> {
        let branch = self.rng.fork(self.iteration);
        self.iteration += 1;
        let radius = self.cfg.radius_rule.radius(rule.step_size);
        let mut estimate = None;
        for attempt in 0..2u64 {
            let positions = sample_particles(theta, &self.cfg, rule.step_size, &mut branch.fork(2 * attempt))?;
            let cloud = ParticleCloud::observe(positions, radius, obj);
            match self.estimator.estimate(&cloud, theta, &branch.fork(2 * attempt + 1)) {
                Ok(e) => {
                    estimate = Some(e);
                    break;
                }
                Err(Error::NotPositiveDefinite { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let estimate = estimate.ok_or(Error::DegenerateCloud)?;
        step_in_place(rule, &mut self.state, theta, &estimate.sampled)?;
        Ok(estimate)
    }
}

/// One ParticleGP step from an explicit optimizer state, using the config's
/// base rule at step size `step_size`.
pub fn particlegp_step(
    theta0: &[f64],
    state: &OptimizerState,
    cfg: &ParticleGpConfig,
    obj: &mut Objective,
    step_size: f64,
    rng: RngStream,
) -> Result<(Vec<f64>, OptimizerState)> {
    let mut agent = ParticleGp::new(cfg, theta0.len(), rng)?;
    agent.state = state.clone();
    let mut rule = cfg.base_rule.clone();
    rule.step_size = step_size;
    let mut theta = theta0.to_vec();
    agent.step(&mut theta, obj, &rule)?;
    Ok((theta, agent.state))
}

/// Iterates until another `N` gradients would exceed `budget`.
pub fn run(
    obj: &mut Objective,
    theta0: &[f64],
    cfg: &ParticleGpConfig,
    budget: u64,
    rng: RngStream,
    schedule: Option<StepLrSchedule>,
    label: &str,
    seed: u64,
) -> Result<RunRecord> {
    let mut agent = ParticleGp::new(cfg, theta0.len(), rng)?;
    let n = cfg.n_particles as u64;
    let iterations = budget / n;
    let mut theta = theta0.to_vec();
    let mut rule = cfg.base_rule.clone();
    let mut schedule = schedule;
    let mut rec = Recorder::new(iterations);
    rec.push(0, &theta, obj.peek_value(&theta));
    let start = obj.counter().gradient_evals;

    for t in 1..=iterations {
        if obj.counter().gradient_evals - start + n > budget {
            break;
        }
        if let Some(s) = schedule.as_mut().filter(|s| !s.fired) {
            rule = apply_schedule(s, &rule, obj.peek_value(&theta));
        }
        match agent.step(&mut theta, obj, &rule) {
            Ok(_) => rec.offer(t, &theta, || obj.peek_value(&theta)),
            Err(e) if e.is_divergence() => {
                rec.stop(t - 1, &theta, obj.peek_value(&theta), &e);
                return Ok(rec.finish(obj, label, seed, t - 1, obj.counter().gradient_evals - start));
            }
            Err(e) => return Err(e),
        }
    }
    let charged = obj.counter().gradient_evals - start;
    Ok(rec.finish(obj, label, seed, agent.iteration(), charged))
}
