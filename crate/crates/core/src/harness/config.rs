//! TOML experiment configuration.
//!
//! ```toml
//! budget = 20000
//! seeds = [0, 1, 2]
//! objectives = ["matyas", "bukin"]
//!
//! [init]                  # optional start points; default_init otherwise
//! bukin = [-7.5, 0.5625]
//!
//! [schedule]              # optional one-shot StepLR
//! trigger_loss = 10.0
//! gamma = 1e-4
//! objectives = ["ackley"] # empty or absent: every objective
//!
//! [logistic]              # only read when "logistic" is an objective
//! dim = 50
//!
//! [[optimizer]]
//! label = "adam"
//! kind = "adam"           # gd momentum adagrad rmsprop adam nadam
//! lr = 0.001              # particlegp pso mpso empso
//! lr_per_objective = { bukin = 0.001 }
//! ```
//!
//! Unknown keys, and keys that do not apply to an optimizer's kind, are
//! rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classic::{RuleKind, StepLrSchedule, UpdateRule};
use crate::error::{Error, Result};
use crate::gp::{HyperGridSpec, PriorMean};
use crate::objectives::{Benchmark, LogisticSpec};
use crate::particle_gp::{GradientMode, ParticleGpConfig, RadiusRule};
use crate::swarm::{SwarmParams, SwarmVariant};

pub const LOGISTIC: &str = "logistic";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub trigger_loss: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objectives: Vec<String>,
}

impl ScheduleSpec {
    pub fn applies_to(&self, objective: &str) -> bool {
        self.objectives.is_empty() || self.objectives.iter().any(|o| o == objective)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogisticSection {
    pub dim: usize,
    pub n_samples: usize,
    pub noise: f64,
    pub batch_size: usize,
    /// The dataset depends only on this seed; run seeds drive batching and
    /// particles.
    pub data_seed: u64,
}

impl Default for LogisticSection {
    fn default() -> Self {
        LogisticSection { dim: 50, n_samples: 1000, noise: 0.1, batch_size: 32, data_seed: 0 }
    }
}

impl LogisticSection {
    pub fn spec(&self) -> LogisticSpec {
        LogisticSpec { dim: self.dim, n_samples: self.n_samples, noise: self.noise, batch_size: self.batch_size }
    }

    fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::config("logistic.dim", "must be at least 2"));
        }
        if self.n_samples < 10 {
            return Err(Error::config("logistic.n_samples", "must be at least 10"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("logistic.batch_size", "must be at least 1"));
        }
        Ok(())
    }
}

/// One `[[optimizer]]` entry. Only the keys relevant to `kind` may be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    pub label: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lr_per_objective: BTreeMap<String, f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal_bias: Option<bool>,

    /// ParticleGP base rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_particles: Option<usize>,
    /// ParticleGP radius `min(radius_cap, lr)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_cap: Option<f64>,
    /// ParticleGP fixed radius; excludes `radius_cap`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_mode: Option<GradientMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gp_noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_mean: Option<PriorMean>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyper_refit_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_pass: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyper_grid: Option<HyperGridSpec>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cognitive: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub social: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_dimension: Option<bool>,
}

/// A fully resolved optimizer for one objective.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Classic(UpdateRule),
    ParticleGp(ParticleGpConfig),
    Swarm { variant: SwarmVariant, params: SwarmParams, init_half_width: f64 },
}

enum Family {
    Classic(RuleKind),
    ParticleGp,
    Swarm(SwarmVariant),
}

impl OptimizerSpec {
    pub fn new(label: impl Into<String>, kind: impl Into<String>) -> Self {
        OptimizerSpec { label: label.into(), kind: kind.into(), ..Default::default() }
    }

    fn field(&self, name: &str) -> String {
        format!("optimizer[{}].{name}", self.label)
    }

    fn family(&self) -> Result<Family> {
        if self.kind == "particlegp" {
            return Ok(Family::ParticleGp);
        }
        if let Ok(k) = self.kind.parse::<RuleKind>() {
            return Ok(Family::Classic(k));
        }
        if let Ok(v) = self.kind.parse::<SwarmVariant>() {
            return Ok(Family::Swarm(v));
        }
        Err(Error::config(self.field("kind"), format!("unknown optimizer kind `{}`", self.kind)))
    }

    fn reject(&self, keys: &[(&str, bool)]) -> Result<()> {
        match keys.iter().find(|(_, set)| *set) {
            Some((name, _)) => {
                Err(Error::config(self.field(name), format!("not applicable to kind `{}`", self.kind)))
            }
            None => Ok(()),
        }
    }

    fn classic_keys(&self) -> [(&'static str, bool); 4] {
        [
            ("beta1", self.beta1.is_some()),
            ("beta2", self.beta2.is_some()),
            ("eps", self.eps.is_some()),
            ("literal_bias", self.literal_bias.is_some()),
        ]
    }

    fn particlegp_keys(&self) -> [(&'static str, bool); 11] {
        [
            ("base", self.base.is_some()),
            ("n_particles", self.n_particles.is_some()),
            ("radius_cap", self.radius_cap.is_some()),
            ("radius", self.radius.is_some()),
            ("gradient_mode", self.gradient_mode.is_some()),
            ("gp_noise", self.gp_noise.is_some()),
            ("jitter", self.jitter.is_some()),
            ("prior_mean", self.prior_mean.is_some()),
            ("hyper_refit_every", self.hyper_refit_every.is_some()),
            ("two_pass", self.two_pass.is_some()),
            ("hyper_grid", self.hyper_grid.is_some()),
        ]
    }

    fn swarm_keys(&self) -> [(&'static str, bool); 7] {
        [
            ("inertia", self.inertia.is_some()),
            ("cognitive", self.cognitive.is_some()),
            ("social", self.social.is_some()),
            ("momentum", self.momentum.is_some()),
            ("decay", self.decay.is_some()),
            ("init_half_width", self.init_half_width.is_some()),
            ("per_dimension", self.per_dimension.is_some()),
        ]
    }

    /// Step size for `objective`: the per-objective override, else `lr`.
    pub fn step_size(&self, objective: &str) -> Option<f64> {
        self.lr_per_objective.get(objective).copied().or(self.lr)
    }

    fn rule(&self, kind: RuleKind, objective: &str) -> Result<UpdateRule> {
        let mut rule = match self.step_size(objective) {
            Some(lr) => UpdateRule::new(kind, lr),
            None => UpdateRule::with_default_step(kind),
        };
        if let Some(b) = self.beta1 {
            rule.beta1 = b;
        }
        if let Some(b) = self.beta2 {
            rule.beta2 = b;
        }
        if let Some(e) = self.eps {
            rule.eps = e;
        }
        if let Some(p) = self.literal_bias {
            rule.literal_bias = p;
        }
        rule.validate().map_err(|e| self.scope(e))?;
        Ok(rule)
    }

    fn scope(&self, e: Error) -> Error {
        match e {
            Error::ConfigInvalid { field, message } => {
                Error::ConfigInvalid { field: self.field(&field), message }
            }
            other => other,
        }
    }

    /// Checks the spec and builds the optimizer used on `objective`.
    pub fn resolve(&self, objective: &str) -> Result<Method> {
        if self.label.is_empty() {
            return Err(Error::config("optimizer.label", "must not be empty"));
        }
        match self.family()? {
            Family::Classic(kind) => {
                self.reject(&self.particlegp_keys())?;
                self.reject(&self.swarm_keys())?;
                Ok(Method::Classic(self.rule(kind, objective)?))
            }
            Family::ParticleGp => {
                self.reject(&self.swarm_keys())?;
                let base: RuleKind = match &self.base {
                    Some(b) => b.parse().map_err(|_| {
                        Error::config(self.field("base"), format!("unknown base rule `{b}`"))
                    })?,
                    None => RuleKind::Gd,
                };
                let defaults = ParticleGpConfig::default();
                let radius_rule = match (self.radius, self.radius_cap) {
                    (Some(_), Some(_)) => {
                        return Err(Error::config(self.field("radius"), "set either radius or radius_cap"))
                    }
                    (Some(r), None) => RadiusRule::Fixed(r),
                    (None, Some(cap)) => RadiusRule::MinOfStep { cap },
                    (None, None) => defaults.radius_rule,
                };
                let cfg = ParticleGpConfig {
                    n_particles: self.n_particles.unwrap_or(defaults.n_particles),
                    radius_rule,
                    base_rule: self.rule(base, objective)?,
                    gp_noise: self.gp_noise.unwrap_or(defaults.gp_noise),
                    jitter: self.jitter.unwrap_or(defaults.jitter),
                    prior_mean: self.prior_mean.unwrap_or(defaults.prior_mean),
                    hyper_grid: self.hyper_grid.unwrap_or(defaults.hyper_grid),
                    gradient_mode: self.gradient_mode.unwrap_or(defaults.gradient_mode),
                    hyper_refit_every: self.hyper_refit_every.unwrap_or(defaults.hyper_refit_every),
                    two_pass: self.two_pass.unwrap_or(defaults.two_pass),
                };
                cfg.validate().map_err(|e| self.scope(e))?;
                Ok(Method::ParticleGp(cfg))
            }
            Family::Swarm(variant) => {
                self.reject(&self.classic_keys())?;
                let mut pgp_keys = self.particlegp_keys();
                // n_particles is shared with the swarms
                pgp_keys[1].1 = false;
                self.reject(&pgp_keys)?;
                if self.lr.is_some() || !self.lr_per_objective.is_empty() {
                    return Err(Error::config(self.field("lr"), "swarms take no step size"));
                }
                let d = SwarmParams::default();
                let params = SwarmParams {
                    inertia: self.inertia.unwrap_or(d.inertia),
                    cognitive: self.cognitive.unwrap_or(d.cognitive),
                    social: self.social.unwrap_or(d.social),
                    momentum: self.momentum.unwrap_or(d.momentum),
                    decay: self.decay.unwrap_or(d.decay),
                    n_particles: self.n_particles.unwrap_or(d.n_particles),
                    per_dimension: self.per_dimension.unwrap_or(d.per_dimension),
                };
                params.validate().map_err(|e| self.scope(e))?;
                let init_half_width = self.init_half_width.unwrap_or(1.0);
                if !(init_half_width > 0.0) {
                    return Err(Error::config(self.field("init_half_width"), "must be positive"));
                }
                Ok(Method::Swarm { variant, params, init_half_width })
            }
        }
    }
}

/// A whole comparison: objectives × optimizers × seeds at one budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub budget: u64,
    pub seeds: Vec<u64>,
    pub objectives: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub init: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logistic: Option<LogisticSection>,
    #[serde(rename = "optimizer")]
    pub optimizers: Vec<OptimizerSpec>,
}

/// One objective and one optimizer over a list of seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub objective: String,
    pub optimizer: OptimizerSpec,
    /// `None` uses the objective's default start.
    pub theta0: Option<Vec<f64>>,
    pub budget: u64,
    pub seeds: Vec<u64>,
    pub schedule: Option<StepLrSchedule>,
    pub logistic: LogisticSection,
}

impl ExperimentConfig {
    pub fn new(objective: impl Into<String>, optimizer: OptimizerSpec, budget: u64, seeds: Vec<u64>) -> Self {
        ExperimentConfig {
            objective: objective.into(),
            optimizer,
            theta0: None,
            budget,
            seeds,
            schedule: None,
            logistic: LogisticSection::default(),
        }
    }

    pub fn validate(&self) -> Result<Method> {
        if self.budget == 0 {
            return Err(Error::config("budget", "must be positive"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        if self.objective == LOGISTIC {
            self.logistic.validate()?;
        } else {
            self.objective.parse::<Benchmark>()?;
        }
        if let Some(theta) = &self.theta0 {
            let dim = if self.objective == LOGISTIC { self.logistic.dim } else { 2 };
            if theta.len() != dim {
                return Err(Error::config(
                    format!("init.{}", self.objective),
                    format!("expected {dim} coordinates, got {}", theta.len()),
                ));
            }
        }
        self.optimizer.resolve(&self.objective)
    }
}

impl SuiteConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }

    /// Expands into one experiment per (objective, optimizer), in file order.
    pub fn experiments(&self) -> Result<Vec<ExperimentConfig>> {
        if self.objectives.is_empty() {
            return Err(Error::config("objectives", "at least one objective is required"));
        }
        if self.optimizers.is_empty() {
            return Err(Error::config("optimizer", "at least one optimizer is required"));
        }
        let mut labels: Vec<&str> = self.optimizers.iter().map(|o| o.label.as_str()).collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::config("optimizer.label", format!("duplicate label `{}`", w[0])));
        }
        for key in self.init.keys() {
            if !self.objectives.contains(key) {
                return Err(Error::config(format!("init.{key}"), "objective not in the objectives list"));
            }
        }

        let mut out = Vec::new();
        for objective in &self.objectives {
            for opt in &self.optimizers {
                let schedule = self
                    .schedule
                    .as_ref()
                    .filter(|s| s.applies_to(objective))
                    .map(|s| StepLrSchedule::new(s.trigger_loss, s.gamma));
                let exp = ExperimentConfig {
                    objective: objective.clone(),
                    optimizer: opt.clone(),
                    theta0: self.init.get(objective).cloned(),
                    budget: self.budget,
                    seeds: self.seeds.clone(),
                    schedule,
                    logistic: self.logistic.unwrap_or_default(),
                };
                exp.validate()?;
                out.push(exp);
            }
        }
        Ok(out)
    }
}
