//! Single-agent update rules: GD, Momentum, AdaGrad, RMSProp, Adam, Nadam.
//!
//! Each rule maps `(θ, g, state)` to `θ' = θ + δ`. Adaptive rules divide by
//! `max(√v, ε)`, which avoids a zero denominator on the first step without
//! perturbing steps whose root exceeds `ε`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Gd,
    Momentum,
    Adagrad,
    Rmsprop,
    Adam,
    Nadam,
}

impl RuleKind {
    pub const ALL: [RuleKind; 6] = [
        RuleKind::Gd,
        RuleKind::Momentum,
        RuleKind::Adagrad,
        RuleKind::Rmsprop,
        RuleKind::Adam,
        RuleKind::Nadam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Gd => "gd",
            RuleKind::Momentum => "momentum",
            RuleKind::Adagrad => "adagrad",
            RuleKind::Rmsprop => "rmsprop",
            RuleKind::Adam => "adam",
            RuleKind::Nadam => "nadam",
        }
    }

    /// Documented default step size. Every rule reaches `‖θ‖ < 1e-3` on
    /// `½‖θ‖²` from `‖θ₀‖ ≤ 10` within `10⁵` steps at this value.
    pub fn default_step_size(self) -> f64 {
        match self {
            RuleKind::Gd => 0.1,
            RuleKind::Momentum => 0.05,
            RuleKind::Adagrad => 1.0,
            RuleKind::Rmsprop => 0.001,
            RuleKind::Adam => 0.01,
            RuleKind::Nadam => 0.01,
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config("rule", format!("unknown update rule `{s}`")))
    }
}

/// One update rule and its hyperparameters.
///
/// `beta1` is the momentum factor (Momentum), first-moment decay (Adam) and
/// the constant `μ` schedule (Nadam). `beta2` is the second-moment decay
/// (RMSProp, Adam) and `ν` (Nadam).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateRule {
    pub kind: RuleKind,
    pub step_size: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Adam only: divide by `1 − β` instead of `1 − βᵗ`.
    #[serde(default)]
    pub literal_bias: bool,
}

impl UpdateRule {
    pub fn new(kind: RuleKind, step_size: f64) -> Self {
        let beta2 = if kind == RuleKind::Rmsprop { 0.99 } else { 0.999 };
        UpdateRule { kind, step_size, beta1: 0.9, beta2, eps: 1e-8, literal_bias: false }
    }

    pub fn with_default_step(kind: RuleKind) -> Self {
        Self::new(kind, kind.default_step_size())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::config("step_size", "must be positive and finite"));
        }
        if !(0.0..1.0).contains(&self.beta1) {
            return Err(Error::config("beta1", "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::config("beta2", "must lie in [0, 1)"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::config("eps", "must be positive"));
        }
        Ok(())
    }
}

/// Moment buffers carried between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    /// First moment, or the previous step `δ` for Momentum.
    pub m: Vec<f64>,
    /// Second moment (accumulated for AdaGrad, decayed otherwise).
    pub v: Vec<f64>,
    pub t: u64,
    /// Nadam's running `∏ μᵢ`.
    pub mu_product: f64,
}

impl OptimizerState {
    pub fn new(dim: usize) -> Self {
        OptimizerState { m: vec![0.0; dim], v: vec![0.0; dim], t: 0, mu_product: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }
}

/// Applies one update; returns the new parameters and state.
pub fn step(
    rule: &UpdateRule,
    state: &OptimizerState,
    theta: &[f64],
    grad: &[f64],
) -> Result<(Vec<f64>, OptimizerState)> {
    let mut next_state = state.clone();
    let mut next = theta.to_vec();
    step_in_place(rule, &mut next_state, &mut next, grad)?;
    Ok((next, next_state))
}

/// In-place form of [`step`].
pub fn step_in_place(
    rule: &UpdateRule,
    state: &mut OptimizerState,
    theta: &mut [f64],
    grad: &[f64],
) -> Result<()> {
    let d = theta.len();
    if grad.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: grad.len() });
    }
    if state.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: state.dim() });
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient);
    }

    state.t += 1;
    let t = state.t as i32;
    let alpha = rule.step_size;
    let eps = rule.eps;
    let guard = |v: f64| v.sqrt().max(eps);

    match rule.kind {
        RuleKind::Gd => {
            for (th, g) in theta.iter_mut().zip(grad) {
                *th -= alpha * g;
            }
        }
        RuleKind::Momentum => {
            for ((th, g), prev) in theta.iter_mut().zip(grad).zip(state.m.iter_mut()) {
                let delta = -alpha * g + rule.beta1 * *prev;
                *prev = delta;
                *th += delta;
            }
        }
        RuleKind::Adagrad => {
            for ((th, g), v) in theta.iter_mut().zip(grad).zip(state.v.iter_mut()) {
                *v += g * g;
                *th -= alpha * (g / guard(*v));
            }
        }
        RuleKind::Rmsprop => {
            let b2 = rule.beta2;
            for ((th, g), v) in theta.iter_mut().zip(grad).zip(state.v.iter_mut()) {
                *v = b2 * *v + (1.0 - b2) * g * g;
                *th -= alpha * (g / guard(*v));
            }
        }
        RuleKind::Adam => {
            let (b1, b2) = (rule.beta1, rule.beta2);
            let (c1, c2) = if rule.literal_bias {
                (1.0 - b1, 1.0 - b2)
            } else {
                (1.0 - b1.powi(t), 1.0 - b2.powi(t))
            };
            for (k, (th, g)) in theta.iter_mut().zip(grad).enumerate() {
                let m = &mut state.m[k];
                let v = &mut state.v[k];
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                *th -= alpha * ((*m / c1) / guard(*v / c2));
            }
        }
        RuleKind::Nadam => {
            // Constant schedule μ_t = β₁; the product is tracked generally.
            let (mu_now, mu_next, nu) = (rule.beta1, rule.beta1, rule.beta2);
            let prod_now = state.mu_product * mu_now;
            let prod_next = prod_now * mu_next;
            state.mu_product = prod_now;
            let c2 = 1.0 - nu.powi(t);
            for (k, (th, g)) in theta.iter_mut().zip(grad).enumerate() {
                let m = &mut state.m[k];
                let v = &mut state.v[k];
                *m = mu_now * *m + (1.0 - mu_now) * g;
                *v = nu * *v + (1.0 - nu) * g * g;
                let m_hat = mu_next * *m / (1.0 - prod_next) + (1.0 - mu_now) * g / (1.0 - prod_now);
                *th -= alpha * (m_hat / guard(*v / c2));
            }
        }
    }
    Ok(())
}

/// One-shot learning-rate decay fired the first time the loss drops below
/// `trigger_loss`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLrSchedule {
    pub trigger_loss: f64,
    pub gamma: f64,
    #[serde(default)]
    pub fired: bool,
}

impl StepLrSchedule {
    pub fn new(trigger_loss: f64, gamma: f64) -> Self {
        StepLrSchedule { trigger_loss, gamma, fired: false }
    }
}

/// Returns the rule to use after observing `current_loss`.
pub fn apply_schedule(s: &mut StepLrSchedule, rule: &UpdateRule, current_loss: f64) -> UpdateRule {
    let mut out = rule.clone();
    if !s.fired && current_loss < s.trigger_loss {
        out.step_size *= s.gamma;
        s.fired = true;
    }
    out
}
