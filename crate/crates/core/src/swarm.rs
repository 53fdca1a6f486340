//! Particle-swarm baselines: PSO, momentum PSO (M-PSO) and exponentially
//! averaged momentum PSO (EM-PSO).
//!
//! All three share the attraction term `c₁r₁(pbest − θ) + c₂r₂(gbest − θ)`
//! and differ only in how the previous velocity is carried forward:
//!
//! - PSO:    `δ' = w·δ + attraction`
//! - M-PSO:  `δ' = (1 − λ)(δ + attraction) + λ·δ_prev`
//! - EM-PSO: `M' = β·M + (1 − β)·δ`, `δ' = M' + attraction`
//!
//! Personal and global bests are updated after every particle has moved.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::objectives::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwarmVariant {
    Pso,
    Mpso,
    Empso,
}

impl SwarmVariant {
    pub fn name(self) -> &'static str {
        match self {
            SwarmVariant::Pso => "pso",
            SwarmVariant::Mpso => "mpso",
            SwarmVariant::Empso => "empso",
        }
    }
}

impl fmt::Display for SwarmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SwarmVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "pso" => Ok(SwarmVariant::Pso),
            "mpso" => Ok(SwarmVariant::Mpso),
            "empso" => Ok(SwarmVariant::Empso),
            _ => Err(Error::config("kind", format!("unknown swarm variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmParams {
    /// Inertia `w` (PSO only).
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// `λ` (M-PSO only).
    pub momentum: f64,
    /// `β` (EM-PSO only).
    pub decay: f64,
    pub n_particles: usize,
    /// Draw `r₁, r₂` per coordinate instead of one scalar per particle.
    #[serde(default)]
    pub per_dimension: bool,
}

impl Default for SwarmParams {
    fn default() -> Self {
        SwarmParams {
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
            momentum: 0.3,
            decay: 0.9,
            n_particles: 30,
            per_dimension: false,
        }
    }
}

impl SwarmParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::config("n_particles", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.momentum) && self.momentum != 1.0 {
            return Err(Error::config("momentum", "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.decay) {
            return Err(Error::config("decay", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Swarm state: positions, velocities and best-visited bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// Velocity of the step before the current one (M-PSO).
    pub prev_velocities: Vec<Vec<f64>>,
    /// Exponential velocity average (EM-PSO).
    pub momentum: Vec<Vec<f64>>,
    pub pbest: Vec<Vec<f64>>,
    pub pbest_values: Vec<f64>,
    pub gbest: Vec<f64>,
    pub gbest_value: f64,
}

impl Swarm {
    /// Evaluates the given positions and starts with zero velocities.
    pub fn from_positions(positions: Vec<Vec<f64>>, obj: &mut Objective) -> Self {
        let d = positions.first().map_or(0, Vec::len);
        let n = positions.len();
        let values: Vec<f64> = positions.iter().map(|p| obj.eval(p)).collect();
        let (best_idx, _) = values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        Swarm {
            gbest: positions[best_idx].clone(),
            gbest_value: values[best_idx],
            pbest: positions.clone(),
            pbest_values: values,
            velocities: vec![vec![0.0; d]; n],
            prev_velocities: vec![vec![0.0; d]; n],
            momentum: vec![vec![0.0; d]; n],
            positions,
        }
    }

    /// Positions drawn uniformly from the box `center ± half_width`.
    pub fn init(
        obj: &mut Objective,
        center: &[f64],
        half_width: f64,
        n_particles: usize,
        rng: &mut RngStream,
    ) -> Self {
        let positions = (0..n_particles)
            .map(|_| center.iter().map(|c| c + rng.uniform_range(-half_width, half_width)).collect())
            .collect();
        Self::from_positions(positions, obj)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

fn coefficients(rng: &mut RngStream, d: usize, per_dimension: bool) -> (Vec<f64>, Vec<f64>) {
    if per_dimension {
        let r1 = (0..d).map(|_| rng.uniform()).collect();
        let r2 = (0..d).map(|_| rng.uniform()).collect();
        (r1, r2)
    } else {
        let (a, b) = (rng.uniform(), rng.uniform());
        (vec![a; d], vec![b; d])
    }
}

fn advance(
    s: &mut Swarm,
    p: &SwarmParams,
    obj: &mut Objective,
    rng: &mut RngStream,
    mut velocity: impl FnMut(usize, usize, f64) -> f64,
) {
    let d = s.gbest.len();
    for i in 0..s.len() {
        let (r1, r2) = coefficients(rng, d, p.per_dimension);
        for k in 0..d {
            let x = s.positions[i][k];
            let pull = p.cognitive * r1[k] * (s.pbest[i][k] - x);
            let attraction = pull + p.social * r2[k] * (s.gbest[k] - x);
            let new_v = velocity(i, k, attraction);
            s.prev_velocities[i][k] = s.velocities[i][k];
            s.velocities[i][k] = new_v;
            s.positions[i][k] = x + new_v;
        }
    }
    // best bookkeeping is a reduction after all particles moved
    for i in 0..s.len() {
        let value = obj.eval(&s.positions[i]);
        if value < s.pbest_values[i] {
            s.pbest_values[i] = value;
            s.pbest[i] = s.positions[i].clone();
        }
    }
    for i in 0..s.len() {
        if s.pbest_values[i] < s.gbest_value {
            s.gbest_value = s.pbest_values[i];
            s.gbest = s.pbest[i].clone();
        }
    }
}

pub fn pso_step(s: &mut Swarm, p: &SwarmParams, obj: &mut Objective, rng: &mut RngStream) {
    let velocities = s.velocities.clone();
    let w = p.inertia;
    advance(s, p, obj, rng, |i, k, attraction| w * velocities[i][k] + attraction);
}

pub fn mpso_step(s: &mut Swarm, p: &SwarmParams, obj: &mut Objective, rng: &mut RngStream) {
    let (velocities, prev) = (s.velocities.clone(), s.prev_velocities.clone());
    let lambda = p.momentum;
    advance(s, p, obj, rng, |i, k, attraction| {
        (1.0 - lambda) * (velocities[i][k] + attraction) + lambda * prev[i][k]
    });
}

pub fn empso_step(s: &mut Swarm, p: &SwarmParams, obj: &mut Objective, rng: &mut RngStream) {
    let beta = p.decay;
    for (m_row, v_row) in s.momentum.iter_mut().zip(&s.velocities) {
        for (m, v) in m_row.iter_mut().zip(v_row) {
            *m = beta * *m + (1.0 - beta) * v;
        }
    }
    let momentum = s.momentum.clone();
    advance(s, p, obj, rng, |i, k, attraction| momentum[i][k] + attraction);
}

pub fn swarm_step(
    variant: SwarmVariant,
    s: &mut Swarm,
    p: &SwarmParams,
    obj: &mut Objective,
    rng: &mut RngStream,
) {
    match variant {
        SwarmVariant::Pso => pso_step(s, p, obj, rng),
        SwarmVariant::Mpso => mpso_step(s, p, obj, rng),
        SwarmVariant::Empso => empso_step(s, p, obj, rng),
    }
}
