//! Particle-cloud Gaussian-process gradient estimation (ParticleGP), the
//! single-agent and swarm optimizers it is compared against, and an
//! equal-budget benchmark harness.

pub mod classic;
pub mod error;
pub mod gp;
pub mod harness;
pub mod numerics;
pub mod objectives;
pub mod particle_gp;
pub mod run;
pub mod swarm;

pub use classic::{OptimizerState, RuleKind, StepLrSchedule, UpdateRule};
pub use error::{Error, Result};
pub use gp::{GpModel, HyperGrid, HyperGridSpec, Kernel, Posterior, PriorMean};
pub use harness::{compare, run_experiment, Comparison, ExperimentConfig, OptimizerSpec, ResultsTable, SuiteConfig};
pub use numerics::RngStream;
pub use objectives::{make_benchmark, Benchmark, Objective};
pub use particle_gp::{GradientEstimate, GradientMode, ParticleCloud, ParticleGp, ParticleGpConfig, RadiusRule};
pub use run::{distance_to_optimum, RunRecord, TrajectoryPoint};
pub use swarm::{Swarm, SwarmParams, SwarmVariant};
