//! Equal-budget comparisons: runs every (objective, optimizer, seed) triple,
//! assembles the results table and writes the output files.

mod config;
mod output;
pub mod presets;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, LogisticSection, Method, OptimizerSpec, ScheduleSpec, SuiteConfig, LOGISTIC};
pub use output::{
    emit_trajectories, read_trajectories, write_outputs, write_results_csv, write_results_json, OutputFormat,
    TrajectoryRow,
};

use crate::error::Result;
use crate::numerics::RngStream;
use crate::objectives::{make_benchmark, make_logistic, Dataset, LogisticTask, Objective};
use crate::particle_gp;
use crate::run::{run_classic, run_swarm, RunRecord};

pub use crate::run::distance_to_optimum;

/// FNV-1a, used to give every (objective, optimizer) pair its own stream.
fn stream_id(objective: &str, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in objective.bytes().chain([0u8]).chain(label.bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn build_objective(cfg: &ExperimentConfig, rng: &RngStream) -> Result<(Objective, Option<Arc<Dataset>>)> {
    if cfg.objective == LOGISTIC {
        let spec = cfg.logistic.spec();
        let (_, data) = make_logistic(spec, &mut RngStream::new(cfg.logistic.data_seed, 0));
        let task = LogisticTask::new(Arc::clone(&data), spec.batch_size, rng.fork(u64::MAX));
        let obj = Objective::new(LOGISTIC, spec.dim, Box::new(task), Vec::new(), vec![0.0; spec.dim]);
        Ok((obj, Some(data)))
    } else {
        Ok((make_benchmark(&cfg.objective)?, None))
    }
}

fn run_seed(cfg: &ExperimentConfig, method: &Method, seed: u64) -> Result<RunRecord> {
    let label = cfg.optimizer.label.as_str();
    let rng = RngStream::new(seed, stream_id(&cfg.objective, label));
    let (mut obj, data) = build_objective(cfg, &rng)?;
    let theta0 = cfg.theta0.clone().unwrap_or_else(|| obj.default_init().to_vec());
    let schedule = cfg.schedule.clone();
    let mut record = match method {
        Method::Classic(rule) => run_classic(&mut obj, &theta0, rule, cfg.budget, schedule, label, seed)?,
        Method::ParticleGp(pgp) => {
            particle_gp::run(&mut obj, &theta0, pgp, cfg.budget, rng.fork(0), schedule, label, seed)?
        }
        Method::Swarm { variant, params, init_half_width } => run_swarm(
            &mut obj,
            &theta0,
            *init_half_width,
            *variant,
            params,
            cfg.budget,
            &mut rng.fork(0),
            label,
            seed,
        )?,
    };
    if let Some(data) = data {
        record.final_accuracy = Some(data.accuracy(record.final_theta()));
    }
    Ok(record)
}

/// One record per seed, in seed order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let method = cfg.validate()?;
    cfg.seeds.par_iter().map(|&seed| run_seed(cfg, &method, seed)).collect()
}

/// Per-seed row of the results table. Group columns repeat the median and
/// best distance of the row's (objective, optimizer) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub objective: String,
    pub optimizer: String,
    pub seed: u64,
    pub final_distance: Option<f64>,
    pub final_loss: f64,
    pub final_accuracy: Option<f64>,
    pub iterations: u64,
    pub gradient_evals: u64,
    pub function_evals: u64,
    pub charged_evals: u64,
    pub median_distance: Option<f64>,
    pub best_distance: Option<f64>,
    pub diverged: bool,
}

/// Aggregates over the seeds of one (objective, optimizer) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub objective: String,
    pub optimizer: String,
    pub seeds: usize,
    pub median_distance: Option<f64>,
    pub best_distance: Option<f64>,
    pub median_loss: f64,
    pub median_accuracy: Option<f64>,
    pub median_charged_evals: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
    pub groups: Vec<GroupSummary>,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn collect_some(values: impl Iterator<Item = Option<f64>>) -> Option<Vec<f64>> {
    values.collect()
}

impl ResultsTable {
    /// `groups[i]` holds the records of one (objective, optimizer) pair.
    pub fn from_groups(groups: &[Vec<RunRecord>]) -> Self {
        let mut rows = Vec::new();
        let mut summaries = Vec::new();
        for recs in groups.iter().filter(|g| !g.is_empty()) {
            let dist = collect_some(recs.iter().map(|r| r.final_distance));
            let acc = collect_some(recs.iter().map(|r| r.final_accuracy));
            let median_distance = dist.as_deref().and_then(median);
            let best_distance = dist.as_ref().and_then(|d| d.iter().copied().min_by(f64::total_cmp));
            let losses: Vec<f64> = recs.iter().map(|r| r.final_loss).collect();
            let evals: Vec<f64> = recs.iter().map(|r| r.charged_evals as f64).collect();
            summaries.push(GroupSummary {
                objective: recs[0].objective.clone(),
                optimizer: recs[0].optimizer.clone(),
                seeds: recs.len(),
                median_distance,
                best_distance,
                median_loss: median(&losses).unwrap_or(f64::NAN),
                median_accuracy: acc.as_deref().and_then(median),
                median_charged_evals: median(&evals).unwrap_or(0.0),
            });
            rows.extend(recs.iter().map(|r| ResultRow {
                objective: r.objective.clone(),
                optimizer: r.optimizer.clone(),
                seed: r.seed,
                final_distance: r.final_distance,
                final_loss: r.final_loss,
                final_accuracy: r.final_accuracy,
                iterations: r.iterations,
                gradient_evals: r.gradient_evals,
                function_evals: r.function_evals,
                charged_evals: r.charged_evals,
                median_distance,
                best_distance,
                diverged: r.diverged.is_some(),
            }));
        }
        ResultsTable { rows, groups: summaries }
    }

    pub fn group(&self, objective: &str, optimizer: &str) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.objective == objective && g.optimizer == optimizer)
    }

    pub fn rows_for<'a>(&'a self, objective: &'a str, optimizer: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.objective == objective && r.optimizer == optimizer)
    }
}

/// Records grouped per experiment, plus the table built from them.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub table: ResultsTable,
    pub records: Vec<Vec<RunRecord>>,
}

impl Comparison {
    pub fn all_records(&self) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().flatten()
    }
}

/// Runs every experiment for every seed (in parallel) and tabulates.
pub fn compare(cfgs: &[ExperimentConfig]) -> Result<Comparison> {
    let methods: Vec<Method> = cfgs.iter().map(ExperimentConfig::validate).collect::<Result<_>>()?;
    let jobs: Vec<(usize, u64)> =
        cfgs.iter().enumerate().flat_map(|(i, c)| c.seeds.iter().map(move |&s| (i, s))).collect();
    let done: Vec<RunRecord> =
        jobs.par_iter().map(|&(i, seed)| run_seed(&cfgs[i], &methods[i], seed)).collect::<Result<_>>()?;

    let mut records: Vec<Vec<RunRecord>> = cfgs.iter().map(|c| Vec::with_capacity(c.seeds.len())).collect();
    for (&(i, _), rec) in jobs.iter().zip(done) {
        records[i].push(rec);
    }
    Ok(Comparison { table: ResultsTable::from_groups(&records), records })
}
