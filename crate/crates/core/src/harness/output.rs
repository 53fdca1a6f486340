//! results.csv / results.json, trajectories.csv, run_meta.json and the
//! echoed config.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::{Comparison, ResultsTable, SuiteConfig};
use crate::error::{Error, Result};
use crate::run::RunRecord;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::config("format", format!("expected `csv` or `json`, got `{s}`"))),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_results_csv(table: &ResultsTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "objective",
        "optimizer",
        "seed",
        "final_distance",
        "final_loss",
        "final_accuracy",
        "iterations",
        "gradient_evals",
        "function_evals",
        "charged_evals",
        "median_distance",
        "best_distance",
        "diverged",
    ])?;
    for r in &table.rows {
        w.write_record([
            r.objective.clone(),
            r.optimizer.clone(),
            r.seed.to_string(),
            opt(r.final_distance),
            r.final_loss.to_string(),
            opt(r.final_accuracy),
            r.iterations.to_string(),
            r.gradient_evals.to_string(),
            r.function_evals.to_string(),
            r.charged_evals.to_string(),
            opt(r.median_distance),
            opt(r.best_distance),
            r.diverged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_json(table: &ResultsTable, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, table)?;
    f.write_all(b"\n")?;
    Ok(())
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one row per recorded iterate:
/// `objective,optimizer,seed,iteration,loss,theta_0,...,theta_{d-1}`.
pub fn emit_trajectories<'a>(records: impl IntoIterator<Item = &'a RunRecord>, path: &Path) -> Result<()> {
    let records: Vec<&RunRecord> = records.into_iter().collect();
    let first = records.first().ok_or(Error::NoData)?;
    let d = first.final_theta().len();
    if let Some(bad) = records.iter().find(|r| r.final_theta().len() != d) {
        return Err(Error::Schema(format!(
            "mixed dimensions in one trajectory file: {d} and {} ({})",
            bad.final_theta().len(),
            bad.objective
        )));
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = ["objective", "optimizer", "seed", "iteration", "loss"].map(String::from).to_vec();
    header.extend((0..d).map(|i| format!("theta_{i}")));
    w.write_record(&header)?;
    for r in records {
        for p in &r.trajectory {
            let mut row = vec![r.objective.clone(), r.optimizer.clone(), r.seed.to_string(), p.iteration.to_string()];
            row.push(float(p.loss));
            row.extend(p.theta.iter().map(|&t| float(t)));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub objective: String,
    pub optimizer: String,
    pub seed: u64,
    pub iteration: u64,
    pub loss: f64,
    pub theta: Vec<f64>,
}

fn parse<T: FromStr>(field: &str, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Schema(format!("bad {what} `{field}`")))
}

pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let fixed = ["objective", "optimizer", "seed", "iteration", "loss"];
    if header.len() < fixed.len() + 1 || header.iter().zip(fixed).any(|(a, b)| a != b) {
        return Err(Error::Schema("unexpected trajectory header".into()));
    }
    for (i, name) in header.iter().skip(fixed.len()).enumerate() {
        if name != format!("theta_{i}") {
            return Err(Error::Schema(format!("unexpected column `{name}`")));
        }
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(TrajectoryRow {
            objective: rec[0].to_string(),
            optimizer: rec[1].to_string(),
            seed: parse(&rec[2], "seed")?,
            iteration: parse(&rec[3], "iteration")?,
            loss: parse(&rec[4], "loss")?,
            theta: rec.iter().skip(fixed.len()).map(|v| parse(v, "coordinate")).collect::<Result<_>>()?,
        });
    }
    if rows.is_empty() {
        return Err(Error::NoData);
    }
    Ok(rows)
}

#[derive(Serialize)]
struct RunTiming<'a> {
    objective: &'a str,
    optimizer: &'a str,
    seed: u64,
    wall_time: f64,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    crate_version: &'static str,
    seeds: &'a [u64],
    config: &'a SuiteConfig,
    runs: Vec<RunTiming<'a>>,
    total_wall_time: f64,
}

/// Writes results, trajectories (one file per dimension when objectives
/// differ in dimension), run_meta.json and config.toml into `dir`.
/// Returns the paths written.
pub fn write_outputs(dir: &Path, suite: &SuiteConfig, cmp: &Comparison, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let results = match format {
        OutputFormat::Csv => {
            let p = dir.join("results.csv");
            write_results_csv(&cmp.table, &p)?;
            p
        }
        OutputFormat::Json => {
            let p = dir.join("results.json");
            write_results_json(&cmp.table, &p)?;
            p
        }
    };
    written.push(results);

    let mut dims: Vec<usize> = cmp.all_records().map(|r| r.final_theta().len()).collect();
    dims.sort_unstable();
    dims.dedup();
    for &d in &dims {
        let name = if dims.len() == 1 { "trajectories.csv".to_string() } else { format!("trajectories_d{d}.csv") };
        let p = dir.join(name);
        emit_trajectories(cmp.all_records().filter(|r| r.final_theta().len() == d), &p)?;
        written.push(p);
    }

    let runs: Vec<RunTiming> = cmp
        .all_records()
        .map(|r| RunTiming { objective: &r.objective, optimizer: &r.optimizer, seed: r.seed, wall_time: r.wall_time })
        .collect();
    let meta = RunMeta {
        crate_version: env!("CARGO_PKG_VERSION"),
        seeds: &suite.seeds,
        config: suite,
        total_wall_time: runs.iter().map(|r| r.wall_time).sum(),
        runs,
    };
    let p = dir.join("run_meta.json");
    let mut f = fs::File::create(&p)?;
    serde_json::to_writer_pretty(&mut f, &meta)?;
    f.write_all(b"\n")?;
    written.push(p);

    let p = dir.join("config.toml");
    fs::write(&p, suite.to_toml_string()?)?;
    written.push(p);
    Ok(written)
}
