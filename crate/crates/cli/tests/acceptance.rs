//! Acceptance suite. Runs every headline criterion at its stated tolerance
//! and prints one PASS/FAIL line each. Criteria listed as known gaps in the
//! README print FAIL without failing the process; any other failure does.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use particlegp_core::classic::{step, step_in_place};
use particlegp_core::gp::{fit, log_marginal_likelihood, posterior_at};
use particlegp_core::objectives::Surface;
use particlegp_core::swarm::swarm_step;
use particlegp_core::{
    make_benchmark, Benchmark, GpModel, GradientMode, Kernel, Objective, OptimizerState, ParticleGp,
    ParticleGpConfig, RadiusRule, RngStream, RuleKind, Swarm, SwarmParams, SwarmVariant, UpdateRule,
};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok: impl Into<String>) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail: ok.into() }
    } else {
        Outcome { pass: false, detail: failures.join("; ") }
    }
}

struct Report {
    unexpected: usize,
}

impl Report {
    fn record(&mut self, name: &str, limit: Duration, known_gap: bool, elapsed: Duration, out: Outcome) {
        let in_time = elapsed <= limit;
        let pass = out.pass && in_time;
        let status = match (pass, known_gap) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known gap, see README)",
            (false, false) => "FAIL",
        };
        if !pass && !known_gap {
            self.unexpected += 1;
        }
        let time = if in_time {
            format!("{:.1}s", elapsed.as_secs_f64())
        } else {
            format!("{:.1}s exceeds {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64())
        };
        println!("{status:<30} {name:<28} [{time}] {}", out.detail);
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

// ---------------------------------------------------------------- GP

fn se(l: f64, s: f64, a: f64, b: f64) -> f64 {
    s * (-(a - b) * (a - b) / (2.0 * l * l)).exp()
}

fn dense_lml(x: &[f64], y: &[f64], l: f64, s: f64, noise: f64) -> f64 {
    let n = x.len();
    let cov = DMatrix::from_fn(n, n, |i, j| se(l, s, x[i], x[j]) + if i == j { noise } else { 0.0 });
    let lu = cov.lu();
    let r = DVector::from_column_slice(y);
    let w = lu.solve(&r).expect("invertible covariance");
    -0.5 * lu.determinant().ln() - 0.5 * r.dot(&w) - 0.5 * n as f64 * LN_2PI
}

fn sorted_inputs(n: usize, gap: f64, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..n).map(|_| rng.uniform_range(-3.0, 3.0)).collect();
        x.sort_by(f64::total_cmp);
        if x.windows(2).all(|w| w[1] - w[0] >= gap) {
            return x;
        }
    }
}

fn model(x: &[f64], y: &[f64], l: f64, s: f64, noise: f64, jitter: f64) -> GpModel {
    fit(GpModel::new(x.to_vec(), y.to_vec(), Kernel::new(l, s)).unwrap().with_noise(noise).with_jitter(jitter)).unwrap()
}

fn gp_suite() -> Outcome {
    let mut rng = RngStream::new(1, 0);
    let mut failures = Vec::new();

    let mut worst_interp: f64 = 0.0;
    for _ in 0..20 {
        let x = sorted_inputs(8, 0.25, &mut rng);
        let y: Vec<f64> = x.iter().map(|v| (1.7 * v).cos() + 0.3 * v).collect();
        let m = model(&x, &y, 0.5, 1.0, 0.0, 1e-10);
        for (xi, yi) in x.iter().zip(&y) {
            worst_interp = worst_interp.max((posterior_at(&m, *xi).unwrap().mean - yi).abs());
        }
    }
    if worst_interp >= 1e-6 {
        failures.push(format!("interpolation error {worst_interp:e}"));
    }

    let mut variance_violations = 0;
    for _ in 0..1000 {
        let n = 1 + (rng.uniform() * 10.0) as usize;
        let x: Vec<f64> = (0..n).map(|_| rng.uniform_range(-3.0, 3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.uniform_range(-5.0, 5.0)).collect();
        let (l, s) = (rng.uniform_range(0.05, 5.0), rng.uniform_range(0.1, 10.0));
        let m = model(&x, &y, l, s, rng.uniform_range(1e-4, 1.0), 1e-10);
        let v = posterior_at(&m, rng.uniform_range(-5.0, 5.0)).unwrap().variance;
        if !(0.0..=s * (1.0 + 1e-12)).contains(&v) {
            variance_violations += 1;
        }
    }
    if variance_violations > 0 {
        failures.push(format!("{variance_violations} posterior variances above the prior"));
    }

    let mut worst_lml: f64 = 0.0;
    for case in 0..100 {
        let n = 1 + case % 5;
        let x = sorted_inputs(n, 0.05, &mut rng);
        let y: Vec<f64> = (0..n).map(|_| 2.0 * rng.standard_normal()).collect();
        let (l, s, noise) = (rng.uniform_range(0.2, 3.0), rng.uniform_range(0.1, 5.0), rng.uniform_range(1e-3, 0.5));
        let got = log_marginal_likelihood(&model(&x, &y, l, s, noise, 0.0)).unwrap();
        worst_lml = worst_lml.max((got - dense_lml(&x, &y, l, s, noise)).abs());
    }
    if worst_lml >= 1e-8 {
        failures.push(format!("LML off by {worst_lml:e}"));
    }
    outcome(failures, format!("interp {worst_interp:.1e}, LML {worst_lml:.1e}, 1000 variance draws ok"))
}

// ---------------------------------------------------------------- update rules

fn first(kind: RuleKind, alpha: f64, theta: &[f64], g: &[f64]) -> Vec<f64> {
    step(&UpdateRule::new(kind, alpha), &OptimizerState::new(theta.len()), theta, g).unwrap().0
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn optimizer_suite() -> Outcome {
    let mut failures = Vec::new();
    let (theta, g, a) = ([0.5, -1.0, 2.0], [0.3, -2.0, 4.0], 0.01);
    let k = a * (0.09 / 0.19 + 1.0);
    let r = a / 0.1;
    let expected = [
        (RuleKind::Gd, vec![0.497, -0.98, 1.96], 1e-15),
        (RuleKind::Momentum, vec![0.497, -0.98, 1.96], 1e-15),
        (RuleKind::Adagrad, vec![0.49, -0.99, 1.99], 1e-15),
        (RuleKind::Rmsprop, vec![0.5 - r, -1.0 + r, 2.0 - r], 1e-12),
        (RuleKind::Adam, vec![0.49, -0.99, 1.99], 1e-6),
        (RuleKind::Nadam, vec![0.5 - k, -1.0 + k, 2.0 - k], 1e-6),
    ];
    for (kind, want, tol) in expected {
        let got = first(kind, a, &theta, &g);
        if max_gap(&got, &want) > tol {
            failures.push(format!("{kind} first step {got:?}"));
        }
    }
    if first(RuleKind::Adagrad, 0.1, &[0.0], &[5.0]) != vec![-0.1] {
        failures.push("AdaGrad example".into());
    }
    for kind in RuleKind::ALL {
        let rule = UpdateRule::with_default_step(kind);
        let mut state = OptimizerState::new(2);
        let mut th = vec![0.7, -3.2];
        for _ in 0..10 {
            step_in_place(&rule, &mut state, &mut th, &[0.0, 0.0]).unwrap();
        }
        if th != vec![0.7, -3.2] {
            failures.push(format!("{kind} moved on a zero gradient"));
        }
    }
    let mut rng = RngStream::new(21, 0);
    let starts: Vec<Vec<f64>> = (0..5)
        .map(|_| {
            let dir: Vec<f64> = (0..3).map(|_| rng.standard_normal()).collect();
            let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            let radius = rng.uniform_range(0.5, 10.0);
            dir.iter().map(|x| radius * x / n).collect()
        })
        .collect();
    let mut slowest = 0;
    for kind in RuleKind::ALL {
        let rule = UpdateRule::with_default_step(kind);
        for s in &starts {
            let mut th = s.clone();
            let mut state = OptimizerState::new(3);
            let mut t = 0;
            while th.iter().map(|x| x * x).sum::<f64>().sqrt() >= 1e-3 && t < 100_000 {
                let grad = th.clone();
                step_in_place(&rule, &mut state, &mut th, &grad).unwrap();
                t += 1;
            }
            if t == 100_000 {
                failures.push(format!("{kind} did not reach 1e-3 from {s:?}"));
            }
            slowest = slowest.max(t);
        }
    }
    outcome(failures, format!("six first steps exact, all rules converge (slowest {slowest} steps)"))
}

// ---------------------------------------------------------------- gradients

fn gradient_suite() -> Outcome {
    let mut rng = RngStream::new(7, 0);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for b in Benchmark::ALL {
        let mut checked = 0;
        while checked < 20 {
            let p: Vec<f64> = b.bounds().iter().map(|&(lo, hi)| rng.uniform_range(lo, hi)).collect();
            let on_ridge = b == Benchmark::Bukin && ((p[1] - 0.01 * p[0] * p[0]).abs() < 0.05 || (p[0] + 10.0).abs() < 0.05);
            if on_ridge {
                continue;
            }
            let fd = particlegp_core::objectives::central_difference(|x| b.value(x), &p, 1e-5);
            let g = b.gradient(&p);
            let scale = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
            let err = g.iter().zip(&fd).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt() / scale;
            worst = worst.max(err);
            if err >= 1e-5 {
                failures.push(format!("{} at {p:?}: {err:e}", b.name()));
            }
            checked += 1;
        }
    }
    outcome(failures, format!("200 points, worst relative error {worst:.1e}"))
}

// ---------------------------------------------------------------- collapse

struct Sphere;

impl Surface for Sphere {
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&mut self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
}

fn sphere(d: usize) -> Objective {
    Objective::new("sphere", d, Box::new(Sphere), vec![vec![0.0; d]], vec![1.0; d])
}

fn collapse_gap(mut obj: Objective, theta0: &[f64], alpha: f64) -> f64 {
    let cfg = ParticleGpConfig {
        n_particles: 10,
        radius_rule: RadiusRule::Fixed(1e-8),
        base_rule: UpdateRule::new(RuleKind::Gd, alpha),
        gp_noise: 1e-10,
        gradient_mode: GradientMode::Mean,
        ..Default::default()
    };
    let rule = cfg.base_rule.clone();
    let mut agent = ParticleGp::new(&cfg, theta0.len(), RngStream::new(3, 0)).unwrap();
    let (mut pgp, mut gd) = (theta0.to_vec(), theta0.to_vec());
    let mut state = OptimizerState::new(theta0.len());
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        agent.step(&mut pgp, &mut obj, &rule).unwrap();
        let g = obj.grad(&gd);
        step_in_place(&rule, &mut state, &mut gd, &g).unwrap();
        worst = worst.max(max_gap(&pgp, &gd));
    }
    worst
}

fn collapse_suite() -> Outcome {
    let s = collapse_gap(sphere(2), &[1.5, -0.8], 0.1);
    let b = collapse_gap(make_benchmark("beale").unwrap(), &[1.0, 1.0], 0.01);
    let mut failures = Vec::new();
    if s >= 1e-4 {
        failures.push(format!("sphere gap {s:e}"));
    }
    if b >= 1e-4 {
        failures.push(format!("beale gap {b:e}"));
    }
    outcome(failures, format!("max per-step gap sphere {s:.1e}, beale {b:.1e}"))
}

// ---------------------------------------------------------------- swarms

fn swarm_suite() -> Outcome {
    let mut failures = Vec::new();
    let params = SwarmParams { momentum: 0.3, decay: 0.9, ..Default::default() };
    let mut worst: f64 = 0.0;
    for variant in [SwarmVariant::Pso, SwarmVariant::Mpso, SwarmVariant::Empso] {
        for seed in 0..5 {
            let mut obj = sphere(2);
            let mut rng = RngStream::new(seed, 0);
            let mut s = Swarm::init(&mut obj, &[3.0, -2.0], 5.0, params.n_particles, &mut rng);
            let mut last = s.gbest_value;
            for _ in 0..500 {
                swarm_step(variant, &mut s, &params, &mut obj, &mut rng);
                if s.gbest_value > last {
                    failures.push(format!("{variant} gbest rose"));
                }
                last = s.gbest_value;
            }
            // threshold is on ‖θ‖², the surface is half that
            let v = 2.0 * s.gbest_value;
            worst = worst.max(v);
            if v >= 1e-3 {
                failures.push(format!("{variant} seed {seed} gbest {v:e}"));
            }
        }
    }
    let pso = SwarmParams { inertia: 1.0, ..Default::default() };
    let mpso = SwarmParams { momentum: 0.0, ..Default::default() };
    let (mut oa, mut ob) = (sphere(3), sphere(3));
    let (mut ra, mut rb) = (RngStream::new(8, 0), RngStream::new(8, 0));
    let mut a = Swarm::init(&mut oa, &[1.0, 2.0, -1.0], 4.0, 12, &mut ra);
    let mut b = Swarm::init(&mut ob, &[1.0, 2.0, -1.0], 4.0, 12, &mut rb);
    for _ in 0..100 {
        swarm_step(SwarmVariant::Pso, &mut a, &pso, &mut oa, &mut ra);
        swarm_step(SwarmVariant::Mpso, &mut b, &mpso, &mut ob, &mut rb);
    }
    if a != b {
        failures.push("M-PSO with λ = 0 differs from PSO with w = 1".into());
    }
    outcome(failures, format!("monotone gbest, worst final gbest {worst:.1e}, λ = 0 reduction bit-exact"))
}

// ---------------------------------------------------------------- CLI runs

#[derive(Debug, Clone)]
struct Row {
    objective: String,
    optimizer: String,
    seed: u64,
    distance: Option<f64>,
    accuracy: Option<f64>,
    iterations: u64,
    gradient_evals: u64,
    diverged: bool,
}

fn bench(args: &[&str], out_dir: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("bench {} exited with {status}", args.join(" ")))
    }
}

fn read_rows(path: &Path) -> Vec<Row> {
    let mut r = csv::Reader::from_path(path).expect("results.csv");
    let header = r.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap_or_else(|| panic!("missing column {name}"));
    let (o, p, s, d, a, i, g, v) = (
        col("objective"),
        col("optimizer"),
        col("seed"),
        col("final_distance"),
        col("final_accuracy"),
        col("iterations"),
        col("gradient_evals"),
        col("diverged"),
    );
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            let opt = |k: usize| if rec[k].is_empty() { None } else { Some(rec[k].parse().unwrap()) };
            Row {
                objective: rec[o].to_string(),
                optimizer: rec[p].to_string(),
                seed: rec[s].parse().unwrap(),
                distance: opt(d),
                accuracy: opt(a),
                iterations: rec[i].parse().unwrap(),
                gradient_evals: rec[g].parse().unwrap(),
                diverged: &rec[v] == "true",
            }
        })
        .collect()
}

fn budget_parity(rows: &[Row]) -> Outcome {
    let mut failures = Vec::new();
    for r in rows {
        if r.gradient_evals != 20_000 {
            let why = if r.diverged { ", diverged" } else { "" };
            failures.push(format!("{}/{} seed {}: {} evals{why}", r.objective, r.optimizer, r.seed, r.gradient_evals));
        }
        if r.optimizer == "particlegp" && r.iterations != 200 {
            failures.push(format!("{}/particlegp seed {}: {} iterations", r.objective, r.seed, r.iterations));
        }
    }
    outcome(failures, format!("{} rows at 20000 evals, ParticleGP at 200 iterations", rows.len()))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `distances[optimizer][seed]` for one objective.
fn distances(rows: &[Row], objective: &str) -> BTreeMap<String, BTreeMap<u64, f64>> {
    let mut out: BTreeMap<String, BTreeMap<u64, f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.objective == objective) {
        out.entry(r.optimizer.clone()).or_default().insert(r.seed, r.distance.unwrap_or(f64::INFINITY));
    }
    out
}

/// One ordering: each `(optimizer, predicate)` must hold for the group
/// median and, jointly, on a majority of seeds.
fn ordering(rows: &[Row], objective: &str, conds: &[(&str, &dyn Fn(f64) -> bool)]) -> (bool, String) {
    let d = distances(rows, objective);
    let seeds: Vec<u64> = d["particlegp"].keys().copied().collect();
    let per_seed = seeds.iter().filter(|s| conds.iter().all(|(o, c)| c(d[*o][*s]))).count();
    let medians: Vec<(String, f64)> = conds.iter().map(|(o, _)| (o.to_string(), median(d[*o].values().copied().collect()))).collect();
    let median_ok = conds.iter().zip(&medians).all(|((_, c), (_, m))| c(*m));
    let pass = median_ok && 2 * per_seed > seeds.len();
    let shown: Vec<String> = medians.iter().map(|(o, m)| format!("{o} {m:.3}")).collect();
    (pass, format!("{objective}: {per_seed}/{} seeds, medians {}", seeds.len(), shown.join(", ")))
}

fn qualitative(rows: &[Row]) -> Outcome {
    let below = |t: f64| move |x: f64| x < t;
    let above = |t: f64| move |x: f64| x > t;
    let (b15, a20, b25, a15, b005) = (below(1.5), above(2.0), below(2.5), above(15.0), below(0.05));
    let parts = [
        ordering(
            rows,
            "bukin",
            &[("particlegp", &b15), ("adam", &a20), ("rmsprop", &a20), ("adagrad", &a20), ("nadam", &a20)],
        ),
        ordering(rows, "ackley", &[("particlegp", &b25), ("adam", &a15), ("adagrad", &a15)]),
        ordering(rows, "matyas", &[("particlegp", &b005), ("adam", &b005), ("rmsprop", &b005), ("nadam", &b005)]),
    ];
    for (pass, text) in &parts {
        println!("    {} {text}", if *pass { "ok  " } else { "miss" });
    }
    let failed: Vec<String> = parts.iter().filter(|p| !p.0).map(|p| p.1.split(':').next().unwrap().to_string()).collect();
    if failed.is_empty() {
        Outcome { pass: true, detail: "Bukin, Ackley and Matyas orderings hold".into() }
    } else {
        Outcome { pass: false, detail: format!("orderings not met: {}", failed.join(", ")) }
    }
}

fn logistic(dir: &Path) -> Outcome {
    if let Err(e) = bench(&["logistic", "--seeds", "3", "--budget", "200000"], dir) {
        return Outcome { pass: false, detail: e };
    }
    let rows = read_rows(&dir.join("results.csv"));
    let mut failures = Vec::new();
    let mut shown = Vec::new();
    for seed in 0..3 {
        let acc = |label: &str| {
            rows.iter().find(|r| r.optimizer == label && r.seed == seed).and_then(|r| r.accuracy).unwrap_or(f64::NAN)
        };
        let (p, a) = (acc("particlegp"), acc("adam"));
        let evals: Vec<u64> = rows.iter().filter(|r| r.seed == seed).map(|r| r.gradient_evals).collect();
        if evals.iter().any(|&e| e != 200_000) {
            failures.push(format!("seed {seed}: unequal budgets {evals:?}"));
        }
        if !((p - a).abs() <= 0.02) {
            failures.push(format!("seed {seed}: ParticleGP {p:.4} vs Adam {a:.4}"));
        }
        shown.push(format!("{p:.3}/{a:.3}"));
    }
    outcome(failures, format!("accuracy ParticleGP/Adam per seed {}", shown.join(", ")))
}

const DETERMINISM_CONFIG: &str = r#"
budget = 2000
seeds = [0, 1]
objectives = ["beale", "levy"]

[schedule]
trigger_loss = 1.0
gamma = 0.1
objectives = ["levy"]

[[optimizer]]
label = "particlegp"
kind = "particlegp"
lr = 0.01
n_particles = 20

[[optimizer]]
label = "nadam"
kind = "nadam"
lr = 0.01

[[optimizer]]
label = "m-pso"
kind = "m-pso"
n_particles = 20
"#;

fn determinism(dir: &Path) -> Outcome {
    let cfg = dir.join("compare.toml");
    fs::write(&cfg, DETERMINISM_CONFIG).unwrap();
    let cfg = cfg.to_string_lossy().into_owned();
    let (a, b) = (dir.join("a"), dir.join("b"));
    for out in [&a, &b] {
        if let Err(e) = bench(&["compare", &cfg], out) {
            return Outcome { pass: false, detail: e };
        }
    }
    let (x, y) = (fs::read(a.join("results.csv")).unwrap(), fs::read(b.join("results.csv")).unwrap());
    if x == y {
        Outcome { pass: true, detail: format!("results.csv identical ({} bytes)", x.len()) }
    } else {
        Outcome { pass: false, detail: "results.csv differs between runs".into() }
    }
}

fn main() {
    // cargo passes harness flags such as --nocapture or a filter; none apply
    let mut report = Report { unexpected: 0 };
    let secs = Duration::from_secs;
    let tmp = tempfile::tempdir().expect("temp dir");

    let (out, t) = timed(gp_suite);
    report.record("GP correctness", secs(10), false, t, out);
    let (out, t) = timed(optimizer_suite);
    report.record("update rules", secs(30), false, t, out);
    let (out, t) = timed(gradient_suite);
    report.record("benchmark gradients", secs(5), false, t, out);
    let (out, t) = timed(collapse_suite);
    report.record("collapse to GD", secs(30), false, t, out);

    let table_dir = tmp.path().join("table3");
    let (run, table_time) = timed(|| bench(&["table3", "--seeds", "5"], &table_dir));
    match run {
        Ok(()) => {
            let rows = read_rows(&table_dir.join("results.csv"));
            let (out, t) = timed(|| budget_parity(&rows));
            report.record("budget parity", secs(1), true, t, out);
            let (out, t) = timed(|| qualitative(&rows));
            report.record("benchmark orderings", secs(15 * 60), true, table_time + t, out);
        }
        Err(e) => {
            report.record("budget parity", secs(1), true, Duration::ZERO, Outcome { pass: false, detail: e.clone() });
            report.record("benchmark orderings", secs(15 * 60), true, table_time, Outcome { pass: false, detail: e });
        }
    }

    let (out, t) = timed(|| logistic(&tmp.path().join("logistic")));
    report.record("logistic accuracy", secs(5 * 60), false, t, out);
    let (out, t) = timed(swarm_suite);
    report.record("swarm suite", secs(20), false, t, out);
    let (out, t) = timed(|| determinism(tmp.path()));
    report.record("CLI determinism", secs(60), false, t, out);

    if report.unexpected > 0 {
        eprintln!("{} criteria failed", report.unexpected);
        std::process::exit(1);
    }
}
