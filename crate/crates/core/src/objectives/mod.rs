//! Loss surfaces with analytic gradients and evaluation accounting.

mod benchmarks;
mod logistic;

pub use benchmarks::Benchmark;
pub use logistic::{make_logistic, Dataset, LogisticSpec, LogisticTask};

use crate::error::Result;

/// Anything that can be evaluated and differentiated.
///
/// `gradient` takes `&mut self` because stochastic objectives advance a
/// mini-batch cursor on every call.
pub trait Surface: Send {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&mut self, x: &[f64]) -> Vec<f64>;
}

impl Surface for Benchmark {
    fn value(&self, x: &[f64]) -> f64 {
        Benchmark::value(*self, x)
    }

    fn gradient(&mut self, x: &[f64]) -> Vec<f64> {
        Benchmark::gradient(*self, x)
    }
}

/// Number of gradient and function evaluations charged so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounter {
    pub gradient_evals: u64,
    pub function_evals: u64,
}

/// A named objective: surface, known minima, start point and counter.
pub struct Objective {
    name: String,
    dim: usize,
    surface: Box<dyn Surface>,
    global_minima: Vec<Vec<f64>>,
    default_init: Vec<f64>,
    bounds: Option<Vec<(f64, f64)>>,
    counter: EvalCounter,
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("counter", &self.counter)
            .finish_non_exhaustive()
    }
}

impl Objective {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        surface: Box<dyn Surface>,
        global_minima: Vec<Vec<f64>>,
        default_init: Vec<f64>,
    ) -> Self {
        Objective {
            name: name.into(),
            dim,
            surface,
            global_minima,
            default_init,
            bounds: None,
            counter: EvalCounter::default(),
        }
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn global_minima(&self) -> &[Vec<f64>] {
        &self.global_minima
    }

    pub fn default_init(&self) -> &[f64] {
        &self.default_init
    }

    pub fn bounds(&self) -> Option<&[(f64, f64)]> {
        self.bounds.as_deref()
    }

    pub fn counter(&self) -> EvalCounter {
        self.counter
    }

    /// Loss at `x`; charged as one function evaluation.
    pub fn eval(&mut self, x: &[f64]) -> f64 {
        self.counter.function_evals += 1;
        self.surface.value(x)
    }

    /// Gradient at `x`; charged as one gradient evaluation.
    pub fn grad(&mut self, x: &[f64]) -> Vec<f64> {
        self.counter.gradient_evals += 1;
        self.surface.gradient(x)
    }

    /// Loss at `x` without touching the counter. Used by oracles and reports.
    pub fn peek_value(&self, x: &[f64]) -> f64 {
        self.surface.value(x)
    }
}

/// Looks up one of the ten benchmark surfaces by name.
pub fn make_benchmark(name: &str) -> Result<Objective> {
    let b: Benchmark = name.parse()?;
    Ok(Objective::new(b.name(), 2, Box::new(b), b.global_minima(), b.default_init().to_vec())
        .with_bounds(b.bounds().to_vec()))
}

/// Central differences of `f` at `x` with step `h`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Finite-difference gradient of an objective; does not charge evaluations.
pub fn finite_diff_grad(obj: &Objective, x: &[f64], h: f64) -> Vec<f64> {
    central_difference(|p| obj.peek_value(p), x, h)
}
