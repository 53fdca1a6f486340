//! Synthetic binary logistic regression with mini-batch gradients.

use std::sync::Arc;

use super::{Objective, Surface};
use crate::numerics::RngStream;

/// Size and noise of a generated logistic task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticSpec {
    pub dim: usize,
    pub n_samples: usize,
    /// Standard deviation of label noise added to the true margin.
    pub noise: f64,
    pub batch_size: usize,
}

/// Features (row-major `n × d`) and 0/1 labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<f64>,
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    fn logit(&self, theta: &[f64], i: usize) -> f64 {
        self.row(i).iter().zip(theta).map(|(a, b)| a * b).sum()
    }

    /// Mean cross-entropy over the whole set.
    pub fn loss(&self, theta: &[f64]) -> f64 {
        // running mean, exact when every row contributes the same value
        (0..self.len()).fold(0.0, |mean, i| {
            let z = self.logit(theta, i);
            let term = softplus(z) - self.labels[i] * z;
            mean + (term - mean) / (i + 1) as f64
        })
    }

    /// Mean cross-entropy gradient over the given rows.
    pub fn gradient_on(&self, theta: &[f64], rows: &[usize]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for &i in rows {
            let r = sigmoid(self.logit(theta, i)) - self.labels[i];
            g.iter_mut().zip(self.row(i)).for_each(|(gk, xk)| *gk += r * xk);
        }
        let scale = 1.0 / rows.len() as f64;
        g.iter_mut().for_each(|v| *v *= scale);
        g
    }

    pub fn full_gradient(&self, theta: &[f64]) -> Vec<f64> {
        let rows: Vec<usize> = (0..self.len()).collect();
        self.gradient_on(theta, &rows)
    }

    /// Fraction of rows whose predicted class matches the label.
    pub fn accuracy(&self, theta: &[f64]) -> f64 {
        let hits = (0..self.len())
            .filter(|&i| (self.logit(theta, i) > 0.0) == (self.labels[i] > 0.5))
            .count();
        hits as f64 / self.len() as f64
    }
}

/// Mini-batch sampler over a shared dataset.
///
/// Batches are consecutive chunks of a per-epoch permutation, so rows are
/// drawn without replacement within an epoch.
#[derive(Debug, Clone)]
pub struct LogisticTask {
    data: Arc<Dataset>,
    batch_size: usize,
    rng: RngStream,
    order: Vec<usize>,
    cursor: usize,
}

impl LogisticTask {
    pub fn new(data: Arc<Dataset>, batch_size: usize, rng: RngStream) -> Self {
        let order = (0..data.len()).collect();
        let mut task = LogisticTask { data, batch_size: batch_size.max(1), rng, order, cursor: 0 };
        task.reshuffle();
        task
    }

    fn reshuffle(&mut self) {
        self.rng.shuffle(&mut self.order);
        self.cursor = 0;
    }

    /// Row indices of the next mini-batch.
    pub fn next_batch(&mut self) -> Vec<usize> {
        if self.cursor >= self.order.len() {
            self.reshuffle();
        }
        let end = (self.cursor + self.batch_size).min(self.order.len());
        let batch = self.order[self.cursor..end].to_vec();
        self.cursor = end;
        batch
    }

    pub fn data(&self) -> &Arc<Dataset> {
        &self.data
    }
}

impl Surface for LogisticTask {
    fn value(&self, x: &[f64]) -> f64 {
        self.data.loss(x)
    }

    fn gradient(&mut self, x: &[f64]) -> Vec<f64> {
        let batch = self.next_batch();
        self.data.gradient_on(x, &batch)
    }
}

/// Gap added on each side of the true hyperplane, along its normal.
pub const MARGIN: f64 = 0.5;

/// Generates a separable-up-to-noise task and wraps it as an objective whose
/// gradient draws a fresh mini-batch on every call.
pub fn make_logistic(spec: LogisticSpec, rng: &mut RngStream) -> (Objective, Arc<Dataset>) {
    let d = spec.dim;
    let mut truth: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
    let norm = truth.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    truth.iter_mut().for_each(|v| *v /= norm);

    let mut features = Vec::with_capacity(spec.n_samples * d);
    let mut labels = Vec::with_capacity(spec.n_samples);
    for _ in 0..spec.n_samples {
        let mut row: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
        let margin: f64 = row.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>()
            + spec.noise * rng.standard_normal();
        let side = if margin > 0.0 { 1.0 } else { -1.0 };
        row.iter_mut().zip(&truth).for_each(|(x, w)| *x += side * MARGIN * w);
        labels.push(if margin > 0.0 { 1.0 } else { 0.0 });
        features.extend(row);
    }
    let data = Arc::new(Dataset { dim: d, features, labels });
    let task = LogisticTask::new(Arc::clone(&data), spec.batch_size, rng.fork(0x6c6f_6769));
    let obj = Objective::new("logistic", d, Box::new(task), Vec::new(), vec![0.0; d]);
    (obj, data)
}
