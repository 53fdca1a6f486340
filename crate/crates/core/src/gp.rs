//! Scalar-input Gaussian-process regression with a squared-exponential
//! kernel, exact Cholesky inference and grid-searched hyperparameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    cholesky_decompose, cholesky_solve, log_det_from_cholesky, sample_normal, solve_lower,
    LowerTriangular, RngStream, SpdMatrix,
};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Squared-exponential kernel `σ²·exp(−(x − x')² / (2l²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub length_scale: f64,
    pub signal_variance: f64,
}

impl Kernel {
    pub fn new(length_scale: f64, signal_variance: f64) -> Self {
        Kernel { length_scale, signal_variance }
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::new(1.0, 1.0)
    }
}

pub fn kernel_eval(k: &Kernel, x: f64, x_prime: f64) -> f64 {
    let r = x - x_prime;
    k.signal_variance * (-r * r / (2.0 * k.length_scale * k.length_scale)).exp()
}

/// Constant prior mean of the regressed function.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorMean {
    #[default]
    Zero,
    MeanOfY,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone)]
struct Factor {
    chol: LowerTriangular,
    alpha: Vec<f64>,
    mean: f64,
}

/// One GP over `(x_train, y_train)`. The factor of `K + η²I` is cached by
/// [`GpModel::fit`] and dropped whenever the hyperparameters change.
#[derive(Debug, Clone)]
pub struct GpModel {
    x: Vec<f64>,
    y: Vec<f64>,
    kernel: Kernel,
    noise: f64,
    prior_mean: PriorMean,
    jitter: f64,
    factor: Option<Factor>,
}

pub const DEFAULT_NOISE: f64 = 1e-6;
pub const DEFAULT_JITTER: f64 = 1e-10;

impl GpModel {
    pub fn new(x: Vec<f64>, y: Vec<f64>, kernel: Kernel) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        Ok(GpModel {
            x,
            y,
            kernel,
            noise: DEFAULT_NOISE,
            prior_mean: PriorMean::Zero,
            jitter: DEFAULT_JITTER,
            factor: None,
        })
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self.factor = None;
        self
    }

    pub fn with_prior_mean(mut self, prior_mean: PriorMean) -> Self {
        self.prior_mean = prior_mean;
        self.factor = None;
        self
    }

    /// `0` disables the jitter ladder entirely.
    pub fn with_jitter(mut self, jitter: f64) -> Self {
        self.jitter = jitter;
        self.factor = None;
        self
    }

    pub fn set_kernel(&mut self, kernel: Kernel) {
        self.kernel = kernel;
        self.factor = None;
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn x_train(&self) -> &[f64] {
        &self.x
    }

    pub fn y_train(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_fitted(&self) -> bool {
        self.factor.is_some()
    }

    pub fn cholesky(&self) -> Option<&LowerTriangular> {
        self.factor.as_ref().map(|f| &f.chol)
    }

    /// The constant `m` subtracted from the targets.
    pub fn prior_mean_value(&self) -> f64 {
        match self.prior_mean {
            PriorMean::Zero => 0.0,
            PriorMean::MeanOfY if self.y.is_empty() => 0.0,
            PriorMean::MeanOfY => self.y.iter().sum::<f64>() / self.y.len() as f64,
        }
    }

    /// `K_XX + η²I`.
    pub fn gram(&self) -> SpdMatrix {
        let mut k = SpdMatrix::from_fn(self.x.len(), |i, j| kernel_eval(&self.kernel, self.x[i], self.x[j]));
        k.add_diagonal(self.noise);
        k
    }

    pub fn fit(&mut self) -> Result<()> {
        if self.x.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if !(self.noise >= 0.0) {
            return Err(Error::NegativeVariance(self.noise));
        }
        let factor = self.factorize(&self.gram())?;
        self.factor = Some(factor);
        Ok(())
    }

    fn factorize(&self, gram: &SpdMatrix) -> Result<Factor> {
        let chol = cholesky_decompose(gram, self.jitter)?;
        let mean = self.prior_mean_value();
        let r: Vec<f64> = self.y.iter().map(|y| y - mean).collect();
        let alpha = cholesky_solve(&chol, &r)?;
        Ok(Factor { chol, alpha, mean })
    }

    fn factor(&self) -> Result<&Factor> {
        self.factor.as_ref().ok_or(Error::NotFitted)
    }
}

/// Consuming form of [`GpModel::fit`].
pub fn fit(mut model: GpModel) -> Result<GpModel> {
    model.fit()?;
    Ok(model)
}

pub fn posterior_at(model: &GpModel, x_star: f64) -> Result<Posterior> {
    let f = model.factor()?;
    let kx: Vec<f64> = model.x.iter().map(|&xi| kernel_eval(&model.kernel, x_star, xi)).collect();
    let mean = f.mean + kx.iter().zip(&f.alpha).map(|(a, b)| a * b).sum::<f64>();
    let v = solve_lower(&f.chol, &kx)?;
    let explained: f64 = v.iter().map(|a| a * a).sum();
    let variance = (model.kernel.signal_variance - explained).max(0.0);
    Ok(Posterior { mean, variance })
}

/// `−½ log det(K + η²I) − ½ rᵀ(K + η²I)⁻¹r − (N/2) log 2π` with `r = y − m`.
pub fn log_marginal_likelihood(model: &GpModel) -> Result<f64> {
    let f = model.factor()?;
    Ok(lml_from(f, &model.y))
}

fn lml_from(f: &Factor, y: &[f64]) -> f64 {
    let fit: f64 = y.iter().zip(&f.alpha).map(|(yi, a)| (yi - f.mean) * a).sum();
    -0.5 * log_det_from_cholesky(&f.chol) - 0.5 * fit - 0.5 * y.len() as f64 * LN_2PI
}

pub fn sample_posterior(model: &GpModel, x_star: f64, rng: &mut RngStream) -> Result<f64> {
    let p = posterior_at(model, x_star)?;
    sample_normal(rng, p.mean, p.variance)
}

/// Candidate hyperparameters searched by [`optimize_hyperparams`].
#[derive(Debug, Clone, PartialEq)]
pub struct HyperGrid {
    pub length_scales: Vec<f64>,
    pub signal_variances: Vec<f64>,
    /// Refine the best grid point by coordinate search in log space.
    pub polish: bool,
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![(lo * hi).sqrt()];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

impl HyperGrid {
    pub fn log_spaced(length: (f64, f64), n_length: usize, variance: (f64, f64), n_variance: usize) -> Self {
        HyperGrid {
            length_scales: log_spaced(length.0, length.1, n_length),
            signal_variances: log_spaced(variance.0, variance.1, n_variance),
            polish: false,
        }
    }

    pub fn single(kernel: Kernel) -> Self {
        HyperGrid {
            length_scales: vec![kernel.length_scale],
            signal_variances: vec![kernel.signal_variance],
            polish: false,
        }
    }

    pub fn with_polish(mut self, polish: bool) -> Self {
        self.polish = polish;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.length_scales.is_empty() || self.signal_variances.is_empty()
    }
}

/// Grid shape relative to the data: length-scales scale with the particle
/// cloud radius, signal variances with the mean squared target about the
/// prior mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HyperGridSpec {
    pub n_length: usize,
    pub n_variance: usize,
    pub length_range: (f64, f64),
    pub variance_range: (f64, f64),
    pub polish: bool,
}

impl Default for HyperGridSpec {
    fn default() -> Self {
        HyperGridSpec {
            n_length: 7,
            n_variance: 7,
            length_range: (1e-3, 1e3),
            variance_range: (1e-4, 1e4),
            polish: false,
        }
    }
}

impl HyperGridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_length == 0 || self.n_variance == 0 {
            return Err(Error::config("hyper_grid", "grid sizes must be at least 1"));
        }
        let (l0, l1) = self.length_range;
        let (s0, s1) = self.variance_range;
        if !(l0 > 0.0 && l1 >= l0 && s0 > 0.0 && s1 >= s0) {
            return Err(Error::config("hyper_grid", "ranges must be positive and ordered"));
        }
        Ok(())
    }

    pub fn resolve(&self, radius: f64, y: &[f64], prior_mean: f64) -> HyperGrid {
        let spread = if y.is_empty() {
            0.0
        } else {
            y.iter().map(|v| (v - prior_mean) * (v - prior_mean)).sum::<f64>() / y.len() as f64
        };
        let scale = if spread > 0.0 && spread.is_finite() { spread } else { 1.0 };
        let radius = if radius > 0.0 { radius } else { 1.0 };
        HyperGrid::log_spaced(
            (self.length_range.0 * radius, self.length_range.1 * radius),
            self.n_length,
            (self.variance_range.0 * scale, self.variance_range.1 * scale),
            self.n_variance,
        )
        .with_polish(self.polish)
    }
}

struct Search<'a> {
    model: &'a GpModel,
    sq_dist: Vec<f64>,
}

impl Search<'_> {
    fn unit_gram(&self, l: f64) -> Vec<f64> {
        let scale = -0.5 / (l * l);
        self.sq_dist.iter().map(|d| (d * scale).exp()).collect()
    }

    fn score(&self, unit: &[f64], signal_variance: f64) -> Option<(f64, Factor)> {
        let n = self.model.len();
        let mut k = SpdMatrix::from_fn(n, |i, j| signal_variance * unit[i * n + j]);
        k.add_diagonal(self.model.noise);
        let factor = self.model.factorize(&k).ok()?;
        let lml = lml_from(&factor, &self.model.y);
        lml.is_finite().then_some((lml, factor))
    }

    fn score_at(&self, kernel: Kernel) -> Option<(f64, Factor)> {
        self.score(&self.unit_gram(kernel.length_scale), kernel.signal_variance)
    }
}

fn better(lml: f64, l: f64, best: &Option<(f64, Kernel, Factor)>) -> bool {
    match best {
        None => true,
        Some((b, k, _)) => lml > *b || (lml == *b && l > k.length_scale),
    }
}

/// Maximizes the log marginal likelihood over `grid` and returns the model
/// refitted there. Grid points whose Gram matrix cannot be factorized are
/// skipped; ties go to the larger length-scale.
pub fn optimize_hyperparams(model: &GpModel, grid: &HyperGrid) -> Result<GpModel> {
    if model.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if grid.is_empty() {
        return Err(Error::config("hyper_grid", "grid is empty"));
    }
    let n = model.len();
    let mut sq_dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let r = model.x[i] - model.x[j];
            sq_dist[i * n + j] = r * r;
        }
    }
    let search = Search { model, sq_dist };

    let mut best: Option<(f64, Kernel, Factor)> = None;
    for &l in &grid.length_scales {
        let unit = search.unit_gram(l);
        for &s in &grid.signal_variances {
            if let Some((lml, factor)) = search.score(&unit, s) {
                if better(lml, l, &best) {
                    best = Some((lml, Kernel::new(l, s), factor));
                }
            }
        }
    }
    let Some(mut best) = best else {
        return Err(Error::NotPositiveDefinite { jitter: crate::numerics::JITTER_LADDER[2] });
    };

    if grid.polish {
        let spacing = |v: &[f64]| {
            if v.len() > 1 {
                (v[v.len() - 1] / v[0]).ln() / (v.len() - 1) as f64
            } else {
                1.0
            }
        };
        let mut steps = [spacing(&grid.length_scales) / 2.0, spacing(&grid.signal_variances) / 2.0];
        for _ in 0..12 {
            for (axis, step) in steps.iter_mut().enumerate() {
                let mut moved = false;
                for dir in [1.0, -1.0] {
                    let factor = (dir * *step).exp();
                    let mut k = best.1;
                    if axis == 0 {
                        k.length_scale *= factor;
                    } else {
                        k.signal_variance *= factor;
                    }
                    if let Some((lml, f)) = search.score_at(k) {
                        if lml > best.0 {
                            best = (lml, k, f);
                            moved = true;
                            break;
                        }
                    }
                }
                if !moved {
                    *step /= 2.0;
                }
            }
        }
    }

    let mut out = model.clone();
    out.kernel = best.1;
    out.factor = Some(best.2);
    Ok(out)
}
