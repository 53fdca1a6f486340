use crate::error::{Error, Result};

/// Diagonal jitter rungs tried, in order, before giving up on a factorization.
pub const JITTER_LADDER: [f64; 3] = [1e-10, 1e-8, 1e-6];

const SYMMETRY_TOL: f64 = 1e-12;

/// Dense symmetric matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SpdMatrix {
    /// Builds an `n × n` matrix from `f(i, j)` evaluated on the lower triangle
    /// and mirrored, so the result is exactly symmetric.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SpdMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds a matrix from rows, rejecting ragged or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (rows[i][j], rows[j][i]);
                let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
                if (a - b).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(SpdMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn add_diagonal(&mut self, value: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += value;
        }
    }
}

/// Lower Cholesky factor `L` with `L·Lᵀ = A + jitter·I`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    n: usize,
    data: Vec<f64>,
    jitter: f64,
}

impl LowerTriangular {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.data[i * self.n + j]
        }
    }

    /// Diagonal jitter that was actually added to obtain this factor.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.data[i * self.n + i])
    }
}

fn try_cholesky(a: &SpdMatrix, jitter: f64) -> Option<LowerTriangular> {
    let n = a.n;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.data[i * n + j];
            if i == j {
                sum += jitter;
            }
            let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            sum -= ri.iter().zip(rj).map(|(x, y)| x * y).sum::<f64>();
            if i == j {
                if !(sum > 0.0) || !sum.is_finite() {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(LowerTriangular { n, data: l, jitter })
}

/// Cholesky factorization with an escalating jitter ladder.
///
/// `jitter == 0` requests an exact factorization with no retries. A positive
/// jitter is tried first, then every rung of [`JITTER_LADDER`] above it.
pub fn cholesky_decompose(a: &SpdMatrix, jitter: f64) -> Result<LowerTriangular> {
    if let Some(l) = try_cholesky(a, jitter.max(0.0)) {
        return Ok(l);
    }
    let mut last = jitter;
    if jitter > 0.0 {
        for &rung in JITTER_LADDER.iter().filter(|&&r| r > jitter) {
            last = rung;
            if let Some(l) = try_cholesky(a, rung) {
                return Ok(l);
            }
        }
    }
    Err(Error::NotPositiveDefinite { jitter: last })
}

/// Forward substitution: solves `L·y = b`.
pub fn solve_lower(l: &LowerTriangular, b: &[f64]) -> Result<Vec<f64>> {
    let n = l.n;
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let row = &l.data[i * n..i * n + i];
        let s: f64 = row.iter().zip(&y).map(|(a, b)| a * b).sum();
        y[i] = (b[i] - s) / l.data[i * n + i];
    }
    Ok(y)
}

/// Solves `(L·Lᵀ)·x = b`.
pub fn cholesky_solve(l: &LowerTriangular, b: &[f64]) -> Result<Vec<f64>> {
    let n = l.n;
    let mut x = solve_lower(l, b)?;
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l.data[k * n + i] * x[k];
        }
        x[i] = s / l.data[i * n + i];
    }
    Ok(x)
}

/// `log det(L·Lᵀ) = 2·Σ log L_ii`.
pub fn log_det_from_cholesky(l: &LowerTriangular) -> f64 {
    2.0 * l.diagonal().map(f64::ln).sum::<f64>()
}
