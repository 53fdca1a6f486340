//! Seeded randomness and the small dense linear algebra the GP needs.

mod linalg;
mod rng;

pub use linalg::{
    cholesky_decompose, cholesky_solve, log_det_from_cholesky, solve_lower, LowerTriangular,
    SpdMatrix, JITTER_LADDER,
};
pub use rng::{sample_mvn_isotropic, sample_normal, RngStream};
