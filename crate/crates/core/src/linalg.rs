//! Small dense linear-algebra helpers shared by the samplers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol * (1.0 + m[(i, j)].abs())))
}

/// Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(m: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if !is_symmetric(m, 1e-10) {
        return Err(Error::Parameter("covariance is not symmetric".into()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter("covariance has non-finite entries".into()));
    }
    Cholesky::new(m.clone()).ok_or_else(|| Error::Parameter("covariance is not positive definite".into()))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn standard_normal_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

/// `μ + L z` with `z` standard normal.
pub fn sample_mvn<R: Rng + ?Sized>(rng: &mut R, mean: &DVector<f64>, chol_l: &DMatrix<f64>) -> DVector<f64> {
    mean + chol_l * standard_normal_vector(rng, mean.len())
}

/// Multivariate normal log density from a precomputed factorization.
pub struct GaussianDensity {
    mean: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    log_norm: f64,
}

impl GaussianDensity {
    pub fn new(mean: DVector<f64>, cov: &DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != mean.len() {
            return Err(Error::Dimension("mean and covariance disagree".into()));
        }
        let chol = cholesky(cov)?;
        let d = mean.len() as f64;
        let log_det: f64 = chol.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
        let log_norm = -0.5 * (d * (2.0 * std::f64::consts::PI).ln() + log_det);
        Ok(Self { mean, chol, log_norm })
    }

    pub fn ln_pdf(&self, x: &[f64]) -> f64 {
        let diff = DVector::from_column_slice(x) - &self.mean;
        let z = self.chol.l().solve_lower_triangular(&diff).expect("non-singular factor");
        self.log_norm - 0.5 * z.norm_squared()
    }
}
