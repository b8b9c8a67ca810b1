use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::cholesky;

/// Beta hyperparameters for the noise probabilities, one pair per order.
#[derive(Debug, Clone, PartialEq)]
pub enum NoisePrior {
    Symmetric { a: Vec<f64>, b: Vec<f64> },
    Asymmetric { a0: Vec<f64>, b0: Vec<f64>, a1: Vec<f64>, b1: Vec<f64> },
}

impl NoisePrior {
    pub fn is_symmetric(&self) -> bool {
        matches!(self, NoisePrior::Symmetric { .. })
    }

    pub fn n_orders(&self) -> usize {
        match self {
            NoisePrior::Symmetric { a, .. } => a.len(),
            NoisePrior::Asymmetric { a0, .. } => a0.len(),
        }
    }

    /// `(a, b)` for the absent→present probability of order `k`.
    pub fn beta0(&self, k: usize) -> (f64, f64) {
        match self {
            NoisePrior::Symmetric { a, b } => (a[k - 2], b[k - 2]),
            NoisePrior::Asymmetric { a0, b0, .. } => (a0[k - 2], b0[k - 2]),
        }
    }

    /// `(a, b)` for the present→absent probability of order `k`.
    pub fn beta1(&self, k: usize) -> (f64, f64) {
        match self {
            NoisePrior::Symmetric { a, b } => (a[k - 2], b[k - 2]),
            NoisePrior::Asymmetric { a1, b1, .. } => (a1[k - 2], b1[k - 2]),
        }
    }

    fn vectors(&self) -> Vec<&Vec<f64>> {
        match self {
            NoisePrior::Symmetric { a, b } => vec![a, b],
            NoisePrior::Asymmetric { a0, b0, a1, b1 } => vec![a0, b0, a1, b1],
        }
    }
}

/// Hyperparameters: `μ ~ N(m_μ, Σ_μ)`, `Σ ~ IW(Φ, ν)`, `r_k ~ Exp(λ_k)` and
/// Beta priors on the noise.
#[derive(Debug, Clone, PartialEq)]
pub struct Priors {
    pub mu_mean: DVector<f64>,
    pub mu_cov: DMatrix<f64>,
    pub sigma_scale: DMatrix<f64>,
    pub sigma_dof: f64,
    pub radius_rates: Vec<f64>,
    pub noise: NoisePrior,
}

impl Priors {
    /// Checks shapes against latent dimension `d` and maximum order `max_order`.
    pub fn validate(&self, d: usize, max_order: usize) -> Result<()> {
        if self.mu_mean.len() != d {
            return Err(Error::Dimension(format!("prior mean has length {}, expected {d}", self.mu_mean.len())));
        }
        if self.mu_cov.nrows() != d || self.sigma_scale.nrows() != d {
            return Err(Error::Dimension(format!("prior matrices must be {d}x{d}")));
        }
        cholesky(&self.mu_cov)?;
        cholesky(&self.sigma_scale)?;
        if !(self.sigma_dof > d as f64 - 1.0) {
            return Err(Error::Parameter(format!("degrees of freedom {} must exceed {}", self.sigma_dof, d - 1)));
        }
        let n = max_order - 1;
        if self.radius_rates.len() != n || self.noise.n_orders() != n {
            return Err(Error::Dimension(format!("priors must cover {n} orders")));
        }
        let positive = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x > 0.0);
        if !positive(&self.radius_rates) {
            return Err(Error::Parameter("radius rates must be positive".into()));
        }
        for v in self.noise.vectors() {
            if v.len() != n {
                return Err(Error::Dimension(format!("noise prior must cover {n} orders")));
            }
            if !positive(v) {
                return Err(Error::Parameter("Beta parameters must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mu_mean.len()
    }

    pub fn max_order(&self) -> usize {
        self.radius_rates.len() + 1
    }

    /// `Σ_k ln p(r_k | λ_k)`; `−∞` off the support.
    pub fn radius_log_prior(&self, radii: &[f64]) -> f64 {
        if radii.iter().any(|&r| r < 0.0) {
            return f64::NEG_INFINITY;
        }
        radii
            .iter()
            .zip(&self.radius_rates)
            .map(|(r, l)| l.ln() - l * r)
            .sum()
    }
}
