use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Beta, ChiSquared, Distribution, StandardNormal};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::genmodel::NoiseParams;
use crate::geometry::LatentConfiguration;
use crate::hypercore::DiscrepancyCounts;
use crate::linalg::{cholesky, sample_mvn, symmetrize};

use super::priors::Priors;

fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(symmetrize(&cholesky(m).map_err(|_| Error::Numeric("matrix is not positive definite".into()))?.inverse()))
}

/// Draws `μ | U, Σ` from its Gaussian full conditional.
pub fn gibbs_mu<R: Rng + ?Sized>(u: &LatentConfiguration, sigma: &DMatrix<f64>, priors: &Priors, rng: &mut R) -> Result<DVector<f64>> {
    let d = priors.dim();
    if u.dim() != d || sigma.nrows() != d {
        return Err(Error::Dimension("latent and prior dimensions differ".into()));
    }
    let n = u.n_nodes() as f64;
    let sigma_inv = inverse(sigma)?;
    let prior_prec = inverse(&priors.mu_cov)?;
    let prec = &sigma_inv * n + &prior_prec;
    let cov = inverse(&prec)?;
    let sum = u.rows().fold(DVector::zeros(d), |acc, r| acc + DVector::from_column_slice(r));
    let mean = &cov * (&sigma_inv * sum + &prior_prec * &priors.mu_mean);
    let l = cholesky(&cov).map_err(|e| Error::Numeric(e.to_string()))?.l();
    Ok(sample_mvn(rng, &mean, &l))
}

/// Draws `W ~ Wishart(scale, dof)` by the Bartlett decomposition.
pub fn sample_wishart<R: Rng + ?Sized>(scale: &DMatrix<f64>, dof: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    let d = scale.nrows();
    if !(dof > d as f64 - 1.0) {
        return Err(Error::Parameter(format!("Wishart degrees of freedom {dof} too small for dimension {d}")));
    }
    let l = cholesky(scale).map_err(|e| Error::Numeric(e.to_string()))?.l();
    let mut a = DMatrix::zeros(d, d);
    for i in 0..d {
        let chi = ChiSquared::new(dof - i as f64).map_err(|e| Error::Numeric(e.to_string()))?;
        a[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            a[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let la = l * a;
    Ok(symmetrize(&(&la * la.transpose())))
}

/// Draws `Σ ~ IW(scale, dof)`, the inverse of a `Wishart(scale⁻¹, dof)` draw.
pub fn sample_inverse_wishart<R: Rng + ?Sized>(scale: &DMatrix<f64>, dof: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    let w = sample_wishart(&inverse(scale)?, dof, rng)?;
    inverse(&w)
}

/// Posterior inverse-Wishart parameters `(Φ + S, ν + N)` for `Σ | U, μ`.
pub fn sigma_posterior(u: &LatentConfiguration, mu: &DVector<f64>, priors: &Priors) -> (DMatrix<f64>, f64) {
    let mut scale = priors.sigma_scale.clone();
    for r in u.rows() {
        let z = DVector::from_column_slice(r) - mu;
        scale += &z * z.transpose();
    }
    (symmetrize(&scale), priors.sigma_dof + u.n_nodes() as f64)
}

/// Draws `Σ | U, μ` from its inverse-Wishart full conditional.
pub fn gibbs_sigma<R: Rng + ?Sized>(u: &LatentConfiguration, mu: &DVector<f64>, priors: &Priors, rng: &mut R) -> Result<DMatrix<f64>> {
    if u.dim() != priors.dim() || mu.len() != priors.dim() {
        return Err(Error::Dimension("latent and prior dimensions differ".into()));
    }
    let (scale, dof) = sigma_posterior(u, mu, priors);
    sample_inverse_wishart(&scale, dof, rng)
}

/// Draws from `Beta(a, b)` restricted to `[0, cap]`.
///
/// When most of the mass lies below the cap, plain rejection is used;
/// otherwise the regularized incomplete beta function is inverted by
/// bisection. Both are exact.
pub fn sample_truncated_beta<R: Rng + ?Sized>(a: f64, b: f64, cap: f64, rng: &mut R) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Parameter(format!("Beta({a}, {b})")));
    }
    let beta = Beta::new(a, b).map_err(|e| Error::Parameter(e.to_string()))?;
    if cap >= 1.0 {
        return Ok(beta.sample(rng));
    }
    if !(cap > 0.0) {
        return Err(Error::Parameter(format!("cap {cap} must be positive")));
    }
    let f_cap = beta_reg(a, b, cap);
    if f_cap >= 0.5 {
        loop {
            let x = beta.sample(rng);
            if x <= cap {
                return Ok(x);
            }
        }
    }
    if f_cap <= 0.0 {
        // All representable mass is above the cap; the cap is the limit point.
        return Ok(cap);
    }
    let target = rng.random::<f64>() * f_cap;
    Ok(invert_beta_cdf(a, b, target, cap))
}

/// Smallest `x ∈ [0, hi]` with `I_x(a, b) ≥ target`, to machine precision.
pub(crate) fn invert_beta_cdf(a: f64, b: f64, target: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Draws every noise probability from its Beta full conditional, truncated
/// to the caps in `current` if any. The mode (symmetric or not) follows
/// `current`.
pub fn gibbs_psi<R: Rng + ?Sized>(counts: &DiscrepancyCounts, priors: &Priors, current: &NoiseParams, rng: &mut R) -> Result<NoiseParams> {
    if counts.max_order() != current.max_order() || priors.max_order() != current.max_order() {
        return Err(Error::Dimension("counts, priors and noise cover different orders".into()));
    }
    if priors.noise.is_symmetric() != current.is_symmetric() {
        return Err(Error::Parameter("noise prior and noise parameters use different modes".into()));
    }
    let mut next = current.clone();
    for (k, c) in counts.iter() {
        let cap = current.cap(k);
        if current.is_symmetric() {
            let (a, b) = priors.noise.beta0(k);
            let d = (c.d10 + c.d01) as f64;
            let phi = sample_truncated_beta(d + a, (c.total() as f64 - d) + b, cap, rng)?;
            next.set(k, phi, phi);
        } else {
            let (a0, b0) = priors.noise.beta0(k);
            let (a1, b1) = priors.noise.beta1(k);
            let p0 = sample_truncated_beta(c.d01 as f64 + a0, c.d00 as f64 + b0, cap, rng)?;
            let p1 = sample_truncated_beta(c.d10 as f64 + a1, c.d11 as f64 + b1, cap, rng)?;
            next.set(k, p0, p1);
        }
    }
    Ok(next)
}
