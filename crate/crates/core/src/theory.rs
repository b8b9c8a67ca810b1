//! Connection probabilities, expected degrees and degree distributions of the
//! noisy geometric hypergraph under Gaussian latent coordinates.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore};
use statrs::distribution::{Binomial, ContinuousCDF, Discrete, Gamma, Poisson};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::geometry::{miniball_radius, Point};
use crate::hypercore::binomial;
use crate::linalg::{cholesky, sample_mvn};
use crate::par;
use crate::rng::SeedTree;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    ClosedForm,
    /// Deterministic quadrature of the squared-distance law.
    Quadrature,
    MonteCarlo { n_samples: usize, std_error: f64 },
}

/// Probability that a given order-`k` set is a hyperedge of the noiseless
/// hypergraph at radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionProbability {
    pub order: usize,
    pub radius: f64,
    pub value: f64,
    pub method: Method,
}

impl ConnectionProbability {
    pub fn std_error(&self) -> f64 {
        match self.method {
            Method::MonteCarlo { std_error, .. } => std_error,
            _ => 0.0,
        }
    }
}

// Simpson panels per nested integral; the sine substitution removes the
// endpoint singularities so this is accurate to ~1e-12.
const PANELS: usize = 512;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `P(Σ_l X_l² ≤ t)` for independent `X_l ~ N(0, v_l)`.
fn chi_mixture_cdf(t: f64, v: &[f64]) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    match v {
        [] => 1.0,
        [v0] => erf((t / (2.0 * v0)).sqrt()),
        [v0, rest @ ..] => {
            // x = √t sin θ, leaving Σ_rest ≤ t cos²θ
            let s = t.sqrt();
            let f = |th: f64| {
                let (sn, cs) = th.sin_cos();
                let x = s * sn;
                let dens = (-x * x / (2.0 * v0)).exp() / (2.0 * std::f64::consts::PI * v0).sqrt();
                dens * chi_mixture_cdf(t * cs * cs, rest) * s * cs
            };
            let half = std::f64::consts::FRAC_PI_2;
            simpson(f, -half, half, PANELS).clamp(0.0, 1.0)
        }
    }
}

/// Probability that two independent `N(μ, Σ)` points lie within `2 r₂` of
/// each other.
///
/// `U_i − U_j ~ N(0, 2Σ)`, so the squared distance is a sum of independent
/// `Gamma(1/2, scale 4σ_l²)` terms. Isotropic `Σ` gives `Gamma(d/2, scale
/// 4σ²)` in closed form; otherwise the convolution is integrated
/// numerically. A non-diagonal `Σ` is handled exactly in its eigenbasis.
pub fn p_edge_order2(sigma: &DMatrix<f64>, r2: f64) -> Result<ConnectionProbability> {
    let d = sigma.nrows();
    if d == 0 || d > 3 || sigma.ncols() != d {
        return Err(Error::Dimension(format!("Σ must be d×d with d ≤ 3, got {}×{}", d, sigma.ncols())));
    }
    if !(r2 >= 0.0) {
        return Err(Error::Parameter(format!("radius {r2} must be non-negative")));
    }
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || sigma[(i, j)] == 0.0));
    let vars: Vec<f64> = if diagonal {
        sigma.diagonal().iter().copied().collect()
    } else {
        log::warn!("Σ is not diagonal; using its eigenvalues");
        cholesky(sigma)?;
        sigma.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
    };
    if vars.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Parameter("Σ must be positive definite".into()));
    }
    let t = 4.0 * r2 * r2;
    let mk = |value: f64, method| ConnectionProbability {
        order: 2,
        radius: r2,
        value,
        method,
    };
    if r2 == 0.0 {
        return Ok(mk(0.0, Method::ClosedForm));
    }
    if r2.is_infinite() {
        return Ok(mk(1.0, Method::ClosedForm));
    }
    let isotropic = vars.iter().all(|v| (v - vars[0]).abs() <= 1e-12 * vars[0]);
    if isotropic {
        let g = Gamma::new(d as f64 / 2.0, 1.0 / (4.0 * vars[0])).map_err(|e| Error::Numeric(e.to_string()))?;
        return Ok(mk(g.cdf(t), Method::ClosedForm));
    }
    let v: Vec<f64> = vars.iter().map(|s| 2.0 * s).collect();
    Ok(mk(chi_mixture_cdf(t, &v), Method::Quadrature))
}

// Samples per independently seeded shard of a Monte Carlo estimate.
const SHARD: usize = 4096;

/// Monte Carlo estimate of the probability that `k` independent `N(μ, Σ)`
/// points fit in a ball of radius `r_k`, with its binomial standard error.
///
/// Samples are split into fixed-size shards on separate streams, so the
/// estimate does not depend on the thread count.
pub fn p_edge_mc<R: RngCore + ?Sized>(
    mu: &DVector<f64>,
    sigma: &DMatrix<f64>,
    r_k: f64,
    k: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<ConnectionProbability> {
    let d = mu.len();
    if d == 0 || d > 3 || sigma.nrows() != d {
        return Err(Error::Dimension("μ and Σ must share a dimension of at most 3".into()));
    }
    if k < 2 {
        return Err(Error::OrderOutOfRange { order: k, max: usize::MAX });
    }
    if n_samples < 1000 {
        return Err(Error::Argument(format!("{n_samples} samples; at least 1000 are required")));
    }
    if !(r_k >= 0.0) {
        return Err(Error::Parameter(format!("radius {r_k} must be non-negative")));
    }
    let l = cholesky(sigma)?.l();
    let tree = SeedTree::new(rng.next_u64());
    let shards = n_samples.div_ceil(SHARD);
    let hits: usize = par::map_range(shards, |s| {
        let mut rng = tree.substream("p_edge", s as u64);
        let m = SHARD.min(n_samples - s * SHARD);
        let mut pts: Vec<Point> = vec![[0.0; 3]; k];
        let mut hits = 0;
        for _ in 0..m {
            for p in pts.iter_mut() {
                let x = sample_mvn(&mut rng, mu, &l);
                p[..d].copy_from_slice(x.as_slice());
            }
            if miniball_radius(&mut pts, d) <= r_k {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();
    let p = hits as f64 / n_samples as f64;
    Ok(ConnectionProbability {
        order: k,
        radius: r_k,
        value: p,
        method: Method::MonteCarlo {
            n_samples,
            std_error: (p * (1.0 - p) / n_samples as f64).sqrt(),
        },
    })
}

/// Connection probability after noise: `(1 − φ) p + φ (1 − p)`.
pub fn effective_probability(p_edge: f64, phi: f64) -> f64 {
    (1.0 - phi) * p_edge + phi * (1.0 - p_edge)
}

fn check_probs(ps: &[f64]) -> Result<()> {
    if ps.iter().all(|p| (0.0..=1.0).contains(p)) {
        Ok(())
    } else {
        Err(Error::Parameter("probabilities must lie in [0, 1]".into()))
    }
}

/// Expected degree of a node, summed over orders `2..=K`; `p_edge[k-2]` and
/// `phi[k-2]` belong to order `k`.
pub fn expected_degree(n: usize, p_edge: &[f64], phi: &[f64]) -> Result<f64> {
    if p_edge.len() != phi.len() {
        return Err(Error::Dimension("one noise level per order is required".into()));
    }
    check_probs(p_edge)?;
    check_probs(phi)?;
    let mut total = 0.0;
    for (i, (&p, &f)) in p_edge.iter().zip(phi).enumerate() {
        let k = i + 2;
        total += binomial(n.saturating_sub(1), k - 1)? as f64 * effective_probability(p, f);
    }
    Ok(total)
}

/// A probability mass function on `0..pmf.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pub pmf: Vec<f64>,
}

impl DegreeDistribution {
    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(i, p)| i as f64 * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.pmf.iter().sum()
    }

    /// Normalised histogram of observed degrees, on `0..=max(len-1, max degree)`.
    pub fn empirical(degrees: &[usize], len: usize) -> Self {
        let top = degrees.iter().copied().max().map_or(len, |m| len.max(m + 1));
        let mut pmf = vec![0.0; top];
        for &x in degrees {
            pmf[x] += 1.0;
        }
        let n = degrees.len().max(1) as f64;
        pmf.iter_mut().for_each(|p| *p /= n);
        Self { pmf }
    }

    /// Total-variation distance; missing support counts as zero mass.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let len = self.pmf.len().max(other.pmf.len());
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        0.5 * (0..len).map(|i| (at(&self.pmf, i) - at(&other.pmf, i)).abs()).sum::<f64>()
    }
}

/// Order-2 degree law: `Binomial(N − 1, (1 − φ₂) p₂ + φ₂ (1 − p₂))`.
pub fn degree_dist_order2(n: usize, p_edge: f64, phi: f64) -> Result<DegreeDistribution> {
    check_probs(&[p_edge, phi])?;
    if n < 1 {
        return Err(Error::Argument("at least one node is required".into()));
    }
    let trials = (n - 1) as u64;
    let b = Binomial::new(effective_probability(p_edge, phi), trials).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(DegreeDistribution {
        pmf: (0..=trials).map(|x| b.pmf(x)).collect(),
    })
}

/// Poisson rate of the order-3 degree: `C(N − 1, 2) · p₃`, with `p₃` the
/// noisy connection probability.
pub fn order3_rate(n: usize, p_edge: f64, phi: f64) -> Result<f64> {
    check_probs(&[p_edge, phi])?;
    Ok(binomial(n.saturating_sub(1), 2)? as f64 * effective_probability(p_edge, phi))
}

/// Approximate order-3 degree law, `Poisson(C(N − 1, 2) p₃)`, on
/// `0..=C(N − 1, 2)`. The approximation needs a small rate; a warning is
/// logged above 5.
pub fn degree_dist_order3(n: usize, p_edge: f64, phi: f64) -> Result<DegreeDistribution> {
    let rate = order3_rate(n, p_edge, phi)?;
    let top = binomial(n.saturating_sub(1), 2)?;
    if rate > 5.0 {
        log::warn!("order-3 degree rate {rate:.3} is large; the Poisson law is a poor approximation");
    }
    if rate == 0.0 {
        let mut pmf = vec![0.0; top as usize + 1];
        pmf[0] = 1.0;
        return Ok(DegreeDistribution { pmf });
    }
    let p = Poisson::new(rate).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(DegreeDistribution {
        pmf: (0..=top).map(|x| p.pmf(x)).collect(),
    })
}

/// One point of a connection-probability sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub order: usize,
    pub radius: f64,
    pub p_hat: f64,
    pub std_error: f64,
    /// Closed-form or quadrature value for order 2, `None` otherwise.
    pub exact: Option<f64>,
}

/// Monte Carlo connection probabilities over a grid of radii and orders.
pub fn sweep<R: Rng + ?Sized>(
    mu: &DVector<f64>,
    sigma: &DMatrix<f64>,
    orders: &[usize],
    radii: &[f64],
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<SweepPoint>> {
    let tree = SeedTree::new(rng.next_u64());
    let mut out = Vec::with_capacity(orders.len() * radii.len());
    for &k in orders {
        for (j, &r) in radii.iter().enumerate() {
            let mut s = tree.substream(&format!("sweep-{k}"), j as u64);
            let mc = p_edge_mc(mu, sigma, r, k, n_samples, &mut s)?;
            let exact = if k == 2 { Some(p_edge_order2(sigma, r)?.value) } else { None };
            out.push(SweepPoint {
                order: k,
                radius: r,
                p_hat: mc.value,
                std_error: mc.std_error(),
                exact,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isotropic_plane_is_exponential() {
        let p = p_edge_order2(&DMatrix::identity(2, 2), 1.0).unwrap();
        assert!((p.value - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert_eq!(p.method, Method::ClosedForm);
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        // the nested integral on an isotropic input must reproduce the Gamma CDF
        for d in 2..=3 {
            for &r in &[0.1, 0.5, 1.0, 2.5] {
                let v = vec![2.0 * 0.7; d];
                let q = chi_mixture_cdf(4.0 * r * r, &v);
                let g = Gamma::new(d as f64 / 2.0, 1.0 / (4.0 * 0.7)).unwrap().cdf(4.0 * r * r);
                assert!((q - g).abs() < 1e-9, "d={d} r={r}: {q} vs {g}");
            }
        }
    }

    #[test]
    fn limits() {
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
        assert_eq!(p_edge_order2(&s, 0.0).unwrap().value, 0.0);
        assert_eq!(p_edge_order2(&s, f64::INFINITY).unwrap().value, 1.0);
        assert!(p_edge_order2(&s, 50.0).unwrap().value > 1.0 - 1e-9);
    }

    #[test]
    fn rotation_does_not_change_probability() {
        let (c, s) = (0.6f64, 0.8f64);
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        let rotated = &rot * &diag * rot.transpose();
        let a = p_edge_order2(&diag, 0.8).unwrap().value;
        let b = p_edge_order2(&rotated, 0.8).unwrap().value;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn pmfs_sum_to_one() {
        let b = degree_dist_order2(20, 0.2, 0.01).unwrap();
        assert!((b.total() - 1.0).abs() < 1e-12);
        let p = degree_dist_order3(20, 0.01, 0.001).unwrap();
        let rate = order3_rate(20, 0.01, 0.001).unwrap();
        assert!((p.mean() - rate).abs() < 1e-12);
        assert_eq!(degree_dist_order2(20, 0.0, 0.0).unwrap().pmf[0], 1.0);
        assert_eq!(degree_dist_order3(20, 0.0, 0.0).unwrap().pmf[0], 1.0);
    }

    #[test]
    fn expected_degree_cases() {
        assert_eq!(expected_degree(10, &[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(expected_degree(5, &[0.9], &[0.5]).unwrap(), 2.0);
        assert_eq!(expected_degree(5, &[0.1], &[0.5]).unwrap(), 2.0);
    }

    #[test]
    fn zero_radius_mc_is_zero() {
        let mut r = ChaCha8Rng::seed_from_u64(1);
        let p = p_edge_mc(&DVector::zeros(2), &DMatrix::identity(2, 2), 0.0, 3, 2000, &mut r).unwrap();
        assert_eq!(p.value, 0.0);
    }
}
