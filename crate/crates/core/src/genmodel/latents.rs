use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::LatentConfiguration;
use crate::linalg::{cholesky, sample_mvn};

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

/// How latent coordinates are generated.
#[derive(Debug, Clone, PartialEq)]
pub enum LatentGenerator {
    Gaussian,
    GaussianMixture(Vec<MixtureComponent>),
    /// Homogeneous Poisson process on the box `[lower, upper]`, intensity per
    /// unit volume. The number of points is random.
    PoissonProcess {
        lower: Vec<f64>,
        upper: Vec<f64>,
        intensity: f64,
    },
}

/// Distribution of the latent coordinates. `mean`/`cov` are the model's μ and
/// Σ; the generator may replace them to simulate from a misspecified model.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentPrior {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    generator: LatentGenerator,
}

fn is_zero(m: &DMatrix<f64>) -> bool {
    m.iter().all(|&x| x == 0.0)
}

fn check_cov(cov: &DMatrix<f64>, d: usize) -> Result<()> {
    if cov.nrows() != d || cov.ncols() != d {
        return Err(Error::Dimension(format!("covariance must be {d}x{d}")));
    }
    if !is_zero(cov) {
        cholesky(cov)?;
    }
    Ok(())
}

impl LatentPrior {
    pub fn gaussian(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        Self::new(mean, cov, LatentGenerator::Gaussian)
    }

    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, generator: LatentGenerator) -> Result<Self> {
        let d = mean.len();
        if d != 2 && d != 3 {
            return Err(Error::Unsupported(format!("latent dimension {d}")));
        }
        check_cov(&cov, d)?;
        match &generator {
            LatentGenerator::Gaussian => {}
            LatentGenerator::GaussianMixture(comps) => {
                if comps.is_empty() {
                    return Err(Error::Parameter("mixture without components".into()));
                }
                let total: f64 = comps.iter().map(|c| c.weight).sum();
                if comps.iter().any(|c| !(c.weight >= 0.0)) || (total - 1.0).abs() > 1e-9 {
                    return Err(Error::Parameter(format!("mixture weights must be non-negative and sum to 1, got {total}")));
                }
                for c in comps {
                    if c.mean.len() != d {
                        return Err(Error::Dimension("mixture mean dimension".into()));
                    }
                    check_cov(&c.cov, d)?;
                }
            }
            LatentGenerator::PoissonProcess { lower, upper, intensity } => {
                if lower.len() != d || upper.len() != d {
                    return Err(Error::Dimension("box bounds dimension".into()));
                }
                if lower.iter().zip(upper).any(|(a, b)| !(b > a)) {
                    return Err(Error::Parameter("box bounds must satisfy lower < upper".into()));
                }
                if !(intensity.is_finite() && *intensity > 0.0) {
                    return Err(Error::Parameter("intensity must be positive".into()));
                }
            }
        }
        Ok(Self { mean, cov, generator })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn generator(&self) -> &LatentGenerator {
        &self.generator
    }
}

fn gaussian_rows<R: Rng + ?Sized>(rng: &mut R, mean: &DVector<f64>, cov: &DMatrix<f64>, n: usize, out: &mut Vec<f64>) -> Result<()> {
    if is_zero(cov) {
        for _ in 0..n {
            out.extend(mean.iter());
        }
        return Ok(());
    }
    let l = cholesky(cov)?.l();
    for _ in 0..n {
        out.extend(sample_mvn(rng, mean, &l).iter());
    }
    Ok(())
}

/// Draws latent coordinates. For the Poisson-process generator `n` is ignored
/// and the number of rows is itself random.
pub fn sample_latents<R: Rng + ?Sized>(prior: &LatentPrior, n: usize, rng: &mut R) -> Result<LatentConfiguration> {
    let d = prior.dim();
    let mut coords = Vec::with_capacity(n * d);
    match &prior.generator {
        LatentGenerator::Gaussian => gaussian_rows(rng, &prior.mean, &prior.cov, n, &mut coords)?,
        LatentGenerator::GaussianMixture(comps) => {
            let pick = WeightedIndex::new(comps.iter().map(|c| c.weight)).map_err(|e| Error::Parameter(e.to_string()))?;
            for _ in 0..n {
                let c = &comps[pick.sample(rng)];
                gaussian_rows(rng, &c.mean, &c.cov, 1, &mut coords)?;
            }
        }
        LatentGenerator::PoissonProcess { lower, upper, intensity } => {
            let volume: f64 = lower.iter().zip(upper).map(|(a, b)| b - a).product();
            let count = Poisson::new(intensity * volume)
                .map_err(|e| Error::Parameter(e.to_string()))?
                .sample(rng) as usize;
            for _ in 0..count {
                for t in 0..d {
                    coords.push(rng.random_range(lower[t]..upper[t]));
                }
            }
        }
    }
    LatentConfiguration::new(d, coords)
}
