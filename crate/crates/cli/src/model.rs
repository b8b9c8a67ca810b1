//! Builds model objects from a [`RunConfig`].

use lsh_core::baselines::{beta_case, default_blocks, lca_case, BetaModelParams, LcaModelParams};
use lsh_core::genmodel::{LatentGenerator, LatentPrior, MixtureComponent, NoiseParams};
use lsh_core::geometry::{RadiusSchedule, DEFAULT_MAX_ORDER};
use lsh_core::inference::{AbcConfig, MCMCConfig, NoisePrior, Priors};
use lsh_core::predictive::Placement;
use nalgebra::{DMatrix, DVector};

use crate::config::RunConfig;
use crate::error::CliResult;

fn err(key: &str, msg: impl std::fmt::Display) -> crate::error::CliError {
    RunConfig::error(key, msg)
}

/// `d x d` matrix from a scalar (times I), a diagonal or a full row-major list.
pub fn matrix(cfg: &RunConfig, key: &str, d: usize) -> CliResult<Option<DMatrix<f64>>> {
    let Some(v) = cfg.list::<f64>(key)? else {
        return Ok(None);
    };
    let m = if v.len() == 1 {
        DMatrix::identity(d, d) * v[0]
    } else if v.len() == d {
        DMatrix::from_diagonal(&DVector::from_vec(v))
    } else if v.len() == d * d {
        DMatrix::from_row_slice(d, d, &v)
    } else {
        return Err(err(key, format!("expected 1, {d} or {} values, got {}", d * d, v.len())));
    };
    Ok(Some(m))
}

/// Latent dimension: the length of `mu` if given, else `d` (default 2).
pub fn dim(cfg: &RunConfig) -> CliResult<usize> {
    let d = match cfg.list::<f64>("mu")? {
        Some(mu) => mu.len(),
        None => cfg.get_or("d", 2)?,
    };
    if let Some(dd) = cfg.get::<usize>("d")? {
        if dd != d {
            return Err(err("d", format!("{dd} disagrees with the length of mu ({d})")));
        }
    }
    if d != 2 && d != 3 {
        return Err(err("d", format!("latent dimension {d} is not supported (2 or 3)")));
    }
    Ok(d)
}

pub fn mu(cfg: &RunConfig, d: usize) -> CliResult<DVector<f64>> {
    Ok(cfg.list::<f64>("mu")?.map(DVector::from_vec).unwrap_or_else(|| DVector::zeros(d)))
}

pub fn sigma(cfg: &RunConfig, d: usize) -> CliResult<DMatrix<f64>> {
    Ok(matrix(cfg, "sigma", d)?.unwrap_or_else(|| DMatrix::identity(d, d)))
}

/// The radius schedule, checked against `max_order` and `max_order_limit`.
pub fn radii(cfg: &RunConfig) -> CliResult<RadiusSchedule> {
    let r: Vec<f64> = cfg.require_list("radii")?;
    let k = r.len() + 1;
    if let Some(kk) = cfg.get::<usize>("max_order")? {
        if kk != k {
            return Err(err("max_order", format!("{kk} but radii give K = {k}")));
        }
    }
    let limit: usize = cfg.get_or("max_order_limit", DEFAULT_MAX_ORDER)?;
    if k > limit {
        return Err(err(
            "radii",
            format!("maximum order {k} exceeds the size limit {limit}; raise max_order_limit to allow it"),
        ));
    }
    RadiusSchedule::new(r).map_err(|e| err("radii", e))
}

pub fn symmetric_mode(cfg: &RunConfig) -> CliResult<bool> {
    match cfg.raw("noise_mode").unwrap_or("symmetric") {
        "symmetric" => Ok(true),
        "asymmetric" => Ok(false),
        other => Err(err("noise_mode", format!("expected symmetric or asymmetric, got {other:?}"))),
    }
}

/// Noise parameters for orders `2..=k`; all zero when none are given.
pub fn noise(cfg: &RunConfig, k: usize) -> CliResult<NoiseParams> {
    let len = k - 1;
    let noise = if symmetric_mode(cfg)? {
        match cfg.per_order("phi", len)? {
            Some(phi) => NoiseParams::symmetric(phi).map_err(|e| err("phi", e))?,
            None => NoiseParams::zero(k, true),
        }
    } else {
        let psi0 = cfg.per_order("psi0", len)?.unwrap_or(vec![0.0; len]);
        let psi1 = cfg.per_order("psi1", len)?.unwrap_or(vec![0.0; len]);
        NoiseParams::asymmetric(psi0, psi1).map_err(|e| err("psi0", e))?
    };
    match caps(cfg, k)? {
        Some(c) => noise.with_caps(c).map_err(|e| err("caps", e)),
        None => Ok(noise),
    }
}

pub fn caps(cfg: &RunConfig, k: usize) -> CliResult<Option<Vec<f64>>> {
    cfg.per_order("caps", k - 1)
}

pub fn latent_prior(cfg: &RunConfig) -> CliResult<LatentPrior> {
    let d = dim(cfg)?;
    let mean = mu(cfg, d)?;
    let cov = sigma(cfg, d)?;
    let generator = match cfg.raw("generator").unwrap_or("gaussian") {
        "gaussian" => LatentGenerator::Gaussian,
        "mixture" => {
            let w: Vec<f64> = cfg.require_list("mixture_weights")?;
            let means: Vec<f64> = cfg.require_list("mixture_means")?;
            let covs: Vec<f64> = cfg.require_list("mixture_covs")?;
            if means.len() != w.len() * d {
                return Err(err("mixture_means", format!("expected {} values", w.len() * d)));
            }
            if covs.len() != w.len() * d * d {
                return Err(err("mixture_covs", format!("expected {} values", w.len() * d * d)));
            }
            let comps = (0..w.len())
                .map(|c| MixtureComponent {
                    weight: w[c],
                    mean: DVector::from_column_slice(&means[c * d..(c + 1) * d]),
                    cov: DMatrix::from_row_slice(d, d, &covs[c * d * d..(c + 1) * d * d]),
                })
                .collect();
            LatentGenerator::GaussianMixture(comps)
        }
        "poisson" => LatentGenerator::PoissonProcess {
            lower: cfg.require_list("poisson_lower")?,
            upper: cfg.require_list("poisson_upper")?,
            intensity: cfg.require("poisson_intensity")?,
        },
        other => return Err(err("generator", format!("expected gaussian, mixture or poisson, got {other:?}"))),
    };
    LatentPrior::new(mean, cov, generator).map_err(|e| err("generator", e))
}

pub fn priors(cfg: &RunConfig, d: usize, k: usize) -> CliResult<Priors> {
    let len = k - 1;
    let ones = |key: &str, def: f64| -> CliResult<Vec<f64>> { Ok(cfg.per_order(key, len)?.unwrap_or(vec![def; len])) };
    let noise = if symmetric_mode(cfg)? {
        NoisePrior::Symmetric {
            a: ones("prior_noise_a", 1.0)?,
            b: ones("prior_noise_b", 200.0)?,
        }
    } else {
        NoisePrior::Asymmetric {
            a0: ones("prior_psi0_a", 1.0)?,
            b0: ones("prior_psi0_b", 200.0)?,
            a1: ones("prior_psi1_a", 1.0)?,
            b1: ones("prior_psi1_b", 200.0)?,
        }
    };
    let p = Priors {
        mu_mean: cfg
            .list::<f64>("prior_mu_mean")?
            .map(DVector::from_vec)
            .unwrap_or_else(|| DVector::zeros(d)),
        mu_cov: matrix(cfg, "prior_mu_cov", d)?.unwrap_or_else(|| DMatrix::identity(d, d) * 10.0),
        sigma_scale: matrix(cfg, "prior_sigma_scale", d)?.unwrap_or_else(|| DMatrix::identity(d, d)),
        sigma_dof: cfg.get_or("prior_sigma_dof", d as f64 + 2.0)?,
        radius_rates: ones("prior_radius_rates", 1.0)?,
        noise,
    };
    p.validate(d, k).map_err(|e| err("prior_mu_mean", e))?;
    Ok(p)
}

pub fn mcmc(cfg: &RunConfig, k: usize) -> CliResult<MCMCConfig> {
    let def = MCMCConfig::default();
    let abc_def = AbcConfig::default();
    let c = MCMCConfig {
        iterations: cfg.get_or("iterations", def.iterations)?,
        burn_in: cfg.get_or("burn_in", def.burn_in)?,
        blocks: cfg.get_or("blocks", def.blocks)?,
        sigma_u: cfg.get_or("sigma_u", def.sigma_u)?,
        sigma_r: cfg.get_or("sigma_r", def.sigma_r)?,
        anchors: cfg.list("anchors")?,
        caps: caps(cfg, k)?,
        thin: cfg.get_or("thin", def.thin)?,
        thin_latent: cfg.get_or("thin_latent", def.thin_latent)?,
        gmds_weight: cfg.get_or("gmds_weight", def.gmds_weight)?,
        abc: AbcConfig {
            samples: cfg.get_or("abc_samples", abc_def.samples)?,
            epsilon: cfg.get_or("abc_epsilon", abc_def.epsilon)?,
            max_attempts: cfg.get_or("abc_max_attempts", abc_def.max_attempts)?,
        },
        jump_prob: cfg.get_or("jump_prob", def.jump_prob)?,
        adapt: cfg.bool_or("adapt", def.adapt)?,
    };
    c.validate(k).map_err(|e| err("iterations", e))?;
    Ok(c)
}

pub fn placement(value: &str) -> CliResult<Placement> {
    match value {
        "gaussian" => Ok(Placement::Gaussian),
        "peripheral" => Ok(Placement::Peripheral),
        other => Err(err("placement", format!("expected gaussian or peripheral, got {other:?}"))),
    }
}

pub fn beta_params(cfg: &RunConfig) -> CliResult<BetaModelParams> {
    let n: usize = cfg.require("n")?;
    let k: usize = cfg.get_or("max_order", 2)?;
    let limit: usize = cfg.get_or("max_order_limit", DEFAULT_MAX_ORDER)?;
    if k > limit {
        return Err(err("max_order", format!("{k} exceeds the size limit {limit}")));
    }
    let p = match (cfg.get::<usize>("beta_case")?, cfg.list::<f64>("beta")?) {
        (Some(c), None) => beta_case(c, n, k),
        (None, Some(b)) if b.len() == 1 => BetaModelParams::new(vec![b[0]; n], k),
        (None, Some(b)) if b.len() == n => BetaModelParams::new(b, k),
        (None, Some(b)) => return Err(err("beta", format!("expected 1 or {n} values, got {}", b.len()))),
        (Some(_), Some(_)) => return Err(err("beta", "give either beta or beta_case, not both")),
        (None, None) => return Err(err("beta", "required for the beta model (or beta_case)")),
    };
    let p = p.map_err(|e| err("beta", e))?;
    p.candidate_count().map_err(|e| err("max_order", e))?;
    Ok(p)
}

pub fn lca_params(cfg: &RunConfig) -> CliResult<LcaModelParams> {
    let n: usize = cfg.require("n")?;
    let m: usize = cfg.require("lca_edges")?;
    if let Some(case) = cfg.get::<usize>("lca_case")? {
        let blocks = match cfg.list::<usize>("lca_blocks")? {
            None => default_blocks(n),
            Some(b) if b.len() == 3 => [b[0], b[1], b[2]],
            Some(b) => return Err(err("lca_blocks", format!("expected 3 sizes, got {}", b.len()))),
        };
        return lca_case(case, n, blocks, m).map_err(|e| err("lca_case", e));
    }
    LcaModelParams::new(
        n,
        cfg.require_list("lca_alpha")?,
        cfg.require_list("lca_phi")?,
        cfg.require_list("lca_pi")?,
        cfg.require_list("lca_tau")?,
        m,
    )
    .map_err(|e| err("lca_phi", e))
}
