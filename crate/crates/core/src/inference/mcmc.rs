use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::genmodel::NoiseParams;
use crate::geometry::{LatentConfiguration, RadiusSchedule};
use crate::hypercore::Hypergraph;
use crate::par;
use crate::rng::SeedTree;

use super::gibbs::{gibbs_mu, gibbs_psi, gibbs_sigma};
use super::init::{init_abc, init_latents_gmds, init_noise, init_radii, AbcConfig};
use super::priors::Priors;
use super::state::{mh_jump_latent, mh_update_latents, mh_update_radii, ChainState};

#[derive(Debug, Clone, PartialEq)]
pub struct MCMCConfig {
    pub iterations: usize,
    pub burn_in: usize,
    /// Number of latent blocks `L`.
    pub blocks: usize,
    /// Standard deviation of the latent random walk, per coordinate.
    pub sigma_u: f64,
    /// Standard deviation of the radius random walk, per order.
    pub sigma_r: f64,
    pub anchors: Option<Vec<usize>>,
    pub caps: Option<Vec<f64>>,
    /// Keep every `thin`-th iteration in the trace.
    pub thin: usize,
    /// Keep every `thin_latent`-th latent configuration; 0 keeps none.
    pub thin_latent: usize,
    pub gmds_weight: f64,
    pub abc: AbcConfig,
    /// Per-iteration probability, for each free node, of an extra move that
    /// relocates it next to one of its observed co-members (0 disables it).
    pub jump_prob: f64,
    /// Tune `sigma_u` and `sigma_r` towards a target acceptance rate during
    /// burn-in; the scales are frozen afterwards.
    pub adapt: bool,
}

impl Default for MCMCConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            burn_in: 500,
            blocks: 5,
            sigma_u: 0.05,
            sigma_r: 0.005,
            anchors: None,
            caps: None,
            thin: 1,
            thin_latent: 10,
            gmds_weight: 0.5,
            abc: AbcConfig::default(),
            adapt: true,
            jump_prob: 0.0,
        }
    }
}

impl MCMCConfig {
    pub fn validate(&self, max_order: usize) -> Result<()> {
        if self.iterations == 0 || self.burn_in >= self.iterations {
            return Err(Error::Parameter(format!(
                "need 0 ≤ burn_in < iterations, got {} and {}",
                self.burn_in, self.iterations
            )));
        }
        if self.blocks == 0 || self.thin == 0 {
            return Err(Error::Parameter("blocks and thin must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.jump_prob) {
            return Err(Error::Parameter("jump_prob must lie in [0, 1]".into()));
        }
        if !(self.sigma_u >= 0.0 && self.sigma_r >= 0.0) {
            return Err(Error::Parameter("proposal scales must be non-negative".into()));
        }
        if let Some(c) = &self.caps {
            if c.len() != max_order - 1 || c.iter().any(|x| !(*x > 0.0 && *x <= 1.0)) {
                return Err(Error::Parameter("caps must lie in (0, 1], one per order".into()));
            }
        }
        Ok(())
    }
}

/// One retained iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub loglik: f64,
    pub mu: Vec<f64>,
    /// Row-major upper triangle of Σ.
    pub sigma: Vec<f64>,
    pub radii: Vec<f64>,
    pub psi0: Vec<f64>,
    pub psi1: Vec<f64>,
    pub accept_r: bool,
    pub accept_u: Vec<bool>,
}

fn upper_triangle(m: &DMatrix<f64>) -> Vec<f64> {
    let d = m.nrows();
    (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
}

/// Inverse of [`upper_triangle`].
pub fn sigma_from_upper(v: &[f64], d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    let mut it = v.iter();
    for i in 0..d {
        for j in i..d {
            let x = *it.next().expect("d(d+1)/2 entries");
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

/// Receives the trace as it is produced, so long runs can be inspected
/// (and survive interruption) before they finish.
pub trait TraceSink {
    fn record(&mut self, row: &TraceRow) -> Result<()>;
    fn latent(&mut self, iteration: usize, u: &LatentConfiguration) -> Result<()>;
}

/// In-memory trace.
#[derive(Debug, Clone, Default)]
pub struct PosteriorTrace {
    pub rows: Vec<TraceRow>,
    pub latents: Vec<(usize, LatentConfiguration)>,
    pub burn_in: usize,
}

impl TraceSink for PosteriorTrace {
    fn record(&mut self, row: &TraceRow) -> Result<()> {
        self.rows.push(row.clone());
        Ok(())
    }

    fn latent(&mut self, iteration: usize, u: &LatentConfiguration) -> Result<()> {
        self.latents.push((iteration, u.clone()));
        Ok(())
    }
}

/// Posterior means over post-burn-in rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub radii: Vec<f64>,
    pub psi0: Vec<f64>,
    pub psi1: Vec<f64>,
    pub accept_r: f64,
    pub accept_u: Vec<f64>,
    pub latents: Option<LatentConfiguration>,
    pub n_rows: usize,
}

fn mean_of(rows: &[&TraceRow], f: impl Fn(&TraceRow) -> &[f64]) -> Vec<f64> {
    let len = f(rows[0]).len();
    let mut acc = vec![0.0; len];
    for r in rows {
        for (a, x) in acc.iter_mut().zip(f(r)) {
            *a += x;
        }
    }
    acc.iter().map(|a| a / rows.len() as f64).collect()
}

impl PosteriorTrace {
    pub fn summary(&self) -> Result<PosteriorSummary> {
        let rows: Vec<&TraceRow> = self.rows.iter().filter(|r| r.iteration > self.burn_in).collect();
        if rows.is_empty() {
            return Err(Error::Argument("no post-burn-in iterations in the trace".into()));
        }
        let d = rows[0].mu.len();
        let accept_u: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.accept_u.iter().map(|&b| b as u8 as f64).collect())
            .collect();
        let l = accept_u[0].len();
        let latents = {
            let kept: Vec<&LatentConfiguration> = self
                .latents
                .iter()
                .filter(|(i, _)| *i > self.burn_in)
                .map(|(_, u)| u)
                .collect();
            match kept.first() {
                None => None,
                Some(first) => {
                    let mut acc = vec![0.0; first.as_slice().len()];
                    for u in &kept {
                        for (a, x) in acc.iter_mut().zip(u.as_slice()) {
                            *a += x;
                        }
                    }
                    let coords = acc.iter().map(|a| a / kept.len() as f64).collect();
                    let mut m = LatentConfiguration::new(first.dim(), coords)?;
                    m.set_anchors_unchecked(first.anchors().map(<[usize]>::to_vec));
                    Some(m)
                }
            }
        };
        Ok(PosteriorSummary {
            mu: DVector::from_vec(mean_of(&rows, |r| &r.mu)),
            sigma: sigma_from_upper(&mean_of(&rows, |r| &r.sigma), d),
            radii: mean_of(&rows, |r| &r.radii),
            psi0: mean_of(&rows, |r| &r.psi0),
            psi1: mean_of(&rows, |r| &r.psi1),
            accept_r: rows.iter().filter(|r| r.accept_r).count() as f64 / rows.len() as f64,
            accept_u: (0..l).map(|b| accept_u.iter().map(|v| v[b]).sum::<f64>() / rows.len() as f64).collect(),
            latents,
            n_rows: rows.len(),
        })
    }
}

/// Starting values of the chain.
#[derive(Debug, Clone)]
pub struct InitialState {
    pub u: LatentConfiguration,
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub radii: RadiusSchedule,
    pub noise: NoiseParams,
}

/// GMDS coordinates, minimal covering radii, prior noise draw and ABC for
/// `(μ, Σ)`.
pub fn initialize<R: Rng + ?Sized>(h: &Hypergraph, priors: &Priors, cfg: &MCMCConfig, rng: &mut R) -> Result<InitialState> {
    priors.validate(priors.dim(), h.max_order())?;
    cfg.validate(h.max_order())?;
    let u = init_latents_gmds(h, cfg.gmds_weight, priors.dim(), cfg.anchors.as_deref())?;
    let radii = init_radii(h, &u)?;
    let noise = init_noise(priors, cfg.caps.as_deref(), rng)?;
    let (mu, sigma) = init_abc(h, priors, &radii, &noise, &cfg.abc, rng)?;
    Ok(InitialState {
        u,
        mu,
        sigma,
        radii,
        noise,
    })
}

/// For every node, the sorted list of nodes sharing a hyperedge with it.
pub fn co_members(h: &Hypergraph) -> Vec<Vec<usize>> {
    let mut sets = vec![std::collections::BTreeSet::new(); h.n_nodes()];
    for e in h.iter() {
        for &a in e.nodes() {
            for &b in e.nodes() {
                if a != b {
                    sets[a].insert(b);
                }
            }
        }
    }
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Round-robin partition of the non-anchor nodes into `l` blocks.
pub fn latent_blocks(n: usize, anchors: &[usize], l: usize) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); l];
    for (j, i) in (0..n).filter(|i| !anchors.contains(i)).enumerate() {
        blocks[j % l].push(i);
    }
    blocks
}

/// Runs the sampler from `init`, streaming every retained iteration to
/// `sink`, and returns the final state.
pub fn run_mcmc_from<R: Rng + ?Sized>(
    h: &Hypergraph,
    priors: &Priors,
    cfg: &MCMCConfig,
    init: InitialState,
    rng: &mut R,
    sink: &mut dyn TraceSink,
) -> Result<ChainState> {
    priors.validate(init.u.dim(), h.max_order())?;
    cfg.validate(h.max_order())?;
    if priors.noise.is_symmetric() != init.noise.is_symmetric() {
        return Err(Error::Parameter("noise prior and initial noise use different modes".into()));
    }
    let noise = match (&cfg.caps, init.noise.caps()) {
        (Some(c), None) => init.noise.with_caps(c.clone())?,
        _ => init.noise,
    };
    let anchors: Vec<usize> = init.u.anchors().map(<[usize]>::to_vec).unwrap_or_default();
    let blocks = latent_blocks(h.n_nodes(), &anchors, cfg.blocks);
    let neighbours = co_members(h);
    let mut state = ChainState::new(h, init.u, init.mu, init.sigma, init.radii, noise)?;
    let mut tune_u: Vec<Tuner> = blocks.iter().map(|_| Tuner::new(cfg.sigma_u)).collect();
    let mut tune_r = Tuner::new(cfg.sigma_r);
    for it in 1..=cfg.iterations {
        let adapting = cfg.adapt && it <= cfg.burn_in;
        state.mu = gibbs_mu(&state.u, &state.sigma, priors, rng)?;
        state.sigma = gibbs_sigma(&state.u, &state.mu, priors, rng)?;
        let mut accept_u = Vec::with_capacity(blocks.len());
        for (b, t) in blocks.iter().zip(&tune_u) {
            accept_u.push(mh_update_latents(&mut state, h, b, t.scale, rng)?);
        }
        if cfg.jump_prob > 0.0 {
            let tau = state.radii.get(2);
            for &i in blocks.iter().flatten() {
                if rng.random::<f64>() < cfg.jump_prob {
                    mh_jump_latent(&mut state, h, i, &neighbours[i], tau, rng)?;
                }
            }
        }
        let accept_r = mh_update_radii(&mut state, h, priors, tune_r.scale, rng)?;
        if adapting {
            for (t, &a) in tune_u.iter_mut().zip(&accept_u) {
                t.observe(a as usize, 1);
            }
            tune_r.observe(accept_r as usize, 1);
        }
        let noise = gibbs_psi(state.counts(), priors, &state.noise, rng)?;
        state.set_noise(noise)?;
        if it % cfg.thin == 0 {
            sink.record(&TraceRow {
                iteration: it,
                loglik: state.loglik(),
                mu: state.mu.iter().copied().collect(),
                sigma: upper_triangle(&state.sigma),
                radii: state.radii.as_slice().to_vec(),
                psi0: state.noise.psi0_all().to_vec(),
                psi1: state.noise.psi1_all().to_vec(),
                accept_r,
                accept_u,
            })?;
        }
        if cfg.thin_latent > 0 && it % cfg.thin_latent == 0 {
            sink.latent(it, &state.u)?;
        }
    }
    Ok(state)
}

const TARGET_ACCEPTANCE: f64 = 0.234;
const TUNING_BATCH: usize = 50;

/// Batch-wise scale adaptation: after every batch the log-scale moves by a
/// shrinking step towards the target acceptance rate.
struct Tuner {
    scale: f64,
    accepted: usize,
    proposed: usize,
    batches: usize,
}

impl Tuner {
    fn new(scale: f64) -> Self {
        Self {
            scale,
            accepted: 0,
            proposed: 0,
            batches: 0,
        }
    }

    fn observe(&mut self, accepted: usize, proposed: usize) {
        self.accepted += accepted;
        self.proposed += proposed;
        if self.proposed >= TUNING_BATCH {
            self.batches += 1;
            let rate = self.accepted as f64 / self.proposed as f64;
            let step = (1.0 / (self.batches as f64).sqrt()).min(0.5);
            self.scale *= if rate > TARGET_ACCEPTANCE { step.exp() } else { (-step).exp() };
            self.accepted = 0;
            self.proposed = 0;
        }
    }
}

/// Initializes and runs one chain, keeping the trace in memory.
pub fn run_mcmc<R: Rng + ?Sized>(h: &Hypergraph, priors: &Priors, cfg: &MCMCConfig, rng: &mut R) -> Result<PosteriorTrace> {
    let init = initialize(h, priors, cfg, rng)?;
    let mut trace = PosteriorTrace {
        burn_in: cfg.burn_in,
        ..Default::default()
    };
    run_mcmc_from(h, priors, cfg, init, rng, &mut trace)?;
    Ok(trace)
}

/// Independent chains, each seeded from its own child of `seeds`.
pub fn run_chains(h: &Hypergraph, priors: &Priors, cfg: &MCMCConfig, seeds: &SeedTree, chains: usize) -> Result<Vec<PosteriorTrace>> {
    par::map_range(chains, |c| {
        let mut rng = seeds.child("chain", c as u64).stream("mcmc");
        run_mcmc(h, priors, cfg, &mut rng)
    })
    .into_iter()
    .collect()
}

/// Fraction of observed order-k hyperedges also present in `g`, per order.
pub fn explained_fraction(h: &Hypergraph, g: &Hypergraph) -> Result<Vec<f64>> {
    if h.max_order() != g.max_order() || h.n_nodes() != g.n_nodes() {
        return Err(Error::Dimension("hypergraphs are not comparable".into()));
    }
    Ok(h.orders()
        .map(|k| {
            let obs = h.edges_of_order(k);
            if obs.is_empty() {
                1.0
            } else {
                obs.iter().filter(|e| g.contains(e.nodes())).count() as f64 / obs.len() as f64
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_robin_blocks_skip_anchors() {
        let b = latent_blocks(7, &[0, 3], 2);
        assert_eq!(b, vec![vec![1, 4, 6], vec![2, 5]]);
    }

    #[test]
    fn upper_triangle_round_trip() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
        let v = upper_triangle(&m);
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(sigma_from_upper(&v, 3), m);
    }
}
