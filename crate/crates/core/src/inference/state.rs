use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::genmodel::NoiseParams;
use crate::geometry::{local_sets, CechEnumeration, LatentConfiguration, RadiusSchedule};
use crate::hypercore::{discrepancy_counts, DiscrepancyCounts, Edge, Hypergraph, OrderCounts};
use crate::linalg::GaussianDensity;

use super::likelihood::log_likelihood;
use super::priors::Priors;

// Candidate sets are enumerated up to this multiple of the largest radius so
// that small radius moves can reuse the enumeration.
const CACHE_MARGIN: f64 = 1.25;

/// Full state of one chain together with cached derived quantities: the
/// induced hypergraph `g(U, r)`, its discrepancy counts against the data and
/// the log-likelihood.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub u: LatentConfiguration,
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub radii: RadiusSchedule,
    pub noise: NoiseParams,
    // Full enumeration at the current U; dropped when U changes and rebuilt
    // lazily for radius moves.
    cache: Option<CechEnumeration>,
    induced: Hypergraph,
    counts: DiscrepancyCounts,
    loglik: f64,
}

impl ChainState {
    pub fn new(
        h: &Hypergraph,
        u: LatentConfiguration,
        mu: DVector<f64>,
        sigma: DMatrix<f64>,
        radii: RadiusSchedule,
        noise: NoiseParams,
    ) -> Result<Self> {
        if u.n_nodes() != h.n_nodes() {
            return Err(Error::Dimension(format!(
                "{} latent rows for {} nodes",
                u.n_nodes(),
                h.n_nodes()
            )));
        }
        if radii.max_order() != h.max_order() || noise.max_order() != h.max_order() {
            return Err(Error::Dimension("radii, noise and data cover different orders".into()));
        }
        if mu.len() != u.dim() || sigma.nrows() != u.dim() {
            return Err(Error::Dimension("μ/Σ dimension differs from the latent dimension".into()));
        }
        let cache = CechEnumeration::build(&u, radii.largest() * CACHE_MARGIN, h.max_order())?;
        let induced = cache.to_nsrgh(&radii)?;
        let counts = discrepancy_counts(&induced, h)?;
        let loglik = log_likelihood(&counts, &noise)?;
        Ok(Self {
            u,
            mu,
            sigma,
            radii,
            noise,
            cache: Some(cache),
            induced,
            counts,
            loglik,
        })
    }

    pub fn induced(&self) -> &Hypergraph {
        &self.induced
    }

    pub fn counts(&self) -> &DiscrepancyCounts {
        &self.counts
    }

    pub fn loglik(&self) -> f64 {
        self.loglik
    }

    /// Recomputes the log-likelihood after the noise parameters changed.
    pub fn set_noise(&mut self, noise: NoiseParams) -> Result<()> {
        self.loglik = log_likelihood(&self.counts, &noise)?;
        self.noise = noise;
        Ok(())
    }
}

/// Log acceptance ratio and the derived quantities of a proposed state.
pub struct Proposal {
    pub log_ratio: f64,
    cache: Option<CechEnumeration>,
    induced: Induced,
    counts: DiscrepancyCounts,
    loglik: f64,
}

enum Induced {
    Full(Hypergraph),
    // hyperedges touching `moved` are replaced by `added` (one layer per order)
    Delta { moved: Vec<usize>, added: Vec<Vec<Edge>> },
}

/// Evaluates moving the rows in `block` to `rows` (row-major, `block.len()×d`).
pub fn latent_proposal(state: &ChainState, h: &Hypergraph, block: &[usize], rows: &[f64]) -> Result<(LatentConfiguration, Proposal)> {
    let d = state.u.dim();
    if rows.len() != block.len() * d {
        return Err(Error::Dimension("proposal rows do not match the block".into()));
    }
    let density = GaussianDensity::new(state.mu.clone(), &state.sigma)?;
    let mut u_new = state.u.clone();
    let mut log_prior_ratio = 0.0;
    for (j, &i) in block.iter().enumerate() {
        let new = &rows[j * d..(j + 1) * d];
        log_prior_ratio += density.ln_pdf(new) - density.ln_pdf(state.u.row(i));
        u_new.row_mut(i).copy_from_slice(new);
    }
    let local = local_sets(&u_new, block, state.radii.largest(), h.max_order())?;
    let mut added = Vec::with_capacity(local.len());
    let mut per_order = Vec::with_capacity(local.len());
    for k in h.orders() {
        let layer: Vec<Edge> = local[k - 2]
            .iter()
            .filter(|(_, r)| *r <= state.radii.get(k))
            .map(|(e, _)| e.clone())
            .collect();
        let old = state.counts.order(k);
        let (mut d11, mut d10) = (old.d11 as i64, old.d10 as i64);
        for e in state.induced.edges_of_order(k).iter().filter(|e| touches(e, block)) {
            if h.contains(e.nodes()) {
                d11 -= 1;
            } else {
                d10 -= 1;
            }
        }
        for e in &layer {
            if h.contains(e.nodes()) {
                d11 += 1;
            } else {
                d10 += 1;
            }
        }
        let (d11, d10) = (d11 as u64, d10 as u64);
        let d01 = h.n_edges_of_order(k) as u64 - d11;
        per_order.push(OrderCounts {
            d11,
            d10,
            d01,
            d00: old.total() - d11 - d10 - d01,
        });
        added.push(layer);
    }
    let counts = DiscrepancyCounts::from_parts(h.n_nodes(), per_order)?;
    let induced = Induced::Delta {
        moved: block.to_vec(),
        added,
    };
    let loglik = log_likelihood(&counts, &state.noise)?;
    let log_ratio = loglik - state.loglik + log_prior_ratio;
    Ok((
        u_new,
        Proposal {
            log_ratio,
            cache: None,
            induced,
            counts,
            loglik,
        },
    ))
}

fn accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    if log_ratio >= 0.0 {
        return true;
    }
    if log_ratio.is_nan() || log_ratio == f64::NEG_INFINITY {
        return false;
    }
    rng.random::<f64>().ln() < log_ratio
}

fn touches(e: &Edge, nodes: &[usize]) -> bool {
    nodes.iter().any(|&b| e.contains(b))
}

/// Replaces the hyperedges of `g` touching `moved` with `added`.
fn relocate(g: &mut Hypergraph, moved: &[usize], added: Vec<Vec<Edge>>) {
    for (k, new) in (2..).zip(added) {
        let old = g.edges_of_order(k);
        let mut layer: Vec<Edge> = Vec::with_capacity(old.len() + new.len());
        let mut kept = old.iter().filter(|e| !touches(e, moved)).cloned().peekable();
        let mut new = new.into_iter().peekable();
        // both inputs are sorted and disjoint
        loop {
            let take_new = match (kept.peek(), new.peek()) {
                (Some(a), Some(b)) => b < a,
                (None, Some(_)) => true,
                (_, None) => false,
            };
            match if take_new { new.next() } else { kept.next() } {
                Some(e) => layer.push(e),
                None => break,
            }
        }
        g.replace_layer(k, layer);
    }
}

fn commit(state: &mut ChainState, p: Proposal, u_changed: bool) {
    if u_changed {
        state.cache = None;
    }
    if let Some(c) = p.cache {
        state.cache = Some(c);
    }
    match p.induced {
        Induced::Full(g) => state.induced = g,
        Induced::Delta { moved, added } => relocate(&mut state.induced, &moved, added),
    }
    state.counts = p.counts;
    state.loglik = p.loglik;
}

/// Gaussian random-walk update of the rows in `block` (standard deviation
/// `sigma_u` per coordinate). Anchor rows must not appear in the block.
pub fn mh_update_latents<R: Rng + ?Sized>(state: &mut ChainState, h: &Hypergraph, block: &[usize], sigma_u: f64, rng: &mut R) -> Result<bool> {
    if let Some(anchors) = state.u.anchors() {
        if block.iter().any(|i| anchors.contains(i)) {
            return Err(Error::Argument("latent block contains an anchor".into()));
        }
    }
    if block.is_empty() {
        return Ok(true);
    }
    let d = state.u.dim();
    let mut rows = Vec::with_capacity(block.len() * d);
    for &i in block {
        for t in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            rows.push(state.u.row(i)[t] + sigma_u * z);
        }
    }
    if sigma_u == 0.0 {
        return Ok(true);
    }
    let (u_new, p) = latent_proposal(state, h, block, &rows)?;
    if accept(p.log_ratio, rng) {
        state.u = u_new;
        commit(state, p, true);
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Evaluates proposed radii; `None` when they violate positivity or ordering.
pub fn radius_proposal(state: &ChainState, h: &Hypergraph, priors: &Priors, radii: &[f64]) -> Result<Option<(RadiusSchedule, Proposal)>> {
    if !RadiusSchedule::is_valid(radii) {
        return Ok(None);
    }
    let r_new = RadiusSchedule::new(radii.to_vec())?;
    let fresh = match &state.cache {
        Some(c) if c.r_max() >= r_new.largest() => None,
        _ => Some(CechEnumeration::build(&state.u, r_new.largest() * CACHE_MARGIN, h.max_order())?),
    };
    let cache = fresh.as_ref().or(state.cache.as_ref()).expect("an enumeration is available");
    let induced = cache.to_nsrgh(&r_new)?;
    let counts = discrepancy_counts(&induced, h)?;
    let loglik = log_likelihood(&counts, &state.noise)?;
    let log_ratio =
        loglik - state.loglik + priors.radius_log_prior(radii) - priors.radius_log_prior(state.radii.as_slice());
    Ok(Some((
        r_new,
        Proposal {
            log_ratio,
            cache: fresh,
            induced: Induced::Full(induced),
            counts,
            loglik,
        },
    )))
}

/// Joint Gaussian random-walk update of all radii (standard deviation
/// `sigma_r`); proposals breaking positivity or strict ordering are rejected.
pub fn mh_update_radii<R: Rng + ?Sized>(state: &mut ChainState, h: &Hypergraph, priors: &Priors, sigma_r: f64, rng: &mut R) -> Result<bool> {
    let proposed: Vec<f64> = state
        .radii
        .as_slice()
        .iter()
        .map(|r| r + sigma_r * rng.sample::<f64, _>(StandardNormal))
        .collect();
    if sigma_r == 0.0 {
        return Ok(true);
    }
    let Some((r_new, p)) = radius_proposal(state, h, priors, &proposed)? else {
        return Ok(false);
    };
    if accept(p.log_ratio, rng) {
        state.radii = r_new;
        commit(state, p, false);
        Ok(true)
    } else {
        // A larger enumeration at the same U stays valid; keep it.
        if let Some(c) = p.cache {
            state.cache = Some(c);
        }
        Ok(false)
    }
}

/// `ln((1/m) Σ_j N(x; u_j, τ²I))` over the rows listed in `centres`.
fn ln_neighbour_density(u: &LatentConfiguration, centres: &[usize], x: &[f64], tau: f64) -> f64 {
    let d = x.len() as f64;
    let terms: Vec<f64> = centres
        .iter()
        .map(|&j| {
            let q: f64 = u.row(j).iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
            -0.5 * q / (tau * tau)
        })
        .collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln();
    lse - (centres.len() as f64).ln() - d * (tau * (2.0 * std::f64::consts::PI).sqrt()).ln()
}

/// Moves `node` next to a uniformly chosen member of `neighbours` (its
/// co-members in the data), `u* = u_j + τ z`. The proposal density depends
/// only on the neighbours' positions, which the move leaves unchanged, so the
/// Hastings correction is `q(u)/q(u*)` under the same mixture.
pub fn mh_jump_latent<R: Rng + ?Sized>(
    state: &mut ChainState,
    h: &Hypergraph,
    node: usize,
    neighbours: &[usize],
    tau: f64,
    rng: &mut R,
) -> Result<bool> {
    if neighbours.is_empty() || neighbours.contains(&node) || !(tau > 0.0) {
        return Ok(false);
    }
    if state.u.anchors().is_some_and(|a| a.contains(&node)) {
        return Err(Error::Argument("cannot move an anchor".into()));
    }
    let j = neighbours[rng.random_range(0..neighbours.len())];
    let rows: Vec<f64> = state
        .u
        .row(j)
        .iter()
        .map(|c| c + tau * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let correction = ln_neighbour_density(&state.u, neighbours, state.u.row(node), tau)
        - ln_neighbour_density(&state.u, neighbours, &rows, tau);
    let (u_new, mut p) = latent_proposal(state, h, &[node], &rows)?;
    p.log_ratio += correction;
    if accept(p.log_ratio, rng) {
        state.u = u_new;
        commit(state, p, true);
        Ok(true)
    } else {
        Ok(false)
    }
}
