//! Two comparison models used in the model-depth study: a β-style model in
//! which each node carries a sociability parameter, and an extended latent
//! class model clustering hyperedges by topic and size.
//!
//! Only forward simulation is provided.

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::genmodel::all_k_subsets;
use crate::hypercore::{binomial, Edge, Hypergraph};
use crate::par;
use crate::rng::SeedTree;

/// Largest Σ_k C(N, k) the β-model sampler will enumerate.
pub const ENUMERATION_LIMIT: u64 = 100_000_000;

/// Retry budget for an LCA hyperedge that keeps coming out with < 2 members.
pub const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct BetaModelParams {
    pub beta: Vec<f64>,
    pub max_order: usize,
}

impl BetaModelParams {
    pub fn new(beta: Vec<f64>, max_order: usize) -> Result<Self> {
        if let Some(b) = beta.iter().find(|b| b.is_nan() || **b == f64::INFINITY) {
            return Err(Error::Parameter(format!("beta entry {b} is not allowed")));
        }
        if max_order < 2 || max_order > beta.len() {
            return Err(Error::Argument(format!(
                "max order {max_order} must lie in 2..={}",
                beta.len()
            )));
        }
        Ok(Self { beta, max_order })
    }

    pub fn n_nodes(&self) -> usize {
        self.beta.len()
    }

    /// Number of candidate hyperedges, checked against [`ENUMERATION_LIMIT`].
    pub fn candidate_count(&self) -> Result<u64> {
        let mut total: u64 = 0;
        for k in 2..=self.max_order {
            total = total
                .checked_add(binomial(self.n_nodes(), k)?)
                .ok_or_else(|| Error::Size("candidate count overflows".into()))?;
        }
        if total > ENUMERATION_LIMIT {
            return Err(Error::Size(format!(
                "{total} candidate hyperedges exceed the enumeration limit {ENUMERATION_LIMIT}"
            )));
        }
        Ok(total)
    }

    /// Inclusion probability of the hyperedge `nodes`.
    pub fn probability(&self, nodes: &[usize]) -> f64 {
        logistic(nodes.iter().map(|&i| self.beta[i]).sum())
    }
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Every hyperedge of order 2..=K is included independently with probability
/// logistic(Σ β_i).
pub fn sample_beta_model<R: Rng + ?Sized>(params: &BetaModelParams, rng: &mut R) -> Result<Hypergraph> {
    params.candidate_count()?;
    let n = params.n_nodes();
    let layers: Vec<Vec<Edge>> = (2..=params.max_order)
        .map(|k| {
            all_k_subsets(n, k)
                .filter(|e| rng.random::<f64>() < params.probability(e.nodes()))
                .collect()
        })
        .collect();
    Ok(Hypergraph::from_sorted_layers(n, params.max_order, layers))
}

/// Independent replicates, one substream each.
pub fn beta_model_replicates(params: &BetaModelParams, n_rep: usize, seeds: &SeedTree) -> Result<Vec<Hypergraph>> {
    params.candidate_count()?;
    par::map_range(n_rep, |i| sample_beta_model(params, &mut seeds.substream("beta", i as u64)))
        .into_iter()
        .collect()
}

/// Extended latent class model with `T` topic and `S` size clusters.
///
/// `phi` is stored row-major, `phi[i * T + t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcaModelParams {
    n_nodes: usize,
    alpha: Vec<f64>,
    phi: Vec<f64>,
    pi: Vec<f64>,
    tau: Vec<f64>,
    pub n_edges: usize,
}

fn check_simplex(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Parameter(format!("{name} is empty")));
    }
    if v.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Parameter(format!("{name} has an entry outside [0, 1]")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!("{name} sums to {s}, not 1")));
    }
    Ok(())
}

impl LcaModelParams {
    pub fn new(n_nodes: usize, alpha: Vec<f64>, phi: Vec<f64>, pi: Vec<f64>, tau: Vec<f64>, n_edges: usize) -> Result<Self> {
        check_simplex("pi", &pi)?;
        check_simplex("tau", &tau)?;
        if alpha.len() != tau.len() {
            return Err(Error::Dimension(format!("alpha has {} entries, tau {}", alpha.len(), tau.len())));
        }
        if alpha.last() != Some(&1.0) {
            return Err(Error::Parameter("the last size weight alpha_S must be 1".into()));
        }
        if phi.len() != n_nodes * pi.len() {
            return Err(Error::Dimension(format!(
                "phi has {} entries, expected {} x {}",
                phi.len(),
                n_nodes,
                pi.len()
            )));
        }
        if n_nodes < 2 {
            return Err(Error::Argument("need at least two nodes".into()));
        }
        for &a in &alpha {
            for &p in &phi {
                let q = a * p;
                if !(0.0..=1.0).contains(&q) {
                    return Err(Error::Parameter(format!("alpha*phi = {q} outside [0, 1]")));
                }
            }
        }
        Ok(Self {
            n_nodes,
            alpha,
            phi,
            pi,
            tau,
            n_edges,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_topics(&self) -> usize {
        self.pi.len()
    }

    pub fn n_sizes(&self) -> usize {
        self.tau.len()
    }

    pub fn phi(&self, i: usize, t: usize) -> f64 {
        self.phi[i * self.n_topics() + t]
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Expected member count of a hyperedge with labels (t, s), before redraws.
    pub fn expected_size(&self, t: usize, s: usize) -> f64 {
        (0..self.n_nodes).map(|i| self.alpha[s] * self.phi(i, t)).sum()
    }
}

/// One LCA draw: the membership lists (x_ij), the labels (z⁽¹⁾, z⁽²⁾), and the
/// hypergraph they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct LcaSample {
    pub members: Vec<Vec<usize>>,
    pub topics: Vec<usize>,
    pub sizes: Vec<usize>,
    /// Member count of every draw in order, including the ones discarded for
    /// having fewer than two members.
    pub raw_sizes: Vec<usize>,
    /// Repeated member sets collapse to one hyperedge here; `max_order` is the
    /// largest hyperedge drawn.
    pub hypergraph: Hypergraph,
}

pub fn sample_lca_model<R: Rng + ?Sized>(params: &LcaModelParams, rng: &mut R) -> Result<LcaSample> {
    let topic_dist = WeightedIndex::new(&params.pi).map_err(|e| Error::Parameter(format!("pi: {e}")))?;
    let size_dist = WeightedIndex::new(&params.tau).map_err(|e| Error::Parameter(format!("tau: {e}")))?;
    let m = params.n_edges;
    let mut out = LcaSample {
        members: Vec::with_capacity(m),
        topics: Vec::with_capacity(m),
        sizes: Vec::with_capacity(m),
        raw_sizes: Vec::with_capacity(m),
        hypergraph: Hypergraph::empty(params.n_nodes, 2)?,
    };
    for _ in 0..m {
        let mut tries = 0;
        loop {
            let t = topic_dist.sample(rng);
            let s = size_dist.sample(rng);
            let a = params.alpha[s];
            let x: Vec<usize> = (0..params.n_nodes)
                .filter(|&i| rng.random::<f64>() < a * params.phi(i, t))
                .collect();
            out.raw_sizes.push(x.len());
            if x.len() >= 2 {
                out.members.push(x);
                out.topics.push(t);
                out.sizes.push(s);
                break;
            }
            tries += 1;
            if tries >= MAX_REDRAWS {
                return Err(Error::Parameter(format!(
                    "{MAX_REDRAWS} consecutive draws produced fewer than two members; \
                     membership probabilities are too small"
                )));
            }
        }
    }
    let k = out.members.iter().map(Vec::len).max().unwrap_or(2);
    out.hypergraph = Hypergraph::from_edges(params.n_nodes, k, &out.members)?;
    Ok(out)
}

pub fn lca_replicates(params: &LcaModelParams, n_rep: usize, seeds: &SeedTree) -> Result<Vec<LcaSample>> {
    par::map_range(n_rep, |i| sample_lca_model(params, &mut seeds.substream("lca", i as u64)))
        .into_iter()
        .collect()
}

/// β-model cases of the model-depth study. Case 1: all β_i = −1.4. Case 2: β
/// evenly spaced from −0.5 down to −2.
pub fn beta_case(case: usize, n: usize, max_order: usize) -> Result<BetaModelParams> {
    let beta = match case {
        1 => vec![-1.4; n],
        2 if n >= 2 => (0..n).map(|i| -0.5 - 1.5 * i as f64 / (n - 1) as f64).collect(),
        2 => vec![-0.5; n],
        _ => return Err(Error::Argument(format!("no beta-model case {case}"))),
    };
    BetaModelParams::new(beta, max_order)
}

/// Node blocks 𝒜, ℬ, 𝒞 as consecutive index ranges of the given sizes.
fn block_of(i: usize, blocks: [usize; 3]) -> usize {
    if i < blocks[0] {
        0
    } else if i < blocks[0] + blocks[1] {
        1
    } else {
        2
    }
}

/// Near-equal split of `n` nodes into three blocks, the first ones larger.
pub fn default_blocks(n: usize) -> [usize; 3] {
    let b = n / 3;
    let r = n % 3;
    [b + usize::from(r > 0), b + usize::from(r > 1), b]
}

/// LCA cases of the model-depth study.
///
/// 1: one cluster, φ = 0.075. 2: three distinct topics on blocks 𝒜, ℬ, 𝒞,
/// φ = 0.25. 3: three size clusters α = (0.2, 0.5, 1), φ = 0.15. 4: two fuzzy
/// topics, 𝒞 shared, α = (0.4, 1, 1).
pub fn lca_case(case: usize, n: usize, blocks: [usize; 3], n_edges: usize) -> Result<LcaModelParams> {
    if blocks.iter().sum::<usize>() != n {
        return Err(Error::Argument(format!("block sizes {blocks:?} do not sum to {n}")));
    }
    let third = 1.0 / 3.0;
    match case {
        1 => LcaModelParams::new(n, vec![1.0], vec![0.075; n], vec![1.0], vec![1.0], n_edges),
        2 => {
            let mut phi = vec![0.0; n * 3];
            for i in 0..n {
                phi[i * 3 + block_of(i, blocks)] = 0.25;
            }
            LcaModelParams::new(n, vec![1.0], phi, vec![third; 3], vec![1.0], n_edges)
        }
        3 => LcaModelParams::new(n, vec![0.2, 0.5, 1.0], vec![0.15; n], vec![1.0], vec![third; 3], n_edges),
        4 => {
            let mut phi = vec![0.0; n * 2];
            for i in 0..n {
                match block_of(i, blocks) {
                    0 => phi[i * 2] = 0.3,
                    1 => phi[i * 2 + 1] = 0.3,
                    _ => {
                        phi[i * 2] = 0.2;
                        phi[i * 2 + 1] = 0.2;
                    }
                }
            }
            LcaModelParams::new(n, vec![0.4, 1.0, 1.0], phi, vec![0.5, 0.5], vec![third; 3], n_edges)
        }
        _ => Err(Error::Argument(format!("no LCA case {case}"))),
    }
}
