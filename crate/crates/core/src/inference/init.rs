use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::genmodel::{apply_modification, NoiseParams};
use crate::geometry::{build_nsrgh_limited, miniball, LatentConfiguration, RadiusSchedule};
use crate::hypercore::{degree_sequence, Hypergraph};
use crate::linalg::{cholesky, sample_mvn};
use crate::par;
use crate::rng::SeedTree;
use crate::shape::bookstein;

use super::gibbs::{sample_inverse_wishart, sample_truncated_beta};
use super::priors::Priors;

/// Weighted adjacency: `λ` for node pairs sharing a hyperedge of order > 2,
/// `1` for pairs joined only by an order-2 edge, `∞` otherwise.
fn weighted_adjacency(h: &Hypergraph, weight: f64) -> DMatrix<f64> {
    let n = h.n_nodes();
    let mut a = DMatrix::from_element(n, n, f64::INFINITY);
    for e in h.edges_of_order(2) {
        let (i, j) = (e.nodes()[0], e.nodes()[1]);
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    for k in 3..=h.max_order() {
        for e in h.edges_of_order(k) {
            let v = e.nodes();
            for x in 0..v.len() {
                for y in x + 1..v.len() {
                    a[(v[x], v[y])] = weight;
                    a[(v[y], v[x])] = weight;
                }
            }
        }
    }
    for i in 0..n {
        a[(i, i)] = 0.0;
    }
    a
}

/// All-pairs shortest paths (Floyd–Warshall); unreachable pairs get the
/// largest finite distance plus one.
pub fn shortest_paths(h: &Hypergraph, weight: f64) -> DMatrix<f64> {
    let n = h.n_nodes();
    let mut d = weighted_adjacency(h, weight);
    for k in 0..n {
        for i in 0..n {
            let dik = d[(i, k)];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[(k, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    let max_finite = d.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
    d.apply(|x| {
        if x.is_infinite() {
            *x = max_finite + 1.0;
        }
    });
    d
}

/// Classical MDS: top-`d` eigenpairs of the double-centred squared distances,
/// negative eigenvalues clamped to zero.
pub fn classical_mds(dist: &DMatrix<f64>, d: usize) -> Result<DMatrix<f64>> {
    let n = dist.nrows();
    if d > n {
        return Err(Error::Argument(format!("cannot embed {n} points in {d} dimensions")));
    }
    let sq = dist.map(|x| x * x);
    let row_means = DVector::from_fn(n, |i, _| sq.row(i).mean());
    let grand = sq.mean();
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]).then(x.cmp(&y)));
    let mut x = DMatrix::zeros(n, d);
    for (c, &idx) in order.iter().take(d).enumerate() {
        let s = eig.eigenvalues[idx].max(0.0).sqrt();
        let v = eig.eigenvectors.column(idx);
        // fix the eigenvector sign so the embedding is deterministic
        let pivot = v.iter().copied().fold(0.0f64, |m, z| if z.abs() > m.abs() { z } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            x[(i, c)] = sign * s * v[i];
        }
    }
    Ok(x)
}

/// Nodes ordered by decreasing total degree, ties by index.
fn degree_order(h: &Hypergraph) -> Vec<usize> {
    let deg = degree_sequence(h).totals();
    let mut idx: Vec<usize> = (0..h.n_nodes()).collect();
    idx.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    idx
}

/// Registers `u0` on the requested anchors, or, when none are given, on the
/// highest-degree nodes that are not degenerate (coincident or collinear).
fn register(u0: &LatentConfiguration, h: &Hypergraph, anchors: Option<&[usize]>) -> Result<LatentConfiguration> {
    let d = u0.dim();
    if let Some(a) = anchors {
        return Ok(bookstein(u0, a)?.0);
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(d);
    for c in degree_order(h) {
        chosen.push(c);
        let ok = match chosen.len() {
            1 => true,
            2 => {
                let (p, q) = (u0.row(chosen[0]), u0.row(chosen[1]));
                p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>() > 1e-18
            }
            _ => bookstein(u0, &chosen).is_ok(),
        };
        if !ok {
            chosen.pop();
        } else if chosen.len() == d {
            return Ok(bookstein(u0, &chosen)?.0);
        }
    }
    Err(Error::DegenerateAnchor("no non-degenerate anchor set found".into()))
}

/// GMDS initial coordinates in Bookstein form.
pub fn init_latents_gmds(h: &Hypergraph, weight: f64, d: usize, anchors: Option<&[usize]>) -> Result<LatentConfiguration> {
    if d != 2 && d != 3 {
        return Err(Error::Unsupported(format!("latent dimension {d}")));
    }
    if h.is_empty() {
        return Err(Error::Argument("cannot initialise from an empty hypergraph".into()));
    }
    if !(weight > 0.0) {
        return Err(Error::Parameter("GMDS weight must be positive".into()));
    }
    let x = classical_mds(&shortest_paths(h, weight), d)?;
    let u0 = LatentConfiguration::from_matrix(&x)?;
    register(&u0, h, anchors)
}

/// Smallest radii inducing every observed hyperedge given `u`, made strictly
/// increasing. Orders without observed edges inherit a radius just above the
/// previous order.
pub fn init_radii(h: &Hypergraph, u: &LatentConfiguration) -> Result<RadiusSchedule> {
    let mut radii = Vec::with_capacity(h.max_order() - 1);
    for k in h.orders() {
        let needed = h
            .edges_of_order(k)
            .iter()
            .map(|e| {
                let pts: Vec<&[f64]> = e.nodes().iter().map(|&i| u.row(i)).collect();
                miniball(&pts).map(|b| b.radius)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let prev: Option<f64> = radii.last().copied();
        let r = match prev {
            None if needed > 0.0 => needed,
            None => 0.05,
            Some(p) if needed > p => needed,
            Some(p) => p * 1.05,
        };
        radii.push(r);
    }
    RadiusSchedule::new(radii)
}

/// Noise parameters drawn from their (capped) priors.
pub fn init_noise<R: Rng + ?Sized>(priors: &Priors, caps: Option<&[f64]>, rng: &mut R) -> Result<NoiseParams> {
    let n = priors.max_order() - 1;
    let cap = |k: usize| caps.map_or(1.0, |c| c[k - 2]);
    let mut p0 = Vec::with_capacity(n);
    let mut p1 = Vec::with_capacity(n);
    for k in 2..=priors.max_order() {
        let (a, b) = priors.noise.beta0(k);
        p0.push(sample_truncated_beta(a, b, cap(k), rng)?);
        if !priors.noise.is_symmetric() {
            let (a, b) = priors.noise.beta1(k);
            p1.push(sample_truncated_beta(a, b, cap(k), rng)?);
        }
    }
    let noise = if priors.noise.is_symmetric() {
        NoiseParams::symmetric(p0)?
    } else {
        NoiseParams::asymmetric(p0, p1)?
    };
    match caps {
        Some(c) => noise.with_caps(c.to_vec()),
        None => Ok(noise),
    }
}

/// `(#order-2 edges, #order-3 edges, #triangles among order-2 edges)`.
pub fn abc_summary(h: &Hypergraph) -> [f64; 3] {
    let n = h.n_nodes();
    let mut adj = vec![Vec::new(); n];
    for e in h.edges_of_order(2) {
        adj[e.nodes()[0]].push(e.nodes()[1]);
    }
    let mut triangles = 0usize;
    for e in h.edges_of_order(2) {
        let (i, j) = (e.nodes()[0], e.nodes()[1]);
        // adj lists hold larger neighbours in sorted order
        triangles += adj[j].iter().filter(|w| adj[i].binary_search(w).is_ok()).count();
    }
    let three = if h.max_order() >= 3 { h.n_edges_of_order(3) } else { 0 };
    [h.n_edges_of_order(2) as f64, three as f64, triangles as f64]
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbcConfig {
    pub samples: usize,
    pub epsilon: f64,
    pub max_attempts: usize,
}

impl Default for AbcConfig {
    fn default() -> Self {
        Self {
            samples: 20,
            epsilon: f64::INFINITY,
            max_attempts: 20_000,
        }
    }
}

// Proposals are simulated in batches of this size; acceptance is decided in
// index order so the result does not depend on the thread count.
const ABC_BATCH: usize = 256;

/// Rejection ABC for `(μ₀, Σ₀)`: accepts prior draws whose simulated
/// hypergraph has summary within `ε` (ℓ₁) of the data's, and returns the
/// averages of the first `samples` accepted draws.
pub fn init_abc<R: RngCore + ?Sized>(
    h: &Hypergraph,
    priors: &Priors,
    radii: &RadiusSchedule,
    noise: &NoiseParams,
    cfg: &AbcConfig,
    rng: &mut R,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if !(cfg.epsilon >= 0.0) || cfg.samples == 0 {
        return Err(Error::Parameter("ABC needs ε ≥ 0 and at least one sample".into()));
    }
    let target = abc_summary(h);
    let tree = SeedTree::new(rng.next_u64());
    let l_mu = cholesky(&priors.mu_cov)?.l();
    let d = priors.dim();
    let n = h.n_nodes();
    let limit = radii.max_order().max(crate::geometry::DEFAULT_MAX_ORDER);
    let attempt = |j: usize| -> Result<Option<(DVector<f64>, DMatrix<f64>)>> {
        let mut r = tree.substream("abc", j as u64);
        let mu = sample_mvn(&mut r, &priors.mu_mean, &l_mu);
        let sigma = sample_inverse_wishart(&priors.sigma_scale, priors.sigma_dof, &mut r)?;
        let l = match cholesky(&sigma) {
            Ok(c) => c.l(),
            Err(_) => return Ok(None),
        };
        let coords: Vec<f64> = (0..n).flat_map(|_| sample_mvn(&mut r, &mu, &l).iter().copied().collect::<Vec<_>>()).collect();
        let u = LatentConfiguration::new(d, coords)?;
        let g = build_nsrgh_limited(&u, radii, limit)?;
        let g = apply_modification(&g, noise, &mut r)?;
        let s = abc_summary(&g);
        let dist: f64 = s.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum();
        Ok((dist <= cfg.epsilon).then_some((mu, sigma)))
    };
    let mut accepted: Vec<(DVector<f64>, DMatrix<f64>)> = Vec::with_capacity(cfg.samples);
    let mut tried = 0;
    while accepted.len() < cfg.samples && tried < cfg.max_attempts {
        let batch = ABC_BATCH.min(cfg.max_attempts - tried);
        let results = par::map_range(batch, |j| attempt(tried + j));
        tried += batch;
        for r in results {
            if let Some(x) = r? {
                if accepted.len() < cfg.samples {
                    accepted.push(x);
                }
            }
        }
    }
    if accepted.len() < cfg.samples {
        return Err(Error::AbcAcceptance {
            accepted: accepted.len(),
            attempts: tried,
        });
    }
    let m = accepted.len() as f64;
    let mu = accepted.iter().fold(DVector::zeros(d), |a, (x, _)| a + x) / m;
    let sigma = accepted.iter().fold(DMatrix::zeros(d, d), |a, (_, s)| a + s) / m;
    Ok((mu, sigma))
}
