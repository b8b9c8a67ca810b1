//! Predictive simulation for new nodes, summary statistics and motif counts.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::genmodel::{apply_modification_from, sample_hypergraph, LatentPrior, NoiseParams};
use crate::geometry::{local_sets, LatentConfiguration, RadiusSchedule};
use crate::hypercore::{degree_sequence, DegreeVector, Edge, Hypergraph};
use crate::linalg::{cholesky, sample_mvn};
use crate::par;
use crate::rng::SeedTree;

pub const MAX_MOTIF_NODES: usize = 5;

/// A small template hypergraph whose non-induced occurrences are counted.
#[derive(Debug, Clone, PartialEq)]
pub struct MotifSpec {
    pub name: String,
    n_nodes: usize,
    edges: Vec<Vec<usize>>,
    automorphisms: u64,
}

impl MotifSpec {
    pub fn new(name: &str, n_nodes: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if n_nodes > MAX_MOTIF_NODES {
            return Err(Error::Unsupported(format!(
                "motif templates have at most {MAX_MOTIF_NODES} nodes, got {n_nodes}"
            )));
        }
        let mut edges: Vec<Vec<usize>> = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e
            })
            .collect();
        edges.sort();
        edges.dedup();
        for e in &edges {
            if e.len() < 2 || e.windows(2).any(|w| w[0] == w[1]) || e.iter().any(|&v| v >= n_nodes) {
                return Err(Error::Argument(format!("invalid template edge {e:?} in motif {name}")));
            }
        }
        if edges.is_empty() {
            return Err(Error::Argument(format!("motif {name} has no edges")));
        }
        let mut covered = vec![false; n_nodes];
        edges.iter().flatten().for_each(|&v| covered[v] = true);
        if covered.contains(&false) {
            return Err(Error::Argument(format!("motif {name} has an isolated node")));
        }
        let automorphisms = count_automorphisms(n_nodes, &edges);
        Ok(Self {
            name: name.to_string(),
            n_nodes,
            edges,
            automorphisms,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn max_order(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn count_automorphisms(n: usize, edges: &[Vec<usize>]) -> u64 {
    permutations(n)
        .into_iter()
        .filter(|p| {
            edges.iter().all(|e| {
                let mut img: Vec<usize> = e.iter().map(|&v| p[v]).collect();
                img.sort_unstable();
                edges.binary_search(&img).is_ok()
            })
        })
        .count() as u64
}

/// The default motif library: stars, triangles, paths and small
/// configurations of order-3 hyperedges.
pub fn default_motifs() -> Vec<MotifSpec> {
    let t = |name: &str, n, e: &[&[usize]]| MotifSpec::new(name, n, e.iter().map(|x| x.to_vec()).collect()).expect("valid template");
    vec![
        t("triangle", 3, &[&[0, 1], &[0, 2], &[1, 2]]),
        t("star3", 4, &[&[0, 1], &[0, 2], &[0, 3]]),
        t("star4", 5, &[&[0, 1], &[0, 2], &[0, 3], &[0, 4]]),
        t("h1", 3, &[&[0, 1, 2]]),
        t("h2", 4, &[&[0, 1, 2], &[2, 3]]),
        t("h3", 4, &[&[0, 1, 2], &[1, 2, 3]]),
        t("m1", 3, &[&[0, 1], &[1, 2]]),
        t("m2", 4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]),
        t("m3", 3, &[&[0, 1], &[0, 2], &[1, 2]]),
    ]
}

/// Looks up motifs by name in the default library.
pub fn motifs_by_name(names: &[&str]) -> Result<Vec<MotifSpec>> {
    let lib = default_motifs();
    names
        .iter()
        .map(|n| {
            lib.iter()
                .find(|m| m.name == *n)
                .cloned()
                .ok_or_else(|| Error::Argument(format!("unknown motif {n}")))
        })
        .collect()
}

struct Embedder<'a> {
    h: &'a Hypergraph,
    spec: &'a MotifSpec,
    order: Vec<usize>,
    // for order[i], a template node placed earlier that shares an edge with it
    anchor: Vec<Option<usize>>,
    // edges to check once order[i] is placed (all their nodes are then placed)
    checks: Vec<Vec<usize>>,
    adj: Vec<Vec<usize>>,
}

impl Embedder<'_> {
    fn count(&self, depth: usize, image: &mut [usize; MAX_MOTIF_NODES], used: &mut [bool]) -> u64 {
        if depth == self.order.len() {
            return 1;
        }
        let t = self.order[depth];
        let all: Vec<usize>;
        let candidates: &[usize] = match self.anchor[depth] {
            Some(a) => &self.adj[image[a]],
            None => {
                all = (0..self.h.n_nodes()).collect();
                &all
            }
        };
        let mut total = 0;
        let mut buf: Vec<usize> = Vec::with_capacity(MAX_MOTIF_NODES);
        for &v in candidates {
            if used[v] {
                continue;
            }
            image[t] = v;
            let ok = self.checks[depth].iter().all(|&ei| {
                buf.clear();
                buf.extend(self.spec.edges[ei].iter().map(|&x| image[x]));
                buf.sort_unstable();
                self.h.contains(&buf)
            });
            if ok {
                used[v] = true;
                total += self.count(depth + 1, image, used);
                used[v] = false;
            }
        }
        total
    }
}

/// Number of occurrences of the template in `h`: injective node maps that
/// send every template edge onto a hyperedge of `h` (extra hyperedges among
/// the image are allowed), divided by the template's automorphisms.
pub fn count_motif(h: &Hypergraph, spec: &MotifSpec) -> Result<u64> {
    if spec.max_order() > h.max_order() {
        return Ok(0);
    }
    let n_t = spec.n_nodes;
    // breadth-first placement so each node after the first of its component
    // is drawn from the co-members of an already placed node
    let mut order = Vec::with_capacity(n_t);
    let mut anchor = Vec::with_capacity(n_t);
    let mut placed = vec![false; n_t];
    while order.len() < n_t {
        let start = (0..n_t).find(|&v| !placed[v]).expect("unplaced node");
        placed[start] = true;
        order.push(start);
        anchor.push(None);
        let mut head = order.len() - 1;
        while head < order.len() {
            let v = order[head];
            for e in &spec.edges {
                if e.contains(&v) {
                    for &w in e {
                        if !placed[w] {
                            placed[w] = true;
                            order.push(w);
                            anchor.push(Some(v));
                        }
                    }
                }
            }
            head += 1;
        }
    }
    let pos: Vec<usize> = {
        let mut p = vec![0; n_t];
        for (i, &t) in order.iter().enumerate() {
            p[t] = i;
        }
        p
    };
    let mut checks = vec![Vec::new(); n_t];
    for (ei, e) in spec.edges.iter().enumerate() {
        let last = e.iter().map(|&v| pos[v]).max().expect("non-empty edge");
        checks[last].push(ei);
    }
    let mut adj = vec![std::collections::BTreeSet::new(); h.n_nodes()];
    for e in h.iter().filter(|e| e.order() <= spec.max_order()) {
        for &a in e.nodes() {
            for &b in e.nodes() {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    let emb = Embedder {
        h,
        spec,
        order,
        anchor,
        checks,
        adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
    };
    let mut image = [0usize; MAX_MOTIF_NODES];
    let mut used = vec![false; h.n_nodes()];
    let maps = emb.count(0, &mut image, &mut used);
    debug_assert_eq!(maps % spec.automorphisms, 0);
    Ok(maps / spec.automorphisms)
}

pub const PERCENTILES: [f64; 5] = [5.0, 25.0, 50.0, 75.0, 95.0];

/// Linear-interpolation quantile of sorted data at probability `p ∈ [0, 1]`.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => 0.0,
        1 => sorted[0],
        n => {
            let x = p.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = x.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (x - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

fn percentiles(mut xs: Vec<f64>) -> [f64; 5] {
    xs.sort_by(f64::total_cmp);
    PERCENTILES.map(|p| quantile(&xs, p / 100.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryPanel {
    /// `n_k / C(N, k)` for `k = 2..=K`.
    pub densities: Vec<f64>,
    /// Percentiles of the total node degree.
    pub degree_percentiles: [f64; 5],
    /// Percentiles of the order-`k` degree, one row per order.
    pub degree_percentiles_by_order: Vec<[f64; 5]>,
    /// Percentiles of the hyperedge orders.
    pub order_percentiles: [f64; 5],
    pub motifs: Vec<(String, u64)>,
}

pub fn summarize(h: &Hypergraph, specs: &[MotifSpec]) -> Result<SummaryPanel> {
    let densities = h.orders().map(|k| h.density(k)).collect::<Result<Vec<_>>>()?;
    let deg = degree_sequence(h);
    let totals = deg.totals().into_iter().map(|x| x as f64).collect();
    let by_order = h
        .orders()
        .map(|k| percentiles(deg.column(k).into_iter().map(|x| x as f64).collect()))
        .collect();
    let orders = h.iter().map(|e| e.order() as f64).collect();
    let motifs = specs
        .iter()
        .map(|s| Ok((s.name.clone(), count_motif(h, s)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SummaryPanel {
        densities,
        degree_percentiles: percentiles(totals),
        degree_percentiles_by_order: by_order,
        order_percentiles: percentiles(orders),
        motifs,
    })
}

/// Where the new nodes are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// `N*` independent draws from `N(μ̂, Σ̂)`.
    Gaussian,
    /// `N + N*` draws, keeping the `N*` farthest from `μ̂`.
    Peripheral,
}

/// Point estimates the predictive simulation conditions on.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub u: LatentConfiguration,
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub radii: RadiusSchedule,
    pub noise: NoiseParams,
}

impl FittedModel {
    fn validate(&self, h: &Hypergraph) -> Result<()> {
        let d = self.u.dim();
        if self.u.n_nodes() != h.n_nodes() {
            return Err(Error::Dimension("fitted coordinates and data differ in node count".into()));
        }
        if self.mu.len() != d || self.sigma.nrows() != d || self.sigma.ncols() != d {
            return Err(Error::Dimension("μ̂/Σ̂ do not match the latent dimension".into()));
        }
        if self.radii.max_order() != h.max_order() || self.noise.max_order() != h.max_order() {
            return Err(Error::Dimension("radii, noise and data cover different orders".into()));
        }
        Ok(())
    }
}

/// Coordinates for `n_star` new nodes.
pub fn new_coordinates<R: Rng + ?Sized>(
    mu: &DVector<f64>,
    sigma: &DMatrix<f64>,
    n_obs: usize,
    n_star: usize,
    placement: Placement,
    rng: &mut R,
) -> Result<LatentConfiguration> {
    let d = mu.len();
    let l = cholesky(sigma)?.l();
    let draws = match placement {
        Placement::Gaussian => n_star,
        Placement::Peripheral => n_obs + n_star,
    };
    let mut pts: Vec<DVector<f64>> = (0..draws).map(|_| sample_mvn(rng, mu, &l)).collect();
    if placement == Placement::Peripheral {
        // farthest first; the stable sort keeps ties in draw order
        let mut keyed: Vec<(f64, DVector<f64>)> = pts.into_iter().map(|p| ((&p - mu).norm(), p)).collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0));
        pts = keyed.into_iter().take(n_star).map(|(_, p)| p).collect();
    }
    let coords: Vec<f64> = pts.iter().flat_map(|p| p.iter().copied()).collect();
    LatentConfiguration::new(d, coords)
}

/// One predictive replicate: `h_obs` on `N + N*` nodes together with the
/// noisy hyperedges that involve at least one new node.
pub fn predictive_hypergraph<R: Rng + ?Sized>(
    h_obs: &Hypergraph,
    model: &FittedModel,
    n_star: usize,
    placement: Placement,
    rng: &mut R,
) -> Result<Hypergraph> {
    model.validate(h_obs)?;
    let n = h_obs.n_nodes();
    let extra = new_coordinates(&model.mu, &model.sigma, n, n_star, placement, rng)?;
    let u = model.u.extended(&extra)?;
    let new_nodes: Vec<usize> = (n..n + n_star).collect();
    let sets = local_sets(&u, &new_nodes, model.radii.largest(), h_obs.max_order())?;
    let induced = sets.into_iter().enumerate().flat_map(|(i, layer)| {
        let r = model.radii.get(i + 2);
        layer.into_iter().filter(move |(_, rad)| *rad <= r).map(|(e, _)| e)
    });
    let mut base = h_obs.with_nodes(n + n_star)?;
    for e in induced {
        base.insert(e)?;
    }
    apply_modification_from(&base, &model.noise, n, rng)
}

/// Degree vectors of `n_rep` predictive replicates, one seeded stream each.
pub fn predictive_degrees(
    h_obs: &Hypergraph,
    model: &FittedModel,
    n_star: usize,
    n_rep: usize,
    placement: Placement,
    seeds: &SeedTree,
) -> Result<Vec<DegreeVector>> {
    par::map_range(n_rep, |i| {
        let mut rng = seeds.substream("predictive", i as u64);
        predictive_hypergraph(h_obs, model, n_star, placement, &mut rng).map(|h| degree_sequence(&h))
    })
    .into_iter()
    .collect()
}

/// Motif counts of one replicate: occurrences that use at least one new
/// node, and all occurrences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifReplicate {
    pub new: Vec<u64>,
    pub total: Vec<u64>,
}

/// Per-replicate motif counts. Occurrences that avoid the new nodes lie
/// entirely in `h_obs`, so the new-node share is the total minus the count
/// in `h_obs`.
pub fn predictive_motifs(
    h_obs: &Hypergraph,
    model: &FittedModel,
    n_star: usize,
    n_rep: usize,
    specs: &[MotifSpec],
    placement: Placement,
    seeds: &SeedTree,
) -> Result<Vec<MotifReplicate>> {
    let base: Vec<u64> = specs.iter().map(|s| count_motif(h_obs, s)).collect::<Result<_>>()?;
    par::map_range(n_rep, |i| {
        let mut rng = seeds.substream("predictive", i as u64);
        let h = predictive_hypergraph(h_obs, model, n_star, placement, &mut rng)?;
        let total: Vec<u64> = specs.iter().map(|s| count_motif(&h, s)).collect::<Result<_>>()?;
        Ok(MotifReplicate {
            new: total.iter().zip(&base).map(|(t, b)| t - b).collect(),
            total,
        })
    })
    .into_iter()
    .collect()
}

/// Degree vectors of hypergraphs simulated from the generative model.
pub fn prior_predictive_degrees(
    prior: &LatentPrior,
    radii: &RadiusSchedule,
    noise: &NoiseParams,
    n: usize,
    n_rep: usize,
    seeds: &SeedTree,
) -> Result<Vec<DegreeVector>> {
    par::map_range(n_rep, |i| {
        let mut rng = seeds.substream("prior-predictive", i as u64);
        sample_hypergraph(prior, radii, noise, n, &mut rng).map(|(h, _)| degree_sequence(&h))
    })
    .into_iter()
    .collect()
}

/// All order-`k` degrees of all replicates, pooled.
pub fn pooled_degrees(reps: &[DegreeVector], k: usize) -> Vec<f64> {
    reps.iter().flat_map(|d| d.column(k)).map(|x| x as f64).collect()
}

/// One row of a quantile-quantile comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqRow {
    pub prob: f64,
    pub a: f64,
    pub b: f64,
}

/// Matched quantiles of two samples at `n_points` evenly spaced
/// probabilities `(i + 1/2) / n_points`.
pub fn qq_table(a: &[f64], b: &[f64], n_points: usize) -> Vec<QqRow> {
    let sort = |x: &[f64]| {
        let mut v = x.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let (sa, sb) = (sort(a), sort(b));
    (0..n_points)
        .map(|i| {
            let p = (i as f64 + 0.5) / n_points as f64;
            QqRow {
                prob: p,
                a: quantile(&sa, p),
                b: quantile(&sb, p),
            }
        })
        .collect()
}

/// Median of `|a − b|` over a qq table.
pub fn median_qq_gap(rows: &[QqRow]) -> f64 {
    let mut gaps: Vec<f64> = rows.iter().map(|r| (r.a - r.b).abs()).collect();
    gaps.sort_by(f64::total_cmp);
    quantile(&gaps, 0.5)
}

/// Edges of `h` containing at least one node `>= first_new`.
pub fn new_edges(h: &Hypergraph, first_new: usize) -> Vec<&Edge> {
    h.iter().filter(|e| e.nodes().iter().any(|&v| v >= first_new)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete_graph(n: usize) -> Hypergraph {
        let pairs: Vec<[usize; 2]> = (0..n).flat_map(|i| (i + 1..n).map(move |j| [i, j])).collect();
        Hypergraph::from_edges(n, 3, pairs).unwrap()
    }

    #[test]
    fn triangles_in_k4() {
        let m = motifs_by_name(&["triangle"]).unwrap();
        assert_eq!(count_motif(&complete_graph(4), &m[0]).unwrap(), 4);
    }

    #[test]
    fn single_hyperedge_template() {
        let h = Hypergraph::from_edges(6, 3, [[0, 1, 2], [1, 2, 3], [3, 4, 5]]).unwrap();
        let m = motifs_by_name(&["h1"]).unwrap();
        assert_eq!(count_motif(&h, &m[0]).unwrap(), 3);
    }

    #[test]
    fn star_counts_are_binomial() {
        // star centred at 0 with 5 leaves: C(5,3) 3-stars and C(5,4) 4-stars
        let h = Hypergraph::from_edges(6, 2, (1..6).map(|j| [0, j])).unwrap();
        let m = motifs_by_name(&["star3", "star4", "m1"]).unwrap();
        assert_eq!(count_motif(&h, &m[0]).unwrap(), 10);
        assert_eq!(count_motif(&h, &m[1]).unwrap(), 5);
        assert_eq!(count_motif(&h, &m[2]).unwrap(), 10);
    }

    #[test]
    fn automorphism_counts() {
        let lib = default_motifs();
        let aut: Vec<u64> = lib.iter().map(|m| m.automorphisms).collect();
        // triangle, star3, star4, h1, h2, h3, m1, m2, m3
        assert_eq!(aut, vec![6, 6, 24, 6, 2, 4, 2, 8, 6]);
    }

    #[test]
    fn oversized_template_is_unsupported() {
        let e = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5]];
        assert!(matches!(MotifSpec::new("big", 6, e), Err(Error::Unsupported(_))));
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert!((quantile(&v, 0.5) - 2.5).abs() < 1e-15);
        assert_eq!(quantile(&[], 0.3), 0.0);
    }

    #[test]
    fn empty_summary() {
        let h = Hypergraph::empty(5, 3).unwrap();
        let s = summarize(&h, &default_motifs()).unwrap();
        assert_eq!(s.densities, vec![0.0, 0.0]);
        assert_eq!(s.degree_percentiles, [0.0; 5]);
        assert!(s.motifs.iter().all(|(_, c)| *c == 0));
        let full = summarize(&complete_graph(5), &[]).unwrap();
        assert_eq!(full.densities[0], 1.0);
    }
}
