use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::hypercore::{Edge, Hypergraph};
use crate::par;

use super::latent::{LatentConfiguration, RadiusSchedule, DEFAULT_MAX_ORDER};
use super::miniball::{miniball_radius, Point};

// Slack used when growing candidate sets so that no set with radius exactly
// at the threshold is pruned by rounding in the pairwise screen.
const GROW: f64 = 1e-9;

/// Every node set of order `2..=max_order` whose smallest enclosing ball has
/// radius at most `r_max`, together with that radius.
///
/// The enumeration is reusable for any radius schedule whose largest radius
/// does not exceed `r_max`.
#[derive(Debug, Clone)]
pub struct CechEnumeration {
    n_nodes: usize,
    r_max: f64,
    layers: Vec<Vec<(Edge, f64)>>,
}

impl CechEnumeration {
    pub fn build(u: &LatentConfiguration, r_max: f64, max_order: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max >= 0.0) {
            return Err(Error::Argument(format!("invalid enumeration radius {r_max}")));
        }
        if max_order < 2 {
            return Err(Error::Argument("max order must be at least 2".into()));
        }
        let n = u.n_nodes();
        let dim = u.dim();
        let pts: Vec<Point> = (0..n).map(|i| u.point(i)).collect();
        let cut = r_max * (1.0 + GROW);
        let pair_cut2 = (2.0 * cut) * (2.0 * cut);

        // Adjacency at the enumeration threshold; rows as sorted lists and a
        // dense bitmap for membership tests.
        let rows: Vec<Vec<usize>> = par::map_range(n, |i| {
            (i + 1..n)
                .filter(|&j| {
                    let d2: f64 = (0..3).map(|t| (pts[i][t] - pts[j][t]).powi(2)).sum();
                    d2 <= pair_cut2
                })
                .collect()
        });
        let mut adj = vec![false; n * n];
        for (i, row) in rows.iter().enumerate() {
            for &j in row {
                adj[i * n + j] = true;
                adj[j * n + i] = true;
            }
        }

        let pairs: Vec<(usize, usize)> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&j| (i, j)))
            .collect();
        let mut layers: Vec<Vec<(Edge, f64)>> = Vec::with_capacity(max_order - 1);
        layers.push(par::map_slice(&pairs, |&(i, j)| {
            let mut s = [pts[i], pts[j]];
            (Edge::from_sorted(&[i, j]), miniball_radius(&mut s, dim))
        })
        .into_iter()
        .filter(|(_, r)| *r <= cut)
        .collect());

        for _k in 3..=max_order {
            let prev = layers.last().expect("pair layer");
            let next: Vec<(Edge, f64)> = par::flat_map_slice(prev, |(sigma, _)| {
                let nodes = sigma.nodes();
                let top = *nodes.last().expect("non-empty");
                let first = nodes[0];
                let mut out = Vec::new();
                let mut buf: SmallVec<[Point; 8]> = SmallVec::new();
                for &w in rows[first].iter().filter(|&&w| w > top) {
                    if nodes[1..].iter().all(|&v| adj[v * n + w]) {
                        buf.clear();
                        buf.extend(nodes.iter().map(|&v| pts[v]));
                        buf.push(pts[w]);
                        let r = miniball_radius(&mut buf, dim);
                        if r <= cut {
                            let mut tuple: SmallVec<[usize; 6]> = SmallVec::from_slice(nodes);
                            tuple.push(w);
                            out.push((Edge::from_sorted(&tuple), r));
                        }
                    }
                }
                out
            });
            layers.push(next);
        }
        Ok(Self { n_nodes: n, r_max, layers })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn max_order(&self) -> usize {
        self.layers.len() + 1
    }

    /// Candidate sets of order `k` with their miniball radii.
    pub fn candidates(&self, k: usize) -> &[(Edge, f64)] {
        &self.layers[k - 2]
    }

    /// Order-`k` sets with radius at most `r`.
    pub fn layer(&self, k: usize, r: f64) -> Result<Vec<Edge>> {
        if k < 2 || k > self.max_order() {
            return Err(Error::OrderOutOfRange {
                order: k,
                max: self.max_order(),
            });
        }
        if r > self.r_max {
            return Err(Error::Argument(format!(
                "radius {r} exceeds the enumeration radius {}",
                self.r_max
            )));
        }
        Ok(self.layers[k - 2]
            .iter()
            .filter(|(_, rho)| *rho <= r)
            .map(|(e, _)| e.clone())
            .collect())
    }

    pub fn to_nsrgh(&self, radii: &RadiusSchedule) -> Result<Hypergraph> {
        let k_max = radii.max_order();
        if k_max > self.max_order() {
            return Err(Error::OrderOutOfRange {
                order: k_max,
                max: self.max_order(),
            });
        }
        let layers = (2..=k_max)
            .map(|k| self.layer(k, radii.get(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Hypergraph::from_sorted_layers(self.n_nodes, k_max, layers))
    }
}

/// Every set of order `2..=max_order` that contains at least one node of
/// `nodes` and whose miniball radius is at most `r_max`, with that radius.
/// Layers are sorted.
pub fn local_sets(u: &LatentConfiguration, nodes: &[usize], r_max: f64, max_order: usize) -> Result<Vec<Vec<(Edge, f64)>>> {
    let n = u.n_nodes();
    if nodes.iter().any(|&b| b >= n) {
        return Err(Error::Argument("node out of range".into()));
    }
    let dim = u.dim();
    let cut = r_max * (1.0 + GROW);
    let pair_cut2 = (2.0 * cut) * (2.0 * cut);
    let mut in_block = vec![false; n];
    for &b in nodes {
        in_block[b] = true;
    }
    let near = |a: usize, b: usize| {
        let (p, q) = (u.point(a), u.point(b));
        (0..3).map(|t| (p[t] - q[t]).powi(2)).sum::<f64>() <= pair_cut2
    };
    let mut layers: Vec<Vec<(Edge, f64)>> = vec![Vec::new(); max_order.saturating_sub(1)];
    let mut seen = vec![false; n];
    for &b in nodes {
        if seen[b] {
            continue;
        }
        seen[b] = true;
        // Each set is generated from its smallest block member only.
        let nbrs: Vec<usize> = (0..n).filter(|&w| w != b && !(in_block[w] && w < b) && near(b, w)).collect();
        let mut frontier: Vec<SmallVec<[usize; 6]>> = Vec::new();
        for (pos, &w) in nbrs.iter().enumerate() {
            let mut pts = [u.point(b), u.point(w)];
            let r = miniball_radius(&mut pts, dim);
            if r <= cut {
                layers[0].push((Edge::new(&[b, w])?, r));
                let mut s: SmallVec<[usize; 6]> = SmallVec::new();
                s.push(pos);
                frontier.push(s);
            }
        }
        for k in 3..=max_order {
            let mut next = Vec::new();
            for s in &frontier {
                let last = *s.last().expect("non-empty");
                for pos in last + 1..nbrs.len() {
                    let w = nbrs[pos];
                    if !s.iter().all(|&q| near(nbrs[q], w)) {
                        continue;
                    }
                    let mut pts: SmallVec<[Point; 8]> = SmallVec::new();
                    pts.push(u.point(b));
                    pts.extend(s.iter().map(|&q| u.point(nbrs[q])));
                    pts.push(u.point(w));
                    let r = miniball_radius(&mut pts, dim);
                    if r <= cut {
                        let mut members: SmallVec<[usize; 6]> = s.iter().map(|&q| nbrs[q]).collect();
                        members.push(w);
                        members.push(b);
                        layers[k - 2].push((Edge::new(&members)?, r));
                        let mut t = s.clone();
                        t.push(pos);
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
    }
    for l in &mut layers {
        l.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    }
    Ok(layers)
}

/// True when the smallest ball enclosing the rows of `nodes` has radius ≤ `r`.
pub fn hyperedge_present(u: &LatentConfiguration, nodes: &[usize], r: f64) -> Result<bool> {
    if nodes.is_empty() || nodes.iter().any(|&i| i >= u.n_nodes()) {
        return Err(Error::Argument("hyperedge nodes out of range".into()));
    }
    let mut pts: Vec<Point> = nodes.iter().map(|&i| u.point(i)).collect();
    Ok(miniball_radius(&mut pts, u.dim()) <= r)
}

/// Order-`k` simplices of the Čech complex at radius `r`.
pub fn cech_k_layer(u: &LatentConfiguration, r: f64, k: usize) -> Result<Vec<Edge>> {
    if k < 2 || k > u.n_nodes() {
        return Err(Error::OrderOutOfRange {
            order: k,
            max: u.n_nodes(),
        });
    }
    CechEnumeration::build(u, r, k)?.layer(k, r)
}

/// The non-simplicial random geometric hypergraph with the default order cap.
pub fn build_nsrgh(u: &LatentConfiguration, radii: &RadiusSchedule) -> Result<Hypergraph> {
    build_nsrgh_limited(u, radii, DEFAULT_MAX_ORDER)
}

/// The non-simplicial random geometric hypergraph, refusing `K > limit`.
pub fn build_nsrgh_limited(u: &LatentConfiguration, radii: &RadiusSchedule, limit: usize) -> Result<Hypergraph> {
    let k_max = radii.max_order();
    if k_max > limit {
        return Err(Error::Size(format!(
            "maximum order {k_max} exceeds the configured limit {limit}"
        )));
    }
    if k_max > u.n_nodes() {
        return Err(Error::OrderOutOfRange {
            order: k_max,
            max: u.n_nodes(),
        });
    }
    CechEnumeration::build(u, radii.largest(), k_max)?.to_nsrgh(radii)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn witness() -> LatentConfiguration {
        LatentConfiguration::from_rows(&[
            vec![10.0, 10.0],
            vec![0.0, 5.0],
            vec![0.0, 0.0],
            vec![1.5, 5.0],
            vec![1.8, 0.0],
            vec![2.6, 1.2],
        ])
        .unwrap()
    }

    #[test]
    fn non_simplicial_witness() {
        let u = witness();
        let radii = RadiusSchedule::new(vec![1.0, 1.5]).unwrap();
        let h = build_nsrgh(&u, &radii).unwrap();
        let two: Vec<Vec<usize>> = h.edges_of_order(2).iter().map(|e| e.nodes().to_vec()).collect();
        let three: Vec<Vec<usize>> = h.edges_of_order(3).iter().map(|e| e.nodes().to_vec()).collect();
        assert_eq!(two, vec![vec![1, 3], vec![2, 4], vec![4, 5]]);
        assert_eq!(three, vec![vec![2, 4, 5]]);
        assert!(!h.contains(&[2, 5]));
    }

    #[test]
    fn order_limit_and_range_errors() {
        let u = witness();
        let radii = RadiusSchedule::new(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert!(matches!(build_nsrgh(&u, &radii), Err(Error::Size(_))));
        assert!(cech_k_layer(&u, 1.0, 7).is_err());
        let e = CechEnumeration::build(&u, 1.0, 3).unwrap();
        assert!(e.layer(3, 2.0).is_err());
    }

    #[test]
    fn closed_ball_boundary() {
        let u = LatentConfiguration::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(cech_k_layer(&u, 0.5, 2).unwrap().len(), 1);
        assert!(hyperedge_present(&u, &[0, 1], 0.5).unwrap());
        assert!(!hyperedge_present(&u, &[0, 1], 0.49999).unwrap());
    }
}
