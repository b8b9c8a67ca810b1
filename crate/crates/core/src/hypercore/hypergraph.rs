use std::cmp::Ordering;
use std::collections::BTreeSet;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A hyperedge: strictly increasing node indices.
///
/// Ordering is by `(order, tuple)` so that a sorted collection of edges iterates
/// order by order, lexicographically within an order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge(SmallVec<[usize; 6]>);

impl Edge {
    /// Builds an edge from indices in any order. Repeated indices are rejected.
    pub fn new(nodes: &[usize]) -> Result<Self> {
        let mut v: SmallVec<[usize; 6]> = nodes.iter().copied().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Argument(format!("repeated node in hyperedge {nodes:?}")));
        }
        Ok(Edge(v))
    }

    /// Caller guarantees `nodes` is strictly increasing.
    pub(crate) fn from_sorted(nodes: &[usize]) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        Edge(nodes.iter().copied().collect())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, node: usize) -> bool {
        self.0.binary_search(&node).is_ok()
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `C(n, k)` in overflow-checked arithmetic.
pub fn binomial(n: usize, k: usize) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::Size(format!("C({n},{k}) overflows")))?
            / (i as u128 + 1);
    }
    u64::try_from(acc).map_err(|_| Error::Size(format!("C({n},{k}) exceeds 64 bits")))
}

/// Hypergraph on `n_nodes` nodes with hyperedges of order `2..=max_order`.
///
/// Edges live in one sorted, duplicate-free vector per order, so iteration is
/// deterministic and set operations are linear merges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n_nodes: usize,
    max_order: usize,
    layers: Vec<Vec<Edge>>,
}

impl Hypergraph {
    pub fn empty(n_nodes: usize, max_order: usize) -> Result<Self> {
        if max_order < 2 {
            return Err(Error::Argument(format!("max order {max_order} < 2")));
        }
        if max_order > n_nodes {
            return Err(Error::Argument(format!(
                "max order {max_order} exceeds node count {n_nodes}"
            )));
        }
        Ok(Self {
            n_nodes,
            max_order,
            layers: vec![Vec::new(); max_order - 1],
        })
    }

    /// Strict constructor: every edge must be valid; duplicates are collapsed.
    pub fn from_edges<I, E>(n_nodes: usize, max_order: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        let mut h = Self::empty(n_nodes, max_order)?;
        let mut sets: Vec<BTreeSet<Edge>> = vec![BTreeSet::new(); max_order - 1];
        for e in edges {
            let e = Edge::new(e.as_ref())?;
            h.check_edge(&e)?;
            sets[e.order() - 2].insert(e);
        }
        h.layers = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(h)
    }

    /// Builds from per-order vectors that are already sorted and unique.
    pub(crate) fn from_sorted_layers(n_nodes: usize, max_order: usize, layers: Vec<Vec<Edge>>) -> Self {
        debug_assert_eq!(layers.len(), max_order - 1);
        debug_assert!(layers.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        Self {
            n_nodes,
            max_order,
            layers,
        }
    }

    fn check_edge(&self, e: &Edge) -> Result<()> {
        let k = e.order();
        if k < 2 || k > self.max_order {
            return Err(Error::OrderOutOfRange {
                order: k,
                max: self.max_order,
            });
        }
        if let Some(&last) = e.nodes().last() {
            if last >= self.n_nodes {
                return Err(Error::Argument(format!(
                    "node {last} out of range for {} nodes",
                    self.n_nodes
                )));
            }
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn orders(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.max_order
    }

    /// Edges of exactly order `k`, sorted.
    pub fn edges_of_order(&self, k: usize) -> &[Edge] {
        if k < 2 || k > self.max_order {
            return &[];
        }
        &self.layers[k - 2]
    }

    pub fn n_edges_of_order(&self, k: usize) -> usize {
        self.edges_of_order(k).len()
    }

    pub fn n_edges(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.n_edges() == 0
    }

    /// All edges in `(order, tuple)` order.
    pub fn iter(&self) -> impl Iterator<Item = &Edge> {
        self.layers.iter().flatten()
    }

    pub fn contains(&self, nodes: &[usize]) -> bool {
        let k = nodes.len();
        if k < 2 || k > self.max_order {
            return false;
        }
        self.layers[k - 2]
            .binary_search_by(|e| e.nodes().cmp(nodes))
            .is_ok()
    }

    /// Inserts an edge; returns `false` if it was already present.
    pub fn insert(&mut self, e: Edge) -> Result<bool> {
        self.check_edge(&e)?;
        let layer = &mut self.layers[e.order() - 2];
        match layer.binary_search(&e) {
            Ok(_) => Ok(false),
            Err(pos) => {
                layer.insert(pos, e);
                Ok(true)
            }
        }
    }

    /// Fraction of the `C(N, k)` possible order-`k` hyperedges that are present.
    pub fn density(&self, k: usize) -> Result<f64> {
        let total = binomial(self.n_nodes, k)?;
        if total == 0 {
            return Ok(0.0);
        }
        Ok(self.n_edges_of_order(k) as f64 / total as f64)
    }

    /// Set union; both operands must share `N` and `K`.
    pub fn union(&self, other: &Hypergraph) -> Result<Hypergraph> {
        self.check_compatible(other)?;
        let layers = self
            .layers
            .iter()
            .zip(&other.layers)
            .map(|(a, b)| merge_union(a, b))
            .collect();
        Ok(Self::from_sorted_layers(self.n_nodes, self.max_order, layers))
    }

    /// Same edges on a larger node set.
    pub fn with_nodes(&self, n_nodes: usize) -> Result<Hypergraph> {
        if n_nodes < self.n_nodes {
            return Err(Error::Argument(format!(
                "cannot shrink node set from {} to {n_nodes}",
                self.n_nodes
            )));
        }
        Ok(Self {
            n_nodes,
            max_order: self.max_order,
            layers: self.layers.clone(),
        })
    }

    pub(crate) fn check_compatible(&self, other: &Hypergraph) -> Result<()> {
        if self.n_nodes != other.n_nodes || self.max_order != other.max_order {
            return Err(Error::Dimension(format!(
                "hypergraphs differ: (N={}, K={}) vs (N={}, K={})",
                self.n_nodes, self.max_order, other.n_nodes, other.max_order
            )));
        }
        Ok(())
    }

    /// Replaces the order-`k` layer with a sorted, duplicate-free vector.
    pub(crate) fn replace_layer(&mut self, k: usize, layer: Vec<Edge>) {
        debug_assert!(layer.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(layer.iter().all(|e| e.order() == k));
        self.layers[k - 2] = layer;
    }
}

fn merge_union(a: &[Edge], b: &[Edge]) -> Vec<Edge> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Per-node, per-order degree counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeVector {
    max_order: usize,
    // deg[i][k - 2]
    deg: Vec<Vec<usize>>,
}

impl DegreeVector {
    pub fn n_nodes(&self) -> usize {
        self.deg.len()
    }

    /// Number of order-`k` hyperedges containing node `i`.
    pub fn order(&self, i: usize, k: usize) -> usize {
        if k < 2 || k > self.max_order {
            return 0;
        }
        self.deg[i][k - 2]
    }

    pub fn total(&self, i: usize) -> usize {
        self.deg[i].iter().sum()
    }

    /// Degrees of all nodes for order `k`.
    pub fn column(&self, k: usize) -> Vec<usize> {
        (0..self.deg.len()).map(|i| self.order(i, k)).collect()
    }

    pub fn totals(&self) -> Vec<usize> {
        (0..self.deg.len()).map(|i| self.total(i)).collect()
    }
}

pub fn degree_sequence(h: &Hypergraph) -> DegreeVector {
    let mut deg = vec![vec![0usize; h.max_order - 1]; h.n_nodes];
    for e in h.iter() {
        for &i in e.nodes() {
            deg[i][e.order() - 2] += 1;
        }
    }
    DegreeVector {
        max_order: h.max_order,
        deg,
    }
}

/// Clique expansion: `{i, j}` is present iff some hyperedge contains both.
pub fn project_to_graph(h: &Hypergraph) -> Result<Hypergraph> {
    let mut pairs = BTreeSet::new();
    for e in h.iter() {
        let v = e.nodes();
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                pairs.insert(Edge::from_sorted(&[v[a], v[b]]));
            }
        }
    }
    let mut out = Hypergraph::empty(h.n_nodes, 2)?;
    out.layers[0] = pairs.into_iter().collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values_and_overflow() {
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(50, 3).unwrap(), 19600);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert_eq!(binomial(10, 0).unwrap(), 1);
        assert!(binomial(200, 100).is_err());
    }

    #[test]
    fn constructor_validates() {
        assert!(Hypergraph::from_edges(3, 2, [[0usize, 3]]).is_err());
        assert!(Hypergraph::from_edges(3, 2, [vec![0usize, 1, 2]]).is_err());
        assert!(Hypergraph::from_edges(3, 3, [vec![0usize]]).is_err());
        assert!(Hypergraph::from_edges(3, 3, [vec![1usize, 1]]).is_err());
        assert!(Hypergraph::empty(3, 4).is_err());
        let h = Hypergraph::from_edges(4, 3, [vec![1usize, 0], vec![0, 1], vec![2, 1, 3]]).unwrap();
        assert_eq!(h.n_edges(), 2);
        assert!(h.contains(&[0, 1]));
        assert!(h.contains(&[1, 2, 3]));
        assert!(!h.contains(&[0, 2]));
    }

    #[test]
    fn iteration_is_order_then_lexicographic() {
        let h = Hypergraph::from_edges(5, 3, [vec![2usize, 3, 4], vec![3, 4], vec![0, 1, 2], vec![0, 4]]).unwrap();
        let got: Vec<Vec<usize>> = h.iter().map(|e| e.nodes().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 4], vec![3, 4], vec![0, 1, 2], vec![2, 3, 4]]);
    }

    #[test]
    fn degrees_of_empty_and_small() {
        let h = Hypergraph::empty(5, 3).unwrap();
        let d = degree_sequence(&h);
        assert!((0..5).all(|i| d.total(i) == 0));

        let h = Hypergraph::from_edges(3, 3, [vec![0usize, 1], vec![0, 1, 2]]).unwrap();
        let d = degree_sequence(&h);
        assert_eq!(d.totals(), vec![2, 2, 1]);
        assert_eq!(d.order(0, 2), 1);
        assert_eq!(d.order(2, 3), 1);
    }

    #[test]
    fn projection_examples() {
        let h = Hypergraph::from_edges(3, 3, [vec![0usize, 1, 2]]).unwrap();
        let p = project_to_graph(&h).unwrap();
        let pairs: Vec<Vec<usize>> = p.iter().map(|e| e.nodes().to_vec()).collect();
        assert_eq!(pairs, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);

        let h = Hypergraph::from_edges(3, 2, [vec![0usize, 1]]).unwrap();
        assert_eq!(project_to_graph(&h).unwrap().n_edges(), 1);

        // {0,1} and {0,1,2} project onto the complete graph on three nodes
        let h = Hypergraph::from_edges(3, 3, [vec![0usize, 1], vec![0, 1, 2]]).unwrap();
        assert_eq!(project_to_graph(&h).unwrap().n_edges(), 3);
    }

    #[test]
    fn union_and_insert() {
        let a = Hypergraph::from_edges(4, 3, [vec![0usize, 1], vec![1, 2, 3]]).unwrap();
        let b = Hypergraph::from_edges(4, 3, [vec![0usize, 1], vec![2, 3]]).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.n_edges(), 3);
        let mut c = a.clone();
        assert!(!c.insert(Edge::new(&[1, 0]).unwrap()).unwrap());
        assert!(c.insert(Edge::new(&[3, 0]).unwrap()).unwrap());
        assert!(c.contains(&[0, 3]));
        let other = Hypergraph::empty(5, 3).unwrap();
        assert!(a.union(&other).is_err());
    }
}
