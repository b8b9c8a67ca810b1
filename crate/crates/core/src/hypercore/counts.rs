use std::cmp::Ordering;

use super::hypergraph::{binomial, Edge, Hypergraph};
use crate::error::{Error, Result};

/// Cross-tabulation of one order between an induced hypergraph `g` and an
/// observed hypergraph `h`: `dab` counts hyperedges with state `a` in `g` and
/// state `b` in `h`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OrderCounts {
    pub d11: u64,
    pub d10: u64,
    pub d01: u64,
    pub d00: u64,
}

impl OrderCounts {
    /// Number of hyperedges whose state differs.
    pub fn hamming(&self) -> u64 {
        self.d10 + self.d01
    }

    pub fn total(&self) -> u64 {
        self.d11 + self.d10 + self.d01 + self.d00
    }

    pub fn swapped(&self) -> OrderCounts {
        OrderCounts {
            d11: self.d11,
            d10: self.d01,
            d01: self.d10,
            d00: self.d00,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscrepancyCounts {
    n_nodes: usize,
    max_order: usize,
    per_order: Vec<OrderCounts>,
}

impl DiscrepancyCounts {
    /// Assembles counts directly, validating the per-order totals.
    pub fn from_parts(n_nodes: usize, per_order: Vec<OrderCounts>) -> Result<Self> {
        let max_order = per_order.len() + 1;
        for (i, c) in per_order.iter().enumerate() {
            let k = i + 2;
            if c.total() != binomial(n_nodes, k)? {
                return Err(Error::Argument(format!(
                    "counts for order {k} sum to {}, expected C({n_nodes},{k})",
                    c.total()
                )));
            }
        }
        Ok(Self {
            n_nodes,
            max_order,
            per_order,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn order(&self, k: usize) -> &OrderCounts {
        &self.per_order[k - 2]
    }

    /// `(k, counts)` for `k = 2..=K`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &OrderCounts)> {
        self.per_order.iter().enumerate().map(|(i, c)| (i + 2, c))
    }

    pub fn swapped(&self) -> DiscrepancyCounts {
        DiscrepancyCounts {
            n_nodes: self.n_nodes,
            max_order: self.max_order,
            per_order: self.per_order.iter().map(OrderCounts::swapped).collect(),
        }
    }
}

fn intersection_size(a: &[Edge], b: &[Edge]) -> u64 {
    let (mut i, mut j, mut n) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Discrepancy counts between induced `g` and observed `h` from the present
/// edges only: `d11` by sorted-merge intersection, the rest by subtraction.
pub fn discrepancy_counts(g: &Hypergraph, h: &Hypergraph) -> Result<DiscrepancyCounts> {
    g.check_compatible(h)?;
    let n = g.n_nodes();
    let per_order = g
        .orders()
        .map(|k| {
            let (eg, eh) = (g.edges_of_order(k), h.edges_of_order(k));
            let d11 = intersection_size(eg, eh);
            let d10 = eg.len() as u64 - d11;
            let d01 = eh.len() as u64 - d11;
            let total = binomial(n, k)?;
            Ok(OrderCounts {
                d11,
                d10,
                d01,
                d00: total - d11 - d10 - d01,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscrepancyCounts {
        n_nodes: n,
        max_order: g.max_order(),
        per_order,
    })
}

/// Number of order-`k` hyperedges present in exactly one of `g`, `h`.
pub fn hamming_distance(g: &Hypergraph, h: &Hypergraph, k: usize) -> Result<u64> {
    g.check_compatible(h)?;
    if k < 2 || k > g.max_order() {
        return Err(Error::OrderOutOfRange {
            order: k,
            max: g.max_order(),
        });
    }
    let (eg, eh) = (g.edges_of_order(k), h.edges_of_order(k));
    let d11 = intersection_size(eg, eh);
    Ok(eg.len() as u64 + eh.len() as u64 - 2 * d11)
}
