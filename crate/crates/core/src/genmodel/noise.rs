use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::hypercore::{binomial, Edge, Hypergraph};

/// Per-order edge-flip probabilities.
///
/// `psi0[k-2]` is the absent→present probability and `psi1[k-2]` the
/// present→absent probability for order `k`; in symmetric mode both equal φ_k.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseParams {
    symmetric: bool,
    psi0: Vec<f64>,
    psi1: Vec<f64>,
    caps: Option<Vec<f64>>,
}

fn check_probs(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Parameter(format!("{name}: no orders given")));
    }
    if let Some(p) = v.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Parameter(format!("{name}: probability {p} outside [0, 1]")));
    }
    Ok(())
}

impl NoiseParams {
    pub fn symmetric(phi: Vec<f64>) -> Result<Self> {
        check_probs("phi", &phi)?;
        Ok(Self {
            symmetric: true,
            psi0: phi.clone(),
            psi1: phi,
            caps: None,
        })
    }

    pub fn asymmetric(psi0: Vec<f64>, psi1: Vec<f64>) -> Result<Self> {
        check_probs("psi0", &psi0)?;
        check_probs("psi1", &psi1)?;
        if psi0.len() != psi1.len() {
            return Err(Error::Parameter("psi0 and psi1 cover different orders".into()));
        }
        Ok(Self {
            symmetric: false,
            psi0,
            psi1,
            caps: None,
        })
    }

    /// No noise for orders `2..=max_order`.
    pub fn zero(max_order: usize, symmetric: bool) -> Self {
        let z = vec![0.0; max_order.saturating_sub(1)];
        Self {
            symmetric,
            psi0: z.clone(),
            psi1: z,
            caps: None,
        }
    }

    pub fn with_caps(mut self, caps: Vec<f64>) -> Result<Self> {
        check_probs("caps", &caps)?;
        if caps.len() != self.psi0.len() {
            return Err(Error::Parameter("caps cover a different number of orders".into()));
        }
        for (k, &c) in caps.iter().enumerate() {
            if self.psi0[k] > c || self.psi1[k] > c {
                return Err(Error::Parameter(format!("order {} noise exceeds its cap {c}", k + 2)));
            }
        }
        self.caps = Some(caps);
        Ok(self)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn max_order(&self) -> usize {
        self.psi0.len() + 1
    }

    pub fn psi0(&self, k: usize) -> f64 {
        self.psi0[k - 2]
    }

    pub fn psi1(&self, k: usize) -> f64 {
        self.psi1[k - 2]
    }

    /// Symmetric flip probability; equals `psi0` in symmetric mode.
    pub fn phi(&self, k: usize) -> f64 {
        self.psi0[k - 2]
    }

    pub fn psi0_all(&self) -> &[f64] {
        &self.psi0
    }

    pub fn psi1_all(&self) -> &[f64] {
        &self.psi1
    }

    pub fn caps(&self) -> Option<&[f64]> {
        self.caps.as_deref()
    }

    pub fn cap(&self, k: usize) -> f64 {
        self.caps.as_ref().map_or(1.0, |c| c[k - 2])
    }

    pub(crate) fn set(&mut self, k: usize, psi0: f64, psi1: f64) {
        self.psi0[k - 2] = psi0;
        self.psi1[k - 2] = if self.symmetric { psi0 } else { psi1 };
    }
}

// Complements at most this large are enumerated outright when most of them
// will be switched on.
const DENSE_POOL_LIMIT: u64 = 1_000_000;

/// Flips every order-k indicator of `g` independently: present edges turn off
/// with probability ψ⁽¹⁾_k, absent ones turn on with probability ψ⁽⁰⁾_k.
///
/// The absent edges are never listed: the number switched on is drawn from
/// its binomial law and that many distinct absent tuples are then drawn
/// uniformly by rejection, which reproduces independent flips exactly.
pub fn apply_modification<R: Rng + ?Sized>(g: &Hypergraph, noise: &NoiseParams, rng: &mut R) -> Result<Hypergraph> {
    modify(g, noise, 0, rng)
}

/// Like [`apply_modification`], but only hyperedges containing at least one
/// node `>= first_new` are subject to noise; all others are kept as they are.
pub fn apply_modification_from<R: Rng + ?Sized>(
    g: &Hypergraph,
    noise: &NoiseParams,
    first_new: usize,
    rng: &mut R,
) -> Result<Hypergraph> {
    if first_new > g.n_nodes() {
        return Err(Error::Argument(format!("first new node {first_new} beyond {} nodes", g.n_nodes())));
    }
    modify(g, noise, first_new, rng)
}

fn is_new(e: &Edge, first_new: usize) -> bool {
    e.nodes().last().is_some_and(|&v| v >= first_new)
}

fn modify<R: Rng + ?Sized>(g: &Hypergraph, noise: &NoiseParams, first_new: usize, rng: &mut R) -> Result<Hypergraph> {
    if noise.max_order() != g.max_order() {
        return Err(Error::Dimension(format!(
            "noise covers orders up to {} but the hypergraph has max order {}",
            noise.max_order(),
            g.max_order()
        )));
    }
    let n = g.n_nodes();
    let mut out = Hypergraph::empty(n, g.max_order())?;
    for k in g.orders() {
        let present = g.edges_of_order(k);
        let p_off = noise.psi1(k);
        let p_on = noise.psi0(k);
        let mut layer: Vec<Edge> = if p_off == 0.0 {
            present.to_vec()
        } else {
            present
                .iter()
                .filter(|e| !is_new(e, first_new) || !rng.random_bool(p_off))
                .cloned()
                .collect()
        };
        if p_on > 0.0 {
            let total = binomial(n, k)? - binomial(first_new, k)?;
            let pool = total - present.iter().filter(|e| is_new(e, first_new)).count() as u64;
            let m = if p_on >= 1.0 {
                pool
            } else {
                Binomial::new(pool, p_on)
                    .map_err(|e| Error::Numeric(e.to_string()))?
                    .sample(rng)
            };
            if m > 0 {
                layer.extend(draw_absent(g, k, m, pool, total, first_new, rng)?);
            }
        }
        layer.sort_unstable();
        out.replace_layer(k, layer);
    }
    Ok(out)
}

fn draw_absent<R: Rng + ?Sized>(
    g: &Hypergraph,
    k: usize,
    m: u64,
    pool: u64,
    total: u64,
    first_new: usize,
    rng: &mut R,
) -> Result<Vec<Edge>> {
    let n = g.n_nodes();
    if total <= DENSE_POOL_LIMIT && 2 * m > pool {
        let absent: Vec<Edge> = all_k_subsets(n, k)
            .filter(|e| is_new(e, first_new) && !g.contains(e.nodes()))
            .collect();
        let picks = index::sample(rng, absent.len(), m as usize);
        return Ok(picks.into_iter().map(|i| absent[i].clone()).collect());
    }
    let mut chosen: HashSet<Edge> = HashSet::with_capacity(m as usize);
    while (chosen.len() as u64) < m {
        let mut t: SmallVec<[usize; 6]> = index::sample(rng, n, k).into_iter().collect();
        t.sort_unstable();
        let e = Edge::from_sorted(&t);
        if is_new(&e, first_new) && !g.contains(e.nodes()) {
            chosen.insert(e);
        }
    }
    Ok(chosen.into_iter().collect())
}

/// Lexicographic iterator over all k-subsets of `0..n`.
pub(crate) fn all_k_subsets(n: usize, k: usize) -> impl Iterator<Item = Edge> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let c = cur.as_mut()?;
        let out = Edge::from_sorted(c);
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}
