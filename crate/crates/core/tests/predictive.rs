use std::collections::{BTreeSet, HashSet};

use lsh_core::genmodel::{sample_hypergraph, LatentPrior, NoiseParams};
use lsh_core::geometry::{LatentConfiguration, RadiusSchedule};
use lsh_core::hypercore::{binomial, degree_sequence, Hypergraph};
use lsh_core::linalg::{cholesky, sample_mvn};
use lsh_core::predictive::*;
use lsh_core::rng::SeedTree;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_hypergraph(n: usize, p2: f64, p3: f64, r: &mut impl Rng) -> Hypergraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < p2 {
                edges.push(vec![i, j]);
            }
            for k in j + 1..n {
                if r.random::<f64>() < p3 {
                    edges.push(vec![i, j, k]);
                }
            }
        }
    }
    Hypergraph::from_edges(n, 3, edges).unwrap()
}

/// Distinct copies of the template: the set of image edge sets over all
/// injective maps.
fn oracle_count(h: &Hypergraph, spec: &MotifSpec) -> u64 {
    let n = h.n_nodes();
    let t = spec.n_nodes();
    let mut copies: HashSet<BTreeSet<Vec<usize>>> = HashSet::new();
    let mut tuple = vec![0usize; t];
    fn rec(
        d: usize,
        n: usize,
        tuple: &mut Vec<usize>,
        h: &Hypergraph,
        spec: &MotifSpec,
        copies: &mut HashSet<BTreeSet<Vec<usize>>>,
    ) {
        if d == tuple.len() {
            let mut img = BTreeSet::new();
            for e in spec.edges() {
                let mut x: Vec<usize> = e.iter().map(|&v| tuple[v]).collect();
                x.sort_unstable();
                if !h.contains(&x) {
                    return;
                }
                img.insert(x);
            }
            copies.insert(img);
            return;
        }
        for v in 0..n {
            if !tuple[..d].contains(&v) {
                tuple[d] = v;
                rec(d + 1, n, tuple, h, spec, copies);
            }
        }
    }
    rec(0, n, &mut tuple, h, spec, &mut copies);
    copies.len() as u64
}

#[test]
fn motif_counts_match_exhaustive_embedding() {
    let mut r = rng(1);
    let lib = default_motifs();
    for _ in 0..40 {
        let n = r.random_range(3..=7);
        let h = random_hypergraph(n, r.random_range(0.1..0.8), r.random_range(0.0..0.5), &mut r);
        for spec in &lib {
            assert_eq!(count_motif(&h, spec).unwrap(), oracle_count(&h, spec), "{} on {h:?}", spec.name);
        }
    }
}

#[test]
fn custom_template_with_disconnected_parts() {
    // two disjoint edges: a matching of size 2
    let spec = MotifSpec::new("matching", 4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    let h = Hypergraph::from_edges(5, 2, [[0, 1], [1, 2], [3, 4]]).unwrap();
    assert_eq!(count_motif(&h, &spec).unwrap(), oracle_count(&h, &spec));
    assert_eq!(count_motif(&h, &spec).unwrap(), 2);
}

#[test]
fn summary_densities_match_edge_counts() {
    let prior = LatentPrior::gaussian(DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
    let radii = RadiusSchedule::new(vec![0.4, 0.5, 0.55]).unwrap();
    let noise = NoiseParams::symmetric(vec![0.01, 0.001, 0.0001]).unwrap();
    let (h, _) = sample_hypergraph(&prior, &radii, &noise, 30, &mut rng(2)).unwrap();
    let s = summarize(&h, &default_motifs()).unwrap();
    for k in 2..=4 {
        let direct = h.n_edges_of_order(k) as f64 / binomial(30, k).unwrap() as f64;
        assert_eq!(s.densities[k - 2], direct);
    }
    assert!(s.degree_percentiles.windows(2).all(|w| w[0] <= w[1]));
    assert!(s.order_percentiles.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(s.motifs.len(), 9);
}

fn fitted(n: usize, radii: Vec<f64>, noise: NoiseParams, seed: u64) -> (Hypergraph, FittedModel) {
    let prior = LatentPrior::gaussian(DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
    let radii = RadiusSchedule::new(radii).unwrap();
    let (h, u) = sample_hypergraph(&prior, &radii, &noise, n, &mut rng(seed)).unwrap();
    let model = FittedModel {
        u,
        mu: DVector::zeros(2),
        sigma: DMatrix::identity(2, 2),
        radii,
        noise,
    };
    (h, model)
}

#[test]
fn no_new_nodes_reproduces_observed_degrees() {
    let (h, model) = fitted(15, vec![0.4, 0.5], NoiseParams::symmetric(vec![0.05, 0.01]).unwrap(), 3);
    let reps = predictive_degrees(&h, &model, 0, 5, Placement::Gaussian, &SeedTree::new(1)).unwrap();
    for d in &reps {
        assert_eq!(d, &degree_sequence(&h));
    }
    let m = predictive_motifs(&h, &model, 0, 3, &default_motifs(), Placement::Gaussian, &SeedTree::new(1)).unwrap();
    assert!(m.iter().all(|r| r.new.iter().all(|&c| c == 0)));
}

#[test]
fn tiny_radii_leave_new_nodes_isolated() {
    let (h, mut model) = fitted(15, vec![0.4, 0.5], NoiseParams::zero(3, false), 4);
    model.radii = RadiusSchedule::new(vec![1e-9, 2e-9]).unwrap();
    let reps = predictive_degrees(&h, &model, 6, 10, Placement::Gaussian, &SeedTree::new(2)).unwrap();
    let obs = degree_sequence(&h);
    for d in &reps {
        for i in 0..15 {
            assert_eq!(d.total(i), obs.total(i));
        }
        for i in 15..21 {
            assert_eq!(d.total(i), 0);
        }
    }
    let m = predictive_motifs(&h, &model, 6, 4, &default_motifs(), Placement::Peripheral, &SeedTree::new(2)).unwrap();
    assert!(m.iter().all(|r| r.new.iter().all(|&c| c == 0)));
}

#[test]
fn replicates_contain_the_observed_hypergraph_and_noise_stays_on_new_edges() {
    // heavy noise: old edges would be visibly disturbed if noise touched them
    let noise = NoiseParams::asymmetric(vec![0.2, 0.05], vec![0.5, 0.5]).unwrap();
    let (h, model) = fitted(12, vec![0.4, 0.5], noise, 5);
    let mut r = rng(6);
    for _ in 0..20 {
        let g = predictive_hypergraph(&h, &model, 5, Placement::Gaussian, &mut r).unwrap();
        assert_eq!(g.n_nodes(), 17);
        for e in h.iter() {
            assert!(g.contains(e.nodes()));
        }
        let old: Vec<_> = g.iter().filter(|e| e.nodes().iter().all(|&v| v < 12)).collect();
        assert_eq!(old.len(), h.n_edges());
        assert_eq!(new_edges(&g, 12).len(), g.n_edges() - h.n_edges());
    }
}

#[test]
fn peripheral_keeps_the_farthest_draws() {
    let mu = DVector::from_vec(vec![0.5, -0.2]);
    let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.6]);
    let (n, n_star) = (20, 7);
    let mut a = rng(7);
    let mut b = a.clone();
    let kept = new_coordinates(&mu, &sigma, n, n_star, Placement::Peripheral, &mut a).unwrap();
    let l = cholesky(&sigma).unwrap().l();
    let all: Vec<DVector<f64>> = (0..n + n_star).map(|_| sample_mvn(&mut b, &mu, &l)).collect();
    let dist = |p: &[f64]| ((p[0] - mu[0]).powi(2) + (p[1] - mu[1]).powi(2)).sqrt();
    let kept_d: Vec<f64> = kept.rows().map(dist).collect();
    let min_kept = kept_d.iter().copied().fold(f64::INFINITY, f64::min);
    let mut discarded = 0;
    for p in &all {
        let d = dist(p.as_slice());
        if !kept.rows().any(|q| q == p.as_slice()) {
            discarded += 1;
            assert!(d <= min_kept);
        }
    }
    assert_eq!(discarded, n);
}

#[test]
fn predictive_runs_are_deterministic() {
    let (h, model) = fitted(15, vec![0.4, 0.5], NoiseParams::symmetric(vec![0.02, 0.002]).unwrap(), 8);
    let specs = default_motifs();
    let a = predictive_motifs(&h, &model, 4, 6, &specs, Placement::Gaussian, &SeedTree::new(3)).unwrap();
    let b = predictive_motifs(&h, &model, 4, 6, &specs, Placement::Gaussian, &SeedTree::new(3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn qq_of_identical_samples_has_zero_gap() {
    let x: Vec<f64> = (0..100).map(|i| (i % 7) as f64).collect();
    let t = qq_table(&x, &x, 50);
    assert_eq!(t.len(), 50);
    assert_eq!(median_qq_gap(&t), 0.0);
    let y: Vec<f64> = x.iter().map(|v| v + 2.0).collect();
    assert!((median_qq_gap(&qq_table(&x, &y, 50)) - 2.0).abs() < 1e-12);
}

#[test]
fn fitted_model_must_match_data() {
    let (h, mut model) = fitted(10, vec![0.4, 0.5], NoiseParams::zero(3, true), 9);
    model.u = LatentConfiguration::new(2, vec![0.0; 18]).unwrap();
    assert!(predictive_hypergraph(&h, &model, 2, Placement::Gaussian, &mut rng(1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn motif_counts_ignore_labels(seed in 0u64..1000, n in 4usize..8) {
        let mut r = rng(seed);
        let h = random_hypergraph(n, 0.5, 0.2, &mut r);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, r.random_range(0..=i));
        }
        let relabelled = Hypergraph::from_edges(
            n,
            3,
            h.iter().map(|e| e.nodes().iter().map(|&v| perm[v]).collect::<Vec<_>>()),
        ).unwrap();
        for spec in default_motifs() {
            prop_assert_eq!(count_motif(&h, &spec).unwrap(), count_motif(&relabelled, &spec).unwrap());
        }
    }
}
