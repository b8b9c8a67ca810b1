use lsh_core::genmodel::{sample_hypergraph, LatentPrior, NoiseParams};
use lsh_core::geometry::RadiusSchedule;
use lsh_core::hypercore::degree_sequence;
use lsh_core::rng::SeedTree;
use lsh_core::theory::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(v))
}

#[test]
fn order2_formula_agrees_with_monte_carlo() {
    for (sigma, r) in [(diag(&[1.0, 1.0]), 1.0), (diag(&[2.0, 1.0]), 0.8), (diag(&[0.5, 1.0, 1.5]), 0.9)] {
        let d = sigma.nrows();
        let exact = p_edge_order2(&sigma, r).unwrap().value;
        let mc = p_edge_mc(&DVector::from_element(d, 0.3), &sigma, r, 2, 100_000, &mut rng(1)).unwrap();
        assert!((mc.value - exact).abs() < 3.0 * mc.std_error(), "{} vs {exact}", mc.value);
    }
}

#[test]
fn isotropic_plane_reference_value() {
    let p = p_edge_order2(&DMatrix::identity(2, 2), 1.0).unwrap();
    assert!((p.value - 0.632_120_558_828_557_7).abs() < 1e-12);
}

#[test]
fn higher_orders_need_larger_radii() {
    let mu = DVector::zeros(2);
    let s = DMatrix::identity(2, 2);
    let p: Vec<_> = (2..=4).map(|k| p_edge_mc(&mu, &s, 0.6, k, 50_000, &mut rng(k as u64)).unwrap()).collect();
    for w in p.windows(2) {
        let se = (w[0].std_error().powi(2) + w[1].std_error().powi(2)).sqrt();
        assert!(w[0].value - w[1].value > 3.0 * se, "{} vs {}", w[0].value, w[1].value);
    }
}

#[test]
fn standard_error_shrinks_at_binomial_rate() {
    let mu = DVector::zeros(2);
    let s = DMatrix::identity(2, 2);
    let a = p_edge_mc(&mu, &s, 0.5, 3, 10_000, &mut rng(2)).unwrap();
    let b = p_edge_mc(&mu, &s, 0.5, 3, 40_000, &mut rng(3)).unwrap();
    let ratio = a.std_error() / b.std_error();
    assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
}

#[test]
fn monte_carlo_is_reproducible() {
    let mu = DVector::zeros(3);
    let s = DMatrix::identity(3, 3);
    let a = p_edge_mc(&mu, &s, 0.7, 4, 9_000, &mut rng(4)).unwrap();
    let b = p_edge_mc(&mu, &s, 0.7, 4, 9_000, &mut rng(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn expected_degree_matches_simulation() {
    let (n, r, phi) = (20, [0.3, 0.4], [0.02, 0.005]);
    let s = DMatrix::identity(2, 2);
    let p2 = p_edge_order2(&s, r[0]).unwrap().value;
    let p3 = p_edge_mc(&DVector::zeros(2), &s, r[1], 3, 400_000, &mut rng(5)).unwrap();
    let theory = expected_degree(n, &[p2, p3.value], &phi).unwrap();

    let prior = LatentPrior::gaussian(DVector::zeros(2), s).unwrap();
    let radii = RadiusSchedule::new(r.to_vec()).unwrap();
    let noise = NoiseParams::symmetric(phi.to_vec()).unwrap();
    let tree = SeedTree::new(6);
    let reps = 10_000;
    // node 0's total degree in independent hypergraphs
    let degs: Vec<f64> = (0..reps)
        .map(|i| {
            let (h, _) = sample_hypergraph(&prior, &radii, &noise, n, &mut tree.substream("rep", i)).unwrap();
            degree_sequence(&h).total(0) as f64
        })
        .collect();
    let m = degs.iter().sum::<f64>() / reps as f64;
    let var = degs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps - 1) as f64;
    let se = (var / reps as f64).sqrt();
    // the p3 estimate carries its own error into the theory value
    let se_theory = 171.0 * (1.0 - 2.0 * phi[1]) * p3.std_error();
    let tol = 3.0 * (se * se + se_theory * se_theory).sqrt();
    assert!((m - theory).abs() < tol, "simulated {m} vs {theory} (tol {tol})");
}

#[test]
fn empirical_histogram_and_distance() {
    let e = DegreeDistribution::empirical(&[0, 1, 1, 3], 2);
    assert_eq!(e.pmf, vec![0.25, 0.5, 0.0, 0.25]);
    let b = DegreeDistribution { pmf: vec![0.5, 0.5] };
    assert!((e.total_variation(&b) - 0.25).abs() < 1e-15);
    assert_eq!(e.total_variation(&e), 0.0);
}

#[test]
fn sweep_reports_exact_values_for_pairs() {
    let pts = sweep(&DVector::zeros(2), &DMatrix::identity(2, 2), &[2, 3], &[0.5, 1.0], 2000, &mut rng(7)).unwrap();
    assert_eq!(pts.len(), 4);
    assert!(pts[0].exact.is_some() && pts[2].exact.is_none());
    assert!(sweep(&DVector::zeros(2), &DMatrix::identity(2, 2), &[2], &[], 2000, &mut rng(7)).unwrap().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order2_probability_is_monotone(s1 in 0.1f64..3.0, s2 in 0.1f64..3.0, r in 0.01f64..3.0, dr in 0.001f64..1.0) {
        let s = diag(&[s1, s2]);
        let a = p_edge_order2(&s, r).unwrap().value;
        let b = p_edge_order2(&s, r + dr).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-12);
        // wider spread at the same radius connects less
        let c = p_edge_order2(&diag(&[s1 * 1.5, s2]), r).unwrap().value;
        prop_assert!(c <= a + 1e-12);
    }

    #[test]
    fn noisy_probability_is_flip_symmetric(p in 0.0f64..1.0, phi in 0.0f64..1.0) {
        let a = effective_probability(p, phi);
        let b = effective_probability(1.0 - p, 1.0 - phi);
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn poisson_mean_is_the_rate(p in 0.0f64..0.02, phi in 0.0f64..0.01) {
        let d = degree_dist_order3(20, p, phi).unwrap();
        let rate = order3_rate(20, p, phi).unwrap();
        prop_assert!((d.mean() - rate).abs() < 1e-12);
        prop_assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binomial_mean_matches(n in 2usize..60, p in 0.0f64..1.0, phi in 0.0f64..0.5) {
        let d = degree_dist_order2(n, p, phi).unwrap();
        prop_assert_eq!(d.pmf.len(), n);
        prop_assert!((d.mean() - (n - 1) as f64 * effective_probability(p, phi)).abs() < 1e-9);
    }
}
