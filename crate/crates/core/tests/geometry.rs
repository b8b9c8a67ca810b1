use lsh_core::geometry::{build_nsrgh, cech_k_layer, miniball, LatentConfiguration, RadiusSchedule};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest enclosing ball radius by exhaustive search over boundary subsets.
fn oracle_radius(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    let d = points[0].len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if idx.len() > d + 1 {
            continue;
        }
        let p0 = DVector::from_column_slice(&points[idx[0]]);
        let center = if idx.len() == 1 {
            p0.clone()
        } else {
            let m = idx.len() - 1;
            let v = DMatrix::from_fn(d, m, |r, c| points[idx[c + 1]][r] - p0[r]);
            let g = v.transpose() * &v * 2.0;
            let rhs = DVector::from_fn(m, |c, _| v.column(c).norm_squared());
            match g.lu().solve(&rhs) {
                Some(lambda) if lambda.iter().all(|x| x.is_finite()) => &p0 + &v * lambda,
                _ => continue,
            }
        };
        let r = points
            .iter()
            .map(|p| (DVector::from_column_slice(p) - &center).norm())
            .fold(0.0, f64::max);
        let on_boundary = idx
            .iter()
            .all(|&i| ((DVector::from_column_slice(&points[i]) - &center).norm() - r).abs() <= 1e-9 * (1.0 + r));
        if on_boundary && r < best {
            best = r;
        }
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn random_config(seed: u64, n: usize, d: usize, scale: f64) -> LatentConfiguration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n * d).map(|_| rng.random_range(-scale..scale)).collect();
    LatentConfiguration::new(d, coords).unwrap()
}

#[test]
fn miniball_matches_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..400 {
        let d = 2 + trial % 2;
        let n = rng.random_range(2..=7);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let ball = miniball(&refs).unwrap();
        let expect = oracle_radius(&pts);
        assert!(
            (ball.radius - expect).abs() <= 1e-9 * (1.0 + expect),
            "trial {trial}: {} vs {expect}",
            ball.radius
        );
        assert!(refs.iter().all(|p| ball.contains(p)));
    }
}

#[test]
fn cech_layers_match_brute_force() {
    for seed in 0..12u64 {
        let d = 2 + (seed as usize % 2);
        let u = random_config(seed, 10, d, 1.0);
        let r = 0.35 + 0.05 * seed as f64;
        for k in 2..=4 {
            let got: Vec<Vec<usize>> = cech_k_layer(&u, r, k).unwrap().iter().map(|e| e.nodes().to_vec()).collect();
            let want: Vec<Vec<usize>> = combinations(10, k)
                .into_iter()
                .filter(|s| {
                    let pts: Vec<Vec<f64>> = s.iter().map(|&i| u.row(i).to_vec()).collect();
                    oracle_radius(&pts) <= r
                })
                .collect();
            assert_eq!(got, want, "seed {seed} order {k}");
        }
    }
}

#[test]
fn nsrgh_is_union_of_layers() {
    let u = random_config(5, 12, 2, 1.0);
    let radii = RadiusSchedule::new(vec![0.3, 0.45, 0.6]).unwrap();
    let h = build_nsrgh(&u, &radii).unwrap();
    for k in 2..=4 {
        let layer = cech_k_layer(&u, radii.get(k), k).unwrap();
        assert_eq!(h.edges_of_order(k), layer.as_slice());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn miniball_invariant_under_similarity(
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..8),
        angle in 0.0f64..std::f64::consts::TAU,
        scale in 0.1f64..10.0,
        shift in (-5.0f64..5.0, -5.0f64..5.0),
    ) {
        let pts: Vec<[f64; 2]> = raw.iter().map(|&(x, y)| [x, y]).collect();
        let moved: Vec<[f64; 2]> = pts
            .iter()
            .map(|p| {
                let (s, c) = angle.sin_cos();
                [scale * (c * p[0] - s * p[1]) + shift.0, scale * (s * p[0] + c * p[1]) + shift.1]
            })
            .collect();
        let a = miniball(&pts.iter().map(|p| p.as_slice()).collect::<Vec<_>>()).unwrap();
        let b = miniball(&moved.iter().map(|p| p.as_slice()).collect::<Vec<_>>()).unwrap();
        prop_assert!((b.radius - scale * a.radius).abs() <= 1e-9 * (1.0 + b.radius));
    }

    #[test]
    fn nsrgh_monotone_in_radii(seed in 0u64..1000, grow in 1.0f64..2.0) {
        let u = random_config(seed, 9, 2, 1.0);
        let small = RadiusSchedule::new(vec![0.2, 0.3]).unwrap();
        let large = RadiusSchedule::new(vec![0.2 * grow, 0.3 * grow]).unwrap();
        let hs = build_nsrgh(&u, &small).unwrap();
        let hl = build_nsrgh(&u, &large).unwrap();
        for e in hs.iter() {
            prop_assert!(hl.contains(e.nodes()));
        }
    }

    #[test]
    fn subset_radius_never_exceeds_superset(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 3..8)) {
        let pts: Vec<[f64; 3]> = raw.iter().map(|&(x, y, z)| [x, y, z]).collect();
        let all = miniball(&pts.iter().map(|p| p.as_slice()).collect::<Vec<_>>()).unwrap();
        let sub = miniball(&pts[1..].iter().map(|p| p.as_slice()).collect::<Vec<_>>()).unwrap();
        prop_assert!(sub.radius <= all.radius * (1.0 + 1e-12));
    }
}
