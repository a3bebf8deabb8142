//! Second-implementation silhouette oracle and sweep-selection tests.

mod common;

use common::{matrix_from_rows, planted_blobs, synth_catalog, synth_city, TYPOLOGIES};

use rand::Rng;
use urbanform_core::gmm::init::rng_for;
use urbanform_core::gmm::{assign, fit, GmmConfig};
use urbanform_core::selection::{select_grid, select_k, silhouette};

/// Independently coded brute-force silhouette: materializes the full
/// distance matrix and iterates cluster member lists, unlike the
/// accumulator-based implementation under test.
fn brute_force_silhouette(rows: &[Vec<f64>], labels: &[usize]) -> (Vec<f64>, f64) {
    let n = rows.len();
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = dist(&rows[i], &rows[j]);
        }
    }
    let k = labels.iter().max().unwrap() + 1;
    let members: Vec<Vec<usize>> = (0..k)
        .map(|c| (0..n).filter(|&i| labels[i] == c).collect())
        .collect();
    let mut s = vec![0.0; n];
    for i in 0..n {
        let own = &members[labels[i]];
        if own.len() == 1 {
            s[i] = 0.0;
            continue;
        }
        let a = own
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| d[i][j])
            .sum::<f64>()
            / (own.len() - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != labels[i] && !members[c].is_empty())
            .map(|c| members[c].iter().map(|&j| d[i][j]).sum::<f64>() / members[c].len() as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        s[i] = if denom == 0.0 { 0.0 } else { (b - a) / denom };
    }
    let overall = s.iter().sum::<f64>() / n as f64;
    (s, overall)
}

#[test]
fn silhouette_matches_brute_force_on_50_random_sets() {
    for seed in 0..50u64 {
        let mut rng = rng_for(seed, 0x511, 0);
        let n = 10 + (rng.gen::<u64>() % 91) as usize; // 10..=100
        let d = 1 + (rng.gen::<u64>() % 5) as usize;
        let k = 2 + (rng.gen::<u64>() % 4) as usize;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen::<f64>() * 20.0 - 10.0).collect())
            .collect();
        // Ensure at least two distinct labels.
        let mut labels: Vec<usize> = (0..n).map(|_| (rng.gen::<u64>() as usize) % k).collect();
        labels[0] = 0;
        labels[1] = 1;

        let matrix = matrix_from_rows(&rows);
        let ours = silhouette(&matrix, &labels).unwrap();
        let (oracle_s, oracle_overall) = brute_force_silhouette(&rows, &labels);
        for (i, (got, want)) in ours.s.iter().zip(oracle_s.iter()).enumerate() {
            assert!(
                (got - want).abs() < 1e-12,
                "seed {seed} point {i}: {got} vs {want}"
            );
        }
        assert!((ours.overall - oracle_overall).abs() < 1e-12);
    }
}

#[test]
fn hand_case_two_pairs_matches_oracle() {
    let rows = vec![vec![0.0], vec![1.0], vec![10.0], vec![11.0]];
    let labels = vec![0, 0, 1, 1];
    let matrix = matrix_from_rows(&rows);
    let ours = silhouette(&matrix, &labels).unwrap();
    let (oracle_s, oracle_overall) = brute_force_silhouette(&rows, &labels);
    // Point 0: a = 1, b = 10.5, s = 9.5/10.5 ≈ 0.90476.
    assert!((ours.s[0] - 9.5 / 10.5).abs() < 1e-12);
    assert_eq!(ours.s, oracle_s);
    assert!((ours.overall - oracle_overall).abs() < 1e-15);
    let expected_overall = (2.0 * (9.5 / 10.5) + 2.0 * (8.5 / 9.5)) / 4.0;
    assert!((ours.overall - expected_overall).abs() < 1e-12);
}

/// Random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
fn random_orthogonal(seed: u64, d: usize) -> Vec<Vec<f64>> {
    let mut rng = rng_for(seed, 0x0A70, 0);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| common::gauss(&mut rng)).collect();
        for u in &basis {
            let dot: f64 = v.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
            for (vi, ui) in v.iter_mut().zip(u.iter()) {
                *vi -= dot * ui;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

#[test]
fn silhouette_invariant_under_orthogonal_transform() {
    let planted = planted_blobs(17, &[vec![0.0, 0.0, 0.0], vec![8.0, 0.0, 0.0]], 1.0, 40);
    let labels = planted.labels.clone();
    let matrix = matrix_from_rows(&planted.rows);
    let before = silhouette(&matrix, &labels).unwrap();

    let q = random_orthogonal(3, 3);
    let rotated: Vec<Vec<f64>> = planted
        .rows
        .iter()
        .map(|row| {
            (0..3)
                .map(|i| (0..3).map(|j| q[i][j] * row[j]).sum())
                .collect()
        })
        .collect();
    let rotated_matrix = matrix_from_rows(&rotated);
    let after = silhouette(&rotated_matrix, &labels).unwrap();
    for i in 0..labels.len() {
        assert!(
            (before.s[i] - after.s[i]).abs() < 1e-9,
            "point {i}: {} vs {}",
            before.s[i],
            after.s[i]
        );
    }
    assert!((before.overall - after.overall).abs() < 1e-9);
}

#[test]
fn select_k_finds_planted_k_on_most_seeds() {
    let means = vec![vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 10.0]];
    let mut successes = 0;
    for seed in 0..10u64 {
        let planted = planted_blobs(seed + 40, &means, 1.0, 80);
        let matrix = matrix_from_rows(&planted.rows);
        let mut base = GmmConfig::new(1, seed);
        base.n_restarts = 4;
        let curve = select_k(&matrix, 1..=8, &base).unwrap();
        assert_eq!(curve.entries.len(), 8);
        if curve.best_k == 3 {
            successes += 1;
        }
    }
    assert!(successes >= 8, "best_K = 3 in only {successes}/10 seeds");
}

#[test]
fn silhouette_higher_at_true_k_than_inflated_k() {
    let means = vec![vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 10.0]];
    let mut successes = 0;
    for seed in 0..10u64 {
        let planted = planted_blobs(seed + 900, &means, 1.0, 60);
        let matrix = matrix_from_rows(&planted.rows);
        let sil_at = |k: usize| -> f64 {
            let mut config = GmmConfig::new(k, seed);
            config.n_restarts = 4;
            let model = fit(&matrix, &config).unwrap();
            let labels = assign(&model, &matrix).unwrap();
            match silhouette(&matrix, &labels) {
                Ok(b) => b.overall,
                Err(_) => -1.0,
            }
        };
        if sil_at(3) > sil_at(6) {
            successes += 1;
        }
    }
    assert!(successes >= 8, "true-K silhouette won only {successes}/10");
}

#[test]
fn select_grid_recovers_planted_scale() {
    // Four typologies planted on 500 m patches; at 250 m the cells are too
    // noisy, at 1000 m they blend neighboring patches.
    let city = common::synth_city_scaled(
        2,
        "synthville",
        (46.3, 6.9),
        3000.0,
        500.0,
        &[0, 1, 2, 3],
        3,
        common::scattered_pattern,
    );
    let catalog = synth_catalog();
    let mut base = GmmConfig::new(1, 2);
    base.n_restarts = 4;
    let sweep = select_grid(
        &city.entities,
        &city.boundary,
        &catalog,
        &[250.0, 500.0, 1000.0],
        2..=6,
        &base,
    )
    .unwrap();
    assert_eq!(sweep.best_size, 500.0, "sweep: {:?}", sweep.entries);
}

#[test]
fn bic_curve_is_deterministic_for_fixed_seed() {
    let planted = planted_blobs(
        55,
        &[vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 10.0]],
        1.0,
        60,
    );
    let matrix = matrix_from_rows(&planted.rows);
    let mut base = GmmConfig::new(1, 123);
    base.n_restarts = 3;
    let a = select_k(&matrix, 1..=5, &base).unwrap();
    let b = select_k(&matrix, 1..=5, &base).unwrap();
    assert_eq!(a, b);
}

#[test]
fn undersized_grids_are_skipped() {
    // A city smaller than the coarse candidate: too few cells for 2*k_max.
    let city = synth_city(
        11,
        "smallville",
        (46.2, 6.8),
        1000.0,
        500.0,
        &[1, 2],
        |pi, pj| (pi + pj) as usize % 2,
    );
    let catalog = synth_catalog();
    let mut base = GmmConfig::new(1, 3);
    base.n_restarts = 3;
    let sweep = select_grid(
        &city.entities,
        &city.boundary,
        &catalog,
        &[500.0, 5000.0],
        2..=3,
        &base,
    )
    .unwrap();
    assert_eq!(sweep.entries.len(), 1);
    assert_eq!(sweep.skipped.len(), 1);
    assert_eq!(sweep.skipped[0].0, 5000.0);
    assert_eq!(sweep.best_size, 500.0);
}

#[test]
fn typology_profile_magnitudes_are_distinct() {
    // Sanity check on the shared test profiles: dominant features differ.
    let dominant: Vec<usize> = TYPOLOGIES
        .iter()
        .map(|t| {
            let v = [t.restaurants, t.natural, t.residential, t.parking];
            (0..4).max_by_key(|&i| v[i]).unwrap()
        })
        .collect();
    let unique: std::collections::BTreeSet<_> = dominant.iter().collect();
    assert_eq!(unique.len(), 4);
}
