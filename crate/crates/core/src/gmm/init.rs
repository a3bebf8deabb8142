//! Deterministic k-means++-style mean initialization.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Stream seed for (config seed, restart index, collapse-retry attempt);
/// every restart and retry owns a distinct, reproducible RNG stream.
pub fn derive_seed(seed: u64, restart: u64, attempt: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ restart);
    splitmix64(h ^ attempt)
}

pub fn rng_for(seed: u64, restart: u64, attempt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, restart, attempt))
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Picks K initial means from the data rows: first uniformly, the rest with
/// probability proportional to the squared distance to the nearest chosen
/// mean.
pub fn kmeanspp_means(
    data: &[f64],
    n: usize,
    d: usize,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let row = |i: usize| &data[i * d..(i + 1) * d];
    let mut means = Vec::with_capacity(k * d);
    let first = rng.gen_range(0..n);
    means.extend_from_slice(row(first));

    let mut d2: Vec<f64> = (0..n).map(|i| dist2(row(i), row(first))).collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 && total.is_finite() {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All points coincide with chosen means; fall back to uniform.
            rng.gen_range(0..n)
        };
        let new_mean = row(idx).to_vec();
        for (i, best) in d2.iter_mut().enumerate() {
            let dd = dist2(row(i), &new_mean);
            if dd < *best {
                *best = dd;
            }
        }
        means.extend_from_slice(&new_mean);
    }
    means
}
