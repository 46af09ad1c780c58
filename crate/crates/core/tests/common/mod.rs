#![allow(dead_code)]

use meanbounds::Configuration;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform weights on the simplex, summing to 1 up to rounding absorbed in the last entry.
pub fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    let mut q: Vec<f64> = e.iter().map(|v| v / total).collect();
    let head: f64 = q[..n - 1].iter().sum();
    q[n - 1] = 1.0 - head;
    if q[n - 1] <= 0.0 {
        return weights(rng, n);
    }
    q
}

/// Samples in `[0, 1]`, log-uniform over several decades, with an exact zero
/// in roughly one config in `zero_every` (never when `zero_every` is 0).
pub fn samples<R: Rng>(rng: &mut R, n: usize, zero_every: u32) -> Vec<f64> {
    let decades = rng.random_range(0.5..6.0);
    let mut x: Vec<f64> = (0..n).map(|_| 10f64.powf(-decades * rng.random::<f64>())).collect();
    if zero_every > 0 && rng.random_ratio(1, zero_every) {
        x[0] = 0.0;
    }
    x
}

pub fn config<R: Rng>(rng: &mut R, max_n: usize, zero_every: u32) -> Configuration {
    let n = rng.random_range(2..=max_n);
    let x = samples(rng, n, zero_every);
    let q = weights(rng, n);
    Configuration::from_unsorted(x, q).expect("sampler produces valid configurations")
}

/// `count` configurations, reproducible from `seed`.
pub fn configs(seed: u64, count: usize, max_n: usize, zero_every: u32) -> Vec<Configuration> {
    let mut r = rng(seed);
    (0..count).map(|_| config(&mut r, max_n, zero_every)).collect()
}

/// Direct `(Σ qᵢ xᵢ^r)^{1/r}` / `Π xᵢ^{qᵢ}` for cross-checking.
pub fn naive_power_mean(x: &[f64], q: &[f64], r: f64) -> f64 {
    if r == 0.0 {
        return x.iter().zip(q).map(|(x, q)| x.powf(*q)).product();
    }
    let s: f64 = x.iter().zip(q).map(|(x, q)| q * x.powf(r)).sum();
    s.powf(1.0 / r)
}
