//! Independent reference implementations used by the integration tests.
//! None of these share code paths with the library's verifier or solvers.
#![allow(dead_code)]

use gaptrack::{Instance, TrackLayout, WheelConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Failing offsets by the definition: offset k fails when no wheel position
/// w + k is a pillar.
pub fn naive_failing(wheels: &[u64], f: u64, l: u64, pillars: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for k in 0..=(l - f) {
        let mut hit = false;
        for &w in wheels {
            for &p in pillars {
                if w + k == p {
                    hit = true;
                }
            }
        }
        if !hit {
            out.push(k);
        }
    }
    out
}

/// Offset masks for exhaustive subset search: bit `p-1` set when pillar `p`
/// sits under a wheel at that offset.
fn offset_masks(wheels: &[u64], f: u64, l: u64) -> Vec<u32> {
    assert!(l <= 24);
    (0..=(l - f))
        .map(|k| wheels.iter().fold(0u32, |m, &w| m | 1 << (w + k - 1)))
        .collect()
}

/// Minimum supporting track size by sweeping all 2^l pillar subsets.
pub fn exhaustive_min(wheels: &[u64], f: u64, l: u64) -> usize {
    let masks = offset_masks(wheels, f, l);
    (0u32..1 << l)
        .filter(|&t| masks.iter().all(|&m| m & t != 0))
        .map(|t| t.count_ones() as usize)
        .min()
        .expect("full track always works")
}

/// Random small instance with n <= max_n, l <= max_l.
pub fn random_small_instance(rng: &mut ChaCha8Rng, max_n: usize, max_l: u64) -> (Vec<u64>, u64, u64) {
    let l = rng.random_range(1..=max_l);
    let f = rng.random_range(1..=l);
    let n = rng.random_range(1..=(max_n as u64).min(f)) as usize;
    let mut wheels: Vec<u64> = rand::seq::index::sample(rng, f as usize, n)
        .into_iter()
        .map(|i| i as u64 + 1)
        .collect();
    wheels.sort_unstable();
    (wheels, f, l)
}

pub fn random_track(rng: &mut ChaCha8Rng, l: u64, density: f64) -> Vec<u64> {
    (1..=l).filter(|_| rng.random_bool(density)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn instance(wheels: &[u64], f: u64, l: u64) -> Instance {
    Instance::new(WheelConfig::new(f, wheels.to_vec()).unwrap(), l).unwrap()
}

pub fn track(l: u64, pillars: Vec<u64>) -> TrackLayout {
    TrackLayout::new(l, pillars).unwrap()
}

/// E[Y] by enumerating all 2^(2n) wheel subsets of {1..2n}, the empty car
/// included (it falls at all 2n + 1 offsets).
pub fn brute_force_expected_y(n: u64, pillars: &[u64]) -> f64 {
    let width = 2 * n;
    let mut total = 0u64;
    for car in 0u64..1 << width {
        for k in 0..=width {
            let supported = pillars
                .iter()
                .any(|&t| t > k && t - k <= width && car >> (t - k - 1) & 1 == 1);
            if !supported {
                total += 1;
            }
        }
    }
    total as f64 / (1u64 << width) as f64
}

pub fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:>2} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
