//! Stateless, seed-addressed random bits.
//!
//! Every random choice in the crate is a pure function of an explicit seed and
//! a small tuple of coordinates (stream tag, position, phase, trial index...).
//! Values are produced by folding the coordinates through the SplitMix64
//! finalizer, so results do not depend on evaluation order or thread count.

/// Stream tags keep unrelated consumers of the same seed independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    RandomInstall = 0x01,
    LllInitial = 0x02,
    LllResample = 0x03,
    MinHashRank = 0x04,
    CarWheel = 0x05,
    CarRedraw = 0x06,
    Trial = 0x07,
    Instance = 0x08,
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `seed`, one SplitMix64 round per coordinate.
#[inline]
pub fn derive(seed: u64, parts: &[u64]) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN_GAMMA));
    for &p in parts {
        h = mix64(h ^ p.wrapping_add(GOLDEN_GAMMA));
    }
    h
}

#[inline]
pub fn bits(seed: u64, stream: Stream, parts: &[u64]) -> u64 {
    let mut h = derive(seed, &[stream as u64]);
    for &p in parts {
        h = mix64(h ^ p.wrapping_add(GOLDEN_GAMMA));
    }
    h
}

/// Maps 64 random bits to a uniform double in `[0, 1)` using the top 53 bits.
#[inline]
pub fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Bernoulli draw with success probability `p` (clamped to `[0, 1]`).
#[inline]
pub fn bernoulli(x: u64, p: f64) -> bool {
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        unit_f64(x) < p
    }
}
