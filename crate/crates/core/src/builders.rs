//! Track construction algorithms.
//!
//! Each builder returns a [`BuildOutcome`] whose track supports the car at
//! every offset. The randomized builders are pure functions of
//! `(instance, seed)`: every random bit is addressed by position (and phase)
//! through [`crate::rng`], never drawn from shared state.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, ModelError, TrackLayout, WheelConfig};
use crate::rng::{self, Stream};

/// Upper limit on resampling phases before the fix-it builder gives up.
pub const DEFAULT_PHASE_CAP: u64 = 10_000_000;

/// Relative tolerance under which the two conditional expectations count as
/// equal; the tie goes to leaving the position empty.
const TIE_TOLERANCE: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("track length {track_length} shorter than car quarter {quarter_length}")]
    TrackTooShort { track_length: u64, quarter_length: u64 },
    #[error("wheel count and spacing must be positive")]
    ZeroParameter,
    #[error("car is not evenly spaced as {{g, 2g, ..., ng}} with f = ng")]
    NotEvenlySpaced,
    #[error("fix-it exceeded {cap} resampling phases")]
    PhaseCapExceeded { cap: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Even,
    RandomAlterations,
    Conditional,
    LllFixit,
    Minhash,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Even,
        Algorithm::RandomAlterations,
        Algorithm::Conditional,
        Algorithm::LllFixit,
        Algorithm::Minhash,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Even => "even",
            Algorithm::RandomAlterations => "random_alterations",
            Algorithm::Conditional => "conditional",
            Algorithm::LllFixit => "lll_fixit",
            Algorithm::Minhash => "minhash",
        }
    }

    pub fn is_seeded(self) -> bool {
        matches!(
            self,
            Algorithm::RandomAlterations | Algorithm::LllFixit | Algorithm::Minhash
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    /// Accepts the canonical names plus the short CLI aliases.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(Algorithm::Even),
            "random" | "random_alterations" => Ok(Algorithm::RandomAlterations),
            "derand" | "conditional" => Ok(Algorithm::Conditional),
            "lll" | "lll_fixit" => Ok(Algorithm::LllFixit),
            "minhash" => Ok(Algorithm::Minhash),
            other => Err(format!("unknown algorithm '{other}'")),
        }
    }
}

/// A supporting track together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildOutcome {
    pub track: TrackLayout,
    pub algorithm: Algorithm,
    pub pillar_count: usize,
    /// Pillars added by the repair pass after the main construction.
    pub alteration_count: usize,
    /// Resampling phases (fix-it only).
    pub phase_count: u64,
    pub seed: Option<u64>,
    pub install_probability: f64,
    /// Final conditional expectation reached by the derandomized builder.
    pub objective: Option<f64>,
}

impl BuildOutcome {
    fn new(track: TrackLayout, algorithm: Algorithm) -> Self {
        Self {
            pillar_count: track.len(),
            track,
            algorithm,
            alteration_count: 0,
            phase_count: 0,
            seed: None,
            install_probability: 0.0,
            objective: None,
        }
    }
}

/// `min(1, ln n / n)`, the installation rate of the alteration and
/// derandomized builders.
pub fn install_probability(n: usize) -> f64 {
    let n = n as f64;
    (n.ln() / n).clamp(0.0, 1.0)
}

/// `min(1, (1 + 2 ln n) / n)`, the sampling rate of the fix-it builder.
pub fn lll_probability(n: usize) -> f64 {
    let n = n as f64;
    ((1.0 + 2.0 * n.ln()) / n).clamp(0.0, 1.0)
}

/// Expected-size target `ℓ (1 + ln n) / n`.
pub fn alteration_bound(n: usize, track_length: u64) -> f64 {
    let nf = n as f64;
    track_length as f64 * (1.0 + nf.ln()) / nf
}

/// Expected-size target of the fix-it builder, `ℓ (2 + 2 ln n) / n`.
pub fn lll_bound(n: usize, track_length: u64) -> f64 {
    let nf = n as f64;
    track_length as f64 * (2.0 + 2.0 * nf.ln()) / nf
}

/// Block period used by [`build_even`]: `max(1, (n-2)g + 2)`.
pub fn even_period(n: u64, spacing: u64) -> u64 {
    let p = (n as i128 - 2) * spacing as i128 + 2;
    p.max(1) as u64
}

/// Evenly spaced car `{g, 2g, ..., ng}` with blocks of `g` consecutive
/// pillars repeating every [`even_period`] feet from position 1.
///
/// Any run of `g` consecutive positions holds exactly one wheel whenever it
/// lies under the car's wheel span, so a block start every `ng` feet already
/// suffices; the period used here is tighter than that.
pub fn build_even(
    n: u64,
    spacing: u64,
    track_length: u64,
) -> Result<(WheelConfig, BuildOutcome), BuildError> {
    if n == 0 || spacing == 0 {
        return Err(BuildError::ZeroParameter);
    }
    let quarter_length = n * spacing;
    if track_length < quarter_length {
        return Err(BuildError::TrackTooShort {
            track_length,
            quarter_length,
        });
    }
    let car = WheelConfig::new(quarter_length, (1..=n).map(|i| i * spacing).collect())?;
    let period = even_period(n, spacing);
    let mut mask = vec![false; track_length as usize + 1];
    let mut start = 1;
    while start <= track_length {
        let end = (start + spacing - 1).min(track_length);
        for p in start..=end {
            mask[p as usize] = true;
        }
        start += period;
    }
    let outcome = BuildOutcome::new(TrackLayout::from_mask(&mask), Algorithm::Even);
    Ok((car, outcome))
}

/// Scans offsets in increasing order and installs a pillar under the
/// frontmost wheel of every offset that still falls through. Returns the
/// number of pillars added.
fn repair(instance: &Instance, mask: &mut [bool]) -> usize {
    let front = instance.car().max_wheel();
    let mut added = 0;
    for k in instance.offsets() {
        if !instance.wheel_positions(k).any(|p| mask[p as usize]) {
            mask[(k + front) as usize] = true;
            added += 1;
        }
    }
    added
}

/// Random installation at rate [`install_probability`] followed by a repair
/// pass.
pub fn build_random_alterations(instance: &Instance, seed: u64) -> BuildOutcome {
    let q = install_probability(instance.n());
    let len = instance.track_length();
    let mut mask = vec![false; len as usize + 1];
    for p in 1..=len {
        mask[p as usize] = rng::bernoulli(rng::bits(seed, Stream::RandomInstall, &[p]), q);
    }
    let alterations = repair(instance, &mut mask);
    let mut out = BuildOutcome::new(TrackLayout::from_mask(&mask), Algorithm::RandomAlterations);
    out.alteration_count = alterations;
    out.seed = Some(seed);
    out.install_probability = q;
    out
}

/// Per-offset bookkeeping for the derandomized builder.
///
/// An uncovered offset with `u` undecided wheel positions falls through the
/// eventual random track with probability `(1-q)^u`; the powers are tabulated
/// once so every update is an integer decrement.
struct DerandState {
    undecided: Vec<u32>,
    covered: Vec<bool>,
    fall: Vec<f64>,
    decided: u64,
}

impl DerandState {
    fn new(instance: &Instance, q: f64) -> Self {
        let n = instance.n();
        let mut fall = Vec::with_capacity(n + 1);
        let mut acc = 1.0;
        for _ in 0..=n {
            fall.push(acc);
            acc *= 1.0 - q;
        }
        Self {
            undecided: vec![n as u32; instance.offset_count()],
            covered: vec![false; instance.offset_count()],
            fall,
            decided: 0,
        }
    }

    fn fall_probability(&self, k: usize) -> f64 {
        if self.covered[k] {
            0.0
        } else {
            self.fall[self.undecided[k] as usize]
        }
    }
}

/// Method of conditional probabilities over the alteration builder.
///
/// The running objective is `|{i ≤ k : x_i = 1}| + q(ℓ - k) + Σ p_i`, the
/// expected final size given the decided prefix. Position `k+1` is set to
/// whichever value does not increase it, preferring an empty position on ties.
/// The decided positions then go through the same repair pass.
pub fn build_conditional(instance: &Instance) -> BuildOutcome {
    let q = install_probability(instance.n());
    let len = instance.track_length();
    let mut state = DerandState::new(instance, q);
    let mut mask = vec![false; len as usize + 1];
    let mut objective =
        q * len as f64 + instance.offset_count() as f64 * state.fall[instance.n()];
    let mut affected = Vec::with_capacity(instance.n());

    for pos in 1..=len {
        affected.clear();
        affected.extend(
            instance
                .covered_offsets(pos)
                .map(|k| k as usize)
                .filter(|&k| !state.covered[k]),
        );
        let mut lost = 0.0;
        let mut grown = 0.0;
        for &k in &affected {
            let u = state.undecided[k] as usize;
            lost += state.fall[u];
            grown += state.fall[u - 1] - state.fall[u];
        }
        let delta_one = (1.0 - q) - lost;
        let delta_zero = grown - q;
        let tol = TIE_TOLERANCE * delta_one.abs().max(delta_zero.abs()).max(1.0);
        let install = delta_one < delta_zero - tol;

        for k in instance.covered_offsets(pos) {
            state.undecided[k as usize] -= 1;
        }
        if install {
            mask[pos as usize] = true;
            for &k in &affected {
                state.covered[k] = true;
            }
            objective += delta_one;
        } else {
            objective += delta_zero;
        }
        state.decided = pos;
    }
    debug_assert_eq!(state.decided, len);
    debug_assert!(state.undecided.iter().all(|&u| u == 0));
    debug_assert!({
        let remaining: f64 = (0..instance.offset_count())
            .map(|k| state.fall_probability(k))
            .sum();
        let exact = mask.iter().filter(|&&b| b).count() as f64 + remaining;
        (exact - objective).abs() <= 1e-6 * exact.max(1.0)
    });

    let alterations = repair(instance, &mut mask);
    let mut out = BuildOutcome::new(TrackLayout::from_mask(&mask), Algorithm::Conditional);
    out.alteration_count = alterations;
    out.install_probability = q;
    out.objective = Some(objective);
    out
}

/// Moser-Tardos fix-it: sample every position at rate [`lll_probability`],
/// then repeatedly resample the wheel positions of the smallest failing
/// offset until none fails.
pub fn build_lll_fixit(instance: &Instance, seed: u64) -> Result<BuildOutcome, BuildError> {
    build_lll_fixit_capped(instance, seed, DEFAULT_PHASE_CAP)
}

pub fn build_lll_fixit_capped(
    instance: &Instance,
    seed: u64,
    phase_cap: u64,
) -> Result<BuildOutcome, BuildError> {
    let p = lll_probability(instance.n());
    let len = instance.track_length();
    let mut mask = vec![false; len as usize + 1];
    for j in 1..=len {
        mask[j as usize] = rng::bernoulli(rng::bits(seed, Stream::LllInitial, &[j]), p);
    }

    // Number of wheels resting on a pillar, per offset.
    let mut support: Vec<u32> = instance
        .offsets()
        .map(|k| instance.wheel_positions(k).filter(|&j| mask[j as usize]).count() as u32)
        .collect();
    let mut failing: BTreeSet<u64> = instance
        .offsets()
        .filter(|&k| support[k as usize] == 0)
        .collect();

    let mut phases = 0u64;
    while let Some(&event) = failing.first() {
        if phases == phase_cap {
            return Err(BuildError::PhaseCapExceeded { cap: phase_cap });
        }
        phases += 1;
        for j in instance.wheel_positions(event) {
            let now = rng::bernoulli(rng::bits(seed, Stream::LllResample, &[j, phases]), p);
            if now == mask[j as usize] {
                continue;
            }
            mask[j as usize] = now;
            for k in instance.covered_offsets(j) {
                let s = &mut support[k as usize];
                if now {
                    *s += 1;
                    if *s == 1 {
                        failing.remove(&k);
                    }
                } else {
                    *s -= 1;
                    if *s == 0 {
                        failing.insert(k);
                    }
                }
            }
        }
    }

    let mut out = BuildOutcome::new(TrackLayout::from_mask(&mask), Algorithm::LllFixit);
    out.phase_count = phases;
    out.seed = Some(seed);
    out.install_probability = p;
    Ok(out)
}

/// Per-position 64-bit ranks for min-hash sampling.
pub struct MinHashState {
    ranks: Vec<u64>,
}

impl MinHashState {
    pub fn new(track_length: u64, seed: u64) -> Self {
        let mut ranks = Vec::with_capacity(track_length as usize + 1);
        ranks.push(u64::MAX);
        ranks.extend((1..=track_length).map(|j| rng::bits(seed, Stream::MinHashRank, &[j])));
        Self { ranks }
    }

    pub fn rank(&self, position: u64) -> u64 {
        self.ranks[position as usize]
    }
}

/// Min-hash sampling: every offset contributes the wheel position with the
/// smallest rank, ties going to the smaller position.
pub fn build_minhash(instance: &Instance, seed: u64) -> BuildOutcome {
    let len = instance.track_length();
    let state = MinHashState::new(len, seed);
    let mut mask = vec![false; len as usize + 1];
    for k in instance.offsets() {
        let chosen = instance
            .wheel_positions(k)
            .min_by_key(|&j| (state.rank(j), j))
            .expect("wheel set is nonempty");
        mask[chosen as usize] = true;
    }
    let mut out = BuildOutcome::new(TrackLayout::from_mask(&mask), Algorithm::Minhash);
    out.seed = Some(seed);
    out
}

/// Dispatches to a builder for an existing instance. [`Algorithm::Even`]
/// requires the car to be `{g, 2g, ..., ng}` with `f = ng`.
pub fn build(instance: &Instance, algorithm: Algorithm, seed: u64) -> Result<BuildOutcome, BuildError> {
    match algorithm {
        Algorithm::Even => {
            let (n, g) = even_parameters(instance.car()).ok_or(BuildError::NotEvenlySpaced)?;
            let (_, out) = build_even(n, g, instance.track_length())?;
            Ok(out)
        }
        Algorithm::RandomAlterations => Ok(build_random_alterations(instance, seed)),
        Algorithm::Conditional => Ok(build_conditional(instance)),
        Algorithm::LllFixit => build_lll_fixit(instance, seed),
        Algorithm::Minhash => Ok(build_minhash(instance, seed)),
    }
}

/// Recovers `(n, g)` when the car is evenly spaced as [`build_even`] expects.
pub fn even_parameters(car: &WheelConfig) -> Option<(u64, u64)> {
    let g = car.wheels()[0];
    let n = car.n() as u64;
    let evenly = car
        .wheels()
        .iter()
        .enumerate()
        .all(|(i, &w)| w == (i as u64 + 1) * g);
    (evenly && car.quarter_length() == n * g).then_some((n, g))
}
