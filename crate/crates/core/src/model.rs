//! Domain types and the exact coverage verifier.
//!
//! Positions are 1-indexed. A quarter of length `f` carries wheels at offsets
//! `C ⊆ {1..f}` from its rear. On a track of length `ℓ` the rear of the quarter
//! may sit at any offset `k ∈ {0..ℓ-f}`, putting its wheels at `C + k`. A track
//! supports the car when every offset has at least one wheel over a pillar.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("empty wheel set")]
    EmptyWheels,
    #[error("quarter length must be positive")]
    ZeroQuarterLength,
    #[error("track length must be positive")]
    ZeroTrackLength,
    #[error("wheel out of range: {wheel} not in 1..={quarter_length}")]
    WheelOutOfRange { wheel: u64, quarter_length: u64 },
    #[error("wheels not sorted: {0} follows {1}")]
    WheelsNotSorted(u64, u64),
    #[error("duplicate wheel {0}")]
    DuplicateWheel(u64),
    #[error("track length {track_length} shorter than quarter length {quarter_length}")]
    TrackTooShort { track_length: u64, quarter_length: u64 },
    #[error("pillar out of range: {pillar} not in 1..={track_length}")]
    PillarOutOfRange { pillar: u64, track_length: u64 },
    #[error("pillars not sorted: {0} follows {1}")]
    PillarsNotSorted(u64, u64),
    #[error("duplicate pillar {0}")]
    DuplicatePillar(u64),
    #[error("track length {track} does not match instance length {instance}")]
    LengthMismatch { track: u64, instance: u64 },
}

/// Wheel offsets within one quarter of the car.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WheelConfig {
    quarter_length: u64,
    wheels: Vec<u64>,
}

impl WheelConfig {
    pub fn new(quarter_length: u64, wheels: Vec<u64>) -> Result<Self, ModelError> {
        if quarter_length == 0 {
            return Err(ModelError::ZeroQuarterLength);
        }
        if wheels.is_empty() {
            return Err(ModelError::EmptyWheels);
        }
        for w in wheels.windows(2) {
            if w[1] == w[0] {
                return Err(ModelError::DuplicateWheel(w[0]));
            }
            if w[1] < w[0] {
                return Err(ModelError::WheelsNotSorted(w[1], w[0]));
            }
        }
        if let Some(&wheel) = wheels.iter().find(|&&w| w == 0 || w > quarter_length) {
            return Err(ModelError::WheelOutOfRange {
                wheel,
                quarter_length,
            });
        }
        Ok(Self {
            quarter_length,
            wheels,
        })
    }

    pub fn quarter_length(&self) -> u64 {
        self.quarter_length
    }

    pub fn wheels(&self) -> &[u64] {
        &self.wheels
    }

    /// Number of wheels, `n`.
    pub fn n(&self) -> usize {
        self.wheels.len()
    }

    pub fn max_wheel(&self) -> u64 {
        *self.wheels.last().expect("nonempty by construction")
    }
}

/// A car quarter on a track of a given length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    car: WheelConfig,
    track_length: u64,
}

/// Checks `car` against `track_length` and builds an [`Instance`].
pub fn validate_instance(car: WheelConfig, track_length: u64) -> Result<Instance, ModelError> {
    Instance::new(car, track_length)
}

impl Instance {
    pub fn new(car: WheelConfig, track_length: u64) -> Result<Self, ModelError> {
        if track_length == 0 {
            return Err(ModelError::ZeroTrackLength);
        }
        if track_length < car.quarter_length {
            return Err(ModelError::TrackTooShort {
                track_length,
                quarter_length: car.quarter_length,
            });
        }
        Ok(Self { car, track_length })
    }

    pub fn car(&self) -> &WheelConfig {
        &self.car
    }

    pub fn wheels(&self) -> &[u64] {
        &self.car.wheels
    }

    pub fn n(&self) -> usize {
        self.car.n()
    }

    pub fn track_length(&self) -> u64 {
        self.track_length
    }

    /// Largest valid offset, `ℓ - f`.
    pub fn max_offset(&self) -> u64 {
        self.track_length - self.car.quarter_length
    }

    /// Size of the offset universe `{0..ℓ-f}`.
    pub fn offset_count(&self) -> usize {
        (self.max_offset() + 1) as usize
    }

    pub fn offsets(&self) -> std::ops::RangeInclusive<u64> {
        0..=self.max_offset()
    }

    /// Wheel positions `C + k`.
    pub fn wheel_positions(&self, offset: u64) -> impl Iterator<Item = u64> + '_ {
        self.car.wheels.iter().map(move |w| w + offset)
    }

    /// Offsets whose wheel set contains `pillar`, in increasing order.
    pub fn pillar_cover_set(&self, pillar: u64) -> Result<Vec<u64>, ModelError> {
        if pillar == 0 || pillar > self.track_length {
            return Err(ModelError::PillarOutOfRange {
                pillar,
                track_length: self.track_length,
            });
        }
        let mut offsets: Vec<u64> = self.covered_offsets(pillar).collect();
        offsets.reverse();
        Ok(offsets)
    }

    /// Unchecked variant of [`Instance::pillar_cover_set`]; yields offsets in
    /// decreasing order.
    pub(crate) fn covered_offsets(&self, pillar: u64) -> impl Iterator<Item = u64> + '_ {
        let max_offset = self.max_offset();
        self.car
            .wheels
            .iter()
            .filter_map(move |&w| pillar.checked_sub(w))
            .filter(move |&k| k <= max_offset)
    }

    /// Smallest track that could possibly support this instance: every
    /// pillar covers at most `n` offsets.
    pub fn counting_lower_bound(&self) -> usize {
        self.offset_count().div_ceil(self.n())
    }

    /// Verifies `track` against this instance.
    pub fn coverage(&self, track: &TrackLayout) -> Result<CoverageReport, ModelError> {
        coverage(self, track)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} f={} l={}",
            self.n(),
            self.car.quarter_length,
            self.track_length
        )
    }
}

/// A set of pillar positions on a track.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrackLayout {
    track_length: u64,
    pillars: Vec<u64>,
}

impl TrackLayout {
    pub fn new(track_length: u64, pillars: Vec<u64>) -> Result<Self, ModelError> {
        if track_length == 0 {
            return Err(ModelError::ZeroTrackLength);
        }
        for w in pillars.windows(2) {
            if w[1] == w[0] {
                return Err(ModelError::DuplicatePillar(w[0]));
            }
            if w[1] < w[0] {
                return Err(ModelError::PillarsNotSorted(w[1], w[0]));
            }
        }
        if let Some(&pillar) = pillars.iter().find(|&&p| p == 0 || p > track_length) {
            return Err(ModelError::PillarOutOfRange {
                pillar,
                track_length,
            });
        }
        Ok(Self {
            track_length,
            pillars,
        })
    }

    pub fn empty(track_length: u64) -> Self {
        Self {
            track_length,
            pillars: Vec::new(),
        }
    }

    pub fn full(track_length: u64) -> Self {
        Self {
            track_length,
            pillars: (1..=track_length).collect(),
        }
    }

    /// Builds a layout from a presence mask indexed by position; index 0 is
    /// ignored, so `mask.len()` must be `track_length + 1`.
    pub(crate) fn from_mask(mask: &[bool]) -> Self {
        debug_assert!(!mask.is_empty());
        let pillars = mask
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(p, &on)| on.then_some(p as u64))
            .collect();
        Self {
            track_length: (mask.len() - 1) as u64,
            pillars,
        }
    }

    pub fn track_length(&self) -> u64 {
        self.track_length
    }

    pub fn pillars(&self) -> &[u64] {
        &self.pillars
    }

    pub fn len(&self) -> usize {
        self.pillars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pillars.is_empty()
    }

    pub fn contains(&self, position: u64) -> bool {
        self.pillars.binary_search(&position).is_ok()
    }

    /// Presence mask indexed by position (index 0 unused).
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.track_length as usize + 1];
        for &p in &self.pillars {
            mask[p as usize] = true;
        }
        mask
    }
}

/// Result of checking one track against one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub supported: bool,
    pub failing_offsets: Vec<u64>,
    pub failure_count: usize,
}

/// Exact verifier: reports every offset `k` with `(C + k) ∩ T = ∅`.
pub fn coverage(instance: &Instance, track: &TrackLayout) -> Result<CoverageReport, ModelError> {
    if track.track_length != instance.track_length {
        return Err(ModelError::LengthMismatch {
            track: track.track_length,
            instance: instance.track_length,
        });
    }
    let mask = track.mask();
    let failing_offsets: Vec<u64> = instance
        .offsets()
        .filter(|&k| !instance.wheel_positions(k).any(|p| mask[p as usize]))
        .collect();
    Ok(CoverageReport {
        supported: failing_offsets.is_empty(),
        failure_count: failing_offsets.len(),
        failing_offsets,
    })
}
