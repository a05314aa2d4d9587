//! Random adversarial cars and the fall-through statistic.
//!
//! A car quarter of length `2n` gets a wheel at each position independently
//! with probability 1/2 and runs over a track of length `4n`. For a fixed
//! track `T`, `Y` counts the offsets `k ∈ {0..2n}` where the car falls
//! through. This module computes `E[Y]` exactly, checks its concentration
//! empirically against McDiarmid's tail, and measures how the exact minimum
//! track grows with `n`.

use thiserror::Error;

use crate::exec::Exec;
use crate::model::{coverage, Instance, TrackLayout, WheelConfig};
use crate::oracle::{min_track_exact, SearchStatus};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("n must be positive")]
    ZeroN,
    #[error("track position {pillar} outside 1..={limit}")]
    PillarOutOfRange { pillar: u64, limit: u64 },
    #[error("track length {got} differs from 4n = {expected}")]
    TrackLength { got: u64, expected: u64 },
    #[error("trial count must be positive")]
    NoTrials,
}

/// The `f = 2n`, `ℓ = 4n` regime with wheel probability 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdversarySetup {
    n: u64,
}

impl AdversarySetup {
    pub fn new(n: u64) -> Result<Self, AdversaryError> {
        if n == 0 {
            return Err(AdversaryError::ZeroN);
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn quarter_length(&self) -> u64 {
        2 * self.n
    }

    pub fn track_length(&self) -> u64 {
        4 * self.n
    }

    pub fn wheel_probability(&self) -> f64 {
        0.5
    }

    pub fn instance(&self, car: WheelConfig) -> Instance {
        Instance::new(car, self.track_length()).expect("2n-foot car fits a 4n-foot track")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledCar {
    pub car: WheelConfig,
    /// Empty draws discarded before this car.
    pub redraws: u32,
}

/// Samples a car on `{1..2n}` with each wheel present with probability 1/2.
/// Empty draws are redrawn from derived seeds.
pub fn sample_car(n: u64, seed: u64) -> Result<SampledCar, AdversaryError> {
    if n == 0 {
        return Err(AdversaryError::ZeroN);
    }
    let mut redraws = 0u32;
    loop {
        let draw_seed = if redraws == 0 {
            seed
        } else {
            rng::bits(seed, Stream::CarRedraw, &[redraws as u64])
        };
        let wheels: Vec<u64> = (1..=2 * n)
            .filter(|&i| rng::bits(draw_seed, Stream::CarWheel, &[i]) >> 63 == 1)
            .collect();
        if let Ok(car) = WheelConfig::new(2 * n, wheels) {
            return Ok(SampledCar { car, redraws });
        }
        redraws += 1;
    }
}

fn check_track(setup: &AdversarySetup, track: &TrackLayout) -> Result<(), AdversaryError> {
    let limit = setup.track_length();
    match track.pillars().iter().find(|&&p| p > limit) {
        Some(&pillar) => Err(AdversaryError::PillarOutOfRange { pillar, limit }),
        None => Ok(()),
    }
}

/// Exact `E[Y]` over the unconditioned wheel distribution:
/// `Σ_{k=0}^{2n} 2^{-|(T-k) ∩ {1..2n}|}`.
pub fn expected_y_exact(setup: &AdversarySetup, track: &TrackLayout) -> Result<f64, AdversaryError> {
    check_track(setup, track)?;
    let width = setup.quarter_length();
    Ok((0..=width)
        .map(|k| {
            let hits = track
                .pillars()
                .iter()
                .filter(|&&t| t > k && t - k <= width)
                .count();
            0.5f64.powi(hits as i32)
        })
        .sum())
}

/// McDiarmid tail `min(1, 2 exp(-2 S² / m))`.
pub fn mcdiarmid_tail(s: f64, m: u64) -> f64 {
    (2.0 * (-2.0 * s * s / m as f64).exp()).min(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub s: f64,
    pub empirical_frequency: f64,
    pub mcdiarmid_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub trials: usize,
    pub exact_mean: f64,
    pub empirical_mean: f64,
    /// Sample standard deviation of `Y`.
    pub empirical_stddev: f64,
    pub lipschitz_r: f64,
    pub deviation_table: Vec<DeviationRow>,
}

impl ConcentrationReport {
    pub fn standard_error(&self) -> f64 {
        self.empirical_stddev / (self.trials as f64).sqrt()
    }
}

/// Samples `trials` cars and tabulates how often `|Y - E[Y]| ≥ R·S` with
/// `R = |T|`, next to the McDiarmid bound for `m = 2n` wheel variables.
///
/// Only strictly positive deviations are counted, so a constant `Y` (as with
/// an empty track, where `R = 0`) never registers as a deviation.
pub fn concentration_trial(
    setup: &AdversarySetup,
    track: &TrackLayout,
    trials: usize,
    seed: u64,
    s_grid: &[f64],
) -> Result<ConcentrationReport, AdversaryError> {
    if trials == 0 {
        return Err(AdversaryError::NoTrials);
    }
    if track.track_length() != setup.track_length() {
        return Err(AdversaryError::TrackLength {
            got: track.track_length(),
            expected: setup.track_length(),
        });
    }
    let exact_mean = expected_y_exact(setup, track)?;
    let ys: Vec<f64> = (0..trials as u64)
        .map(|t| {
            let car = sample_car(setup.n(), rng::bits(seed, Stream::Trial, &[t]))
                .expect("n validated by setup")
                .car;
            coverage(&setup.instance(car), track)
                .expect("lengths match")
                .failure_count as f64
        })
        .collect();
    let count = ys.len() as f64;
    let empirical_mean = ys.iter().sum::<f64>() / count;
    let empirical_stddev = if ys.len() > 1 {
        (ys.iter().map(|y| (y - empirical_mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
    } else {
        0.0
    };
    let lipschitz_r = track.len() as f64;
    let m = 2 * setup.n();
    let deviation_table = s_grid
        .iter()
        .map(|&s| {
            let threshold = lipschitz_r * s;
            let hits = ys
                .iter()
                .map(|y| (y - exact_mean).abs())
                .filter(|&d| d > 0.0 && d >= threshold)
                .count();
            DeviationRow {
                s,
                empirical_frequency: hits as f64 / count,
                mcdiarmid_bound: mcdiarmid_tail(s, m),
            }
        })
        .collect();
    Ok(ConcentrationReport {
        trials,
        exact_mean,
        empirical_mean,
        empirical_stddev,
        lipschitz_r,
        deviation_table,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepTrial {
    pub wheels: usize,
    /// Exact minimum size when the search finished, else the best found.
    pub min_track: usize,
    pub status: SearchStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundRow {
    pub n: u64,
    pub trials: usize,
    pub median_min_track: f64,
    pub mean_min_track: f64,
    pub min_min_track: usize,
    pub max_min_track: usize,
    /// Sampled cars with fewer than `n` wheels.
    pub discarded_small_cars: usize,
    /// Trials whose search stopped at the node limit.
    pub capped_trials: usize,
    pub samples: Vec<SweepTrial>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub rows: Vec<LowerBoundRow>,
}

impl LowerBoundReport {
    /// One line per `n`, comma separated, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,trials,median_min_track,mean_min_track,min_min_track,max_min_track,discarded_small_cars,capped_trials\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.1},{:.4},{},{},{},{}\n",
                r.n,
                r.trials,
                r.median_min_track,
                r.mean_min_track,
                r.min_min_track,
                r.max_min_track,
                r.discarded_small_cars,
                r.capped_trials
            ));
        }
        out
    }
}

fn median(sorted: &[usize]) -> f64 {
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2] as f64
    } else {
        (sorted[m / 2 - 1] + sorted[m / 2]) as f64 / 2.0
    }
}

/// For each `n`, draws cars until `trials_per_n` of them have at least `n`
/// wheels and solves each exactly on the `4n`-foot track.
///
/// Car `a` for a given `n` comes from seed `(seed, n, a)`, so the set of
/// qualifying cars does not depend on how the solves are scheduled.
pub fn lowerbound_sweep(
    n_list: &[u64],
    trials_per_n: usize,
    seed: u64,
    exec: Exec,
) -> Result<LowerBoundReport, AdversaryError> {
    if trials_per_n == 0 {
        return Err(AdversaryError::NoTrials);
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();

    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let setup = AdversarySetup::new(n)?;
        let mut cars = Vec::with_capacity(trials_per_n);
        let mut discarded = 0;
        let mut attempt = 0u64;
        while cars.len() < trials_per_n {
            let car = sample_car(n, rng::bits(seed, Stream::Trial, &[n, attempt]))?.car;
            attempt += 1;
            if (car.n() as u64) < n {
                discarded += 1;
            } else {
                cars.push(car);
            }
        }

        let samples: Vec<SweepTrial> = exec.map(cars, |car| {
            let wheels = car.n();
            let result = min_track_exact(&setup.instance(car), None);
            SweepTrial {
                wheels,
                min_track: result.size().expect("uncapped search keeps the greedy track"),
                status: result.status,
            }
        });

        let mut sizes: Vec<usize> = samples.iter().map(|s| s.min_track).collect();
        sizes.sort_unstable();
        rows.push(LowerBoundRow {
            n,
            trials: samples.len(),
            median_min_track: median(&sizes),
            mean_min_track: sizes.iter().sum::<usize>() as f64 / sizes.len() as f64,
            min_min_track: sizes[0],
            max_min_track: *sizes.last().expect("nonempty"),
            discarded_small_cars: discarded,
            capped_trials: samples
                .iter()
                .filter(|s| s.status != SearchStatus::Optimal)
                .count(),
            samples,
        });
    }
    Ok(LowerBoundReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: u64) -> AdversarySetup {
        AdversarySetup::new(n).unwrap()
    }

    #[test]
    fn expected_y_small_examples() {
        let s = setup(1);
        let t = TrackLayout::new(4, vec![2]).unwrap();
        assert_eq!(expected_y_exact(&s, &t).unwrap(), 2.0);
        assert_eq!(expected_y_exact(&s, &TrackLayout::full(4)).unwrap(), 0.75);
        let s = setup(5);
        assert_eq!(expected_y_exact(&s, &TrackLayout::empty(20)).unwrap(), 11.0);
    }

    #[test]
    fn expected_y_rejects_far_pillars() {
        let s = setup(2);
        let t = TrackLayout::new(9, vec![9]).unwrap();
        assert_eq!(
            expected_y_exact(&s, &t),
            Err(AdversaryError::PillarOutOfRange { pillar: 9, limit: 8 })
        );
    }

    #[test]
    fn mcdiarmid_values() {
        assert!((mcdiarmid_tail(1.0, 2) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert!((mcdiarmid_tail(1.0, 2) - 0.73576).abs() < 1e-5);
        assert_eq!(mcdiarmid_tail(1e-9, 10), 1.0);
        let n = 256f64;
        let s = n.powf(5.0 / 8.0);
        let expect = 2.0 * (-n.powf(0.25)).exp();
        assert!((mcdiarmid_tail(s, 512) - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn sample_car_is_deterministic() {
        let a = sample_car(4, 1234).unwrap();
        let b = sample_car(4, 1234).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.car.quarter_length(), 8);
        assert!(a.car.wheels().iter().all(|&w| (1..=8).contains(&w)));
    }

    #[test]
    fn sample_car_redraws_empty() {
        // n = 1 gives an empty draw a quarter of the time.
        let first_redraw = (0..200u64)
            .map(|s| sample_car(1, s).unwrap())
            .find(|c| c.redraws > 0)
            .expect("some seed draws an empty car");
        assert!(first_redraw.car.n() >= 1);
    }

    #[test]
    fn empty_track_has_constant_y() {
        let s = setup(3);
        let r = concentration_trial(&s, &TrackLayout::empty(12), 200, 9, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(r.exact_mean, 7.0);
        assert_eq!(r.empirical_mean, 7.0);
        assert_eq!(r.lipschitz_r, 0.0);
        assert!(r.deviation_table.iter().all(|d| d.empirical_frequency == 0.0));
    }

    #[test]
    fn sweep_n1() {
        let r = lowerbound_sweep(&[1], 20, 3, Exec::Sequential).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.trials, 20);
        for t in &row.samples {
            assert!((2..=3).contains(&t.min_track));
            assert_eq!(t.status, SearchStatus::Optimal);
        }
        let i = setup(1).instance(WheelConfig::new(2, vec![1, 2]).unwrap());
        assert_eq!(min_track_exact(&i, None).size(), Some(2));
    }
}
