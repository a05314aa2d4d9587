//! Seeded benchmark runs over instance families.
//!
//! A run is a grid of cells `(family, n, algorithm)`. Each cell builds one
//! instance from `(base_seed, family, n)` and runs `seeds` trials, trial `t`
//! seeded from `(base_seed, family, n, algorithm, t)`. Trials are fanned out
//! through [`Exec`]; aggregation happens afterwards in canonical order, so
//! rows are identical for any thread count.

use std::fmt;
use std::time::Instant;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::sample_car;
use crate::builders::{self, alteration_bound, Algorithm};
use crate::exec::Exec;
use crate::model::{coverage, Instance, WheelConfig};
use crate::oracle::min_track_greedy;
use crate::rng::{self, Stream};

/// Longest track a cell may ask for.
pub const MAX_TRACK_LENGTH: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("invalid bench config: {0}")]
    Config(String),
    #[error("{algorithm} produced an unsupported track on {family} n={n} (trial {trial}, {failures} failing offsets)")]
    Unsupported {
        algorithm: BenchAlgorithm,
        family: Family,
        n: u64,
        trial: u64,
        failures: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    EvenSpaced,
    Geometric,
    UniformRandom,
    AdversarialSampled,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::EvenSpaced => "even_spaced",
            Family::Geometric => "geometric",
            Family::UniformRandom => "uniform_random",
            Family::AdversarialSampled => "adversarial_sampled",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A builder, or the greedy minimum-track heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchAlgorithm {
    Even,
    RandomAlterations,
    Conditional,
    LllFixit,
    Minhash,
    GreedyOracle,
}

impl BenchAlgorithm {
    pub fn name(self) -> &'static str {
        match self.builder() {
            Some(a) => a.name(),
            None => "greedy_oracle",
        }
    }

    pub fn builder(self) -> Option<Algorithm> {
        match self {
            BenchAlgorithm::Even => Some(Algorithm::Even),
            BenchAlgorithm::RandomAlterations => Some(Algorithm::RandomAlterations),
            BenchAlgorithm::Conditional => Some(Algorithm::Conditional),
            BenchAlgorithm::LllFixit => Some(Algorithm::LllFixit),
            BenchAlgorithm::Minhash => Some(Algorithm::Minhash),
            BenchAlgorithm::GreedyOracle => None,
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl From<Algorithm> for BenchAlgorithm {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Even => BenchAlgorithm::Even,
            Algorithm::RandomAlterations => BenchAlgorithm::RandomAlterations,
            Algorithm::Conditional => BenchAlgorithm::Conditional,
            Algorithm::LllFixit => BenchAlgorithm::LllFixit,
            Algorithm::Minhash => BenchAlgorithm::Minhash,
        }
    }
}

impl fmt::Display for BenchAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(alias = "family")]
    pub instance_family: Family,
    pub n_list: Vec<u64>,
    /// Track length as a multiple of the quarter length.
    pub length_multiplier: u64,
    /// Trials per cell.
    pub seeds: u64,
    pub algorithms: Vec<BenchAlgorithm>,
    pub base_seed: u64,
    /// Record wall-clock time per trial. Off by default so that output is
    /// byte-reproducible; when off `mean_runtime_ms` is reported as 0.
    #[serde(default)]
    pub timing: bool,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.n_list.is_empty() {
            return bad("n_list is empty");
        }
        if self.n_list.contains(&0) {
            return bad("n_list entries must be positive");
        }
        if self.length_multiplier == 0 {
            return bad("length_multiplier must be positive");
        }
        if self.seeds == 0 {
            return bad("seeds must be positive");
        }
        if self.algorithms.is_empty() {
            return bad("algorithms is empty");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: BenchAlgorithm,
    pub family: Family,
    pub n: u64,
    pub f: u64,
    pub l: u64,
    pub trials: u64,
    pub mean_pillars: f64,
    pub stddev_pillars: f64,
    pub mean_phases: f64,
    pub mean_alterations: f64,
    pub mean_runtime_ms: f64,
    /// `mean_pillars / (ℓ (1 + ln n) / n)` with `n` the instance's wheel count.
    pub bound_ratio: f64,
}

/// A cell that could not be run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedCell {
    pub family: Family,
    pub n: u64,
    pub algorithm: Option<BenchAlgorithm>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    pub skipped: Vec<SkippedCell>,
}

/// Instance for one `(family, n)` cell.
pub fn family_instance(
    family: Family,
    n: u64,
    length_multiplier: u64,
    base_seed: u64,
) -> Result<Instance, String> {
    let seed = rng::bits(base_seed, Stream::Instance, &[family.tag(), n]);
    let car = match family {
        Family::EvenSpaced => WheelConfig::new(2 * n, (1..=n).map(|i| 2 * i).collect()),
        Family::Geometric => {
            if n > 40 {
                return Err(format!("geometric car with n={n} needs f = 2^{}", n - 1));
            }
            let top = 1u64 << (n - 1);
            WheelConfig::new(top.max(2 * n), (0..n).map(|i| 1 << i).collect())
        }
        Family::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut wheels: Vec<u64> = index::sample(&mut rng, 2 * n as usize, n as usize)
                .into_iter()
                .map(|i| i as u64 + 1)
                .collect();
            wheels.sort_unstable();
            WheelConfig::new(2 * n, wheels)
        }
        Family::AdversarialSampled => Ok(sample_car(n, seed).map_err(|e| e.to_string())?.car),
    }
    .map_err(|e| e.to_string())?;
    let track_length = car
        .quarter_length()
        .checked_mul(length_multiplier)
        .filter(|&l| l <= MAX_TRACK_LENGTH)
        .ok_or_else(|| format!("track length exceeds {MAX_TRACK_LENGTH}"))?;
    Instance::new(car, track_length).map_err(|e| e.to_string())
}

struct Cell {
    algorithm: BenchAlgorithm,
    n: u64,
    instance: Instance,
}

struct TrialResult {
    pillars: usize,
    phases: u64,
    alterations: usize,
    runtime_ms: f64,
    failures: usize,
}

fn run_trial(cell: &Cell, seed: u64, timing: bool) -> Result<TrialResult, String> {
    let start = timing.then(Instant::now);
    let (track, phases, alterations) = match cell.algorithm.builder() {
        Some(a) => {
            let out = builders::build(&cell.instance, a, seed).map_err(|e| e.to_string())?;
            (out.track, out.phase_count, out.alteration_count)
        }
        None => {
            let track = min_track_greedy(&cell.instance)
                .track
                .expect("greedy returns a track");
            (track, 0, 0)
        }
    };
    let runtime_ms = start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e3);
    let report = coverage(&cell.instance, &track).expect("track built for this instance");
    Ok(TrialResult {
        pillars: track.len(),
        phases,
        alterations,
        runtime_ms,
        failures: report.failure_count,
    })
}

fn trial_seed(config: &BenchConfig, cell: &Cell, trial: u64) -> u64 {
    rng::bits(
        config.base_seed,
        Stream::Trial,
        &[config.instance_family.tag(), cell.n, cell.algorithm.tag(), trial],
    )
}

pub fn run_bench(config: &BenchConfig, exec: Exec) -> Result<BenchOutput, HarnessError> {
    config.validate()?;
    let family = config.instance_family;
    let mut ns = config.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut algorithms = config.algorithms.clone();
    algorithms.sort_unstable();
    algorithms.dedup();

    let mut output = BenchOutput::default();
    let mut cells = Vec::new();
    for &n in &ns {
        let instance = match family_instance(family, n, config.length_multiplier, config.base_seed) {
            Ok(i) => i,
            Err(reason) => {
                output.skipped.push(SkippedCell {
                    family,
                    n,
                    algorithm: None,
                    reason,
                });
                continue;
            }
        };
        for &algorithm in &algorithms {
            if algorithm == BenchAlgorithm::Even
                && builders::even_parameters(instance.car()).is_none()
            {
                output.skipped.push(SkippedCell {
                    family,
                    n,
                    algorithm: Some(algorithm),
                    reason: "even builder needs an evenly spaced car".into(),
                });
                continue;
            }
            cells.push(Cell {
                algorithm,
                n,
                instance: instance.clone(),
            });
        }
    }

    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..config.seeds).map(move |t| (c, t)))
        .collect();
    let results = exec.map(jobs, |(c, t)| {
        let cell = &cells[c];
        run_trial(cell, trial_seed(config, cell, t), config.timing)
    });

    for (c, cell) in cells.iter().enumerate() {
        let chunk = &results[c * config.seeds as usize..(c + 1) * config.seeds as usize];
        let mut trials = Vec::with_capacity(chunk.len());
        let mut failed = None;
        for (t, r) in chunk.iter().enumerate() {
            match r {
                Ok(r) if r.failures > 0 => {
                    return Err(HarnessError::Unsupported {
                        algorithm: cell.algorithm,
                        family,
                        n: cell.n,
                        trial: t as u64,
                        failures: r.failures,
                    })
                }
                Ok(r) => trials.push(r),
                Err(e) => {
                    failed = Some(e.clone());
                    break;
                }
            }
        }
        if let Some(reason) = failed {
            output.skipped.push(SkippedCell {
                family,
                n: cell.n,
                algorithm: Some(cell.algorithm),
                reason,
            });
            continue;
        }
        output.rows.push(aggregate(cell, family, &trials));
    }
    Ok(output)
}

fn aggregate(cell: &Cell, family: Family, trials: &[&TrialResult]) -> BenchRow {
    let count = trials.len() as f64;
    let mean = |f: &dyn Fn(&TrialResult) -> f64| trials.iter().map(|t| f(t)).sum::<f64>() / count;
    let mean_pillars = mean(&|t| t.pillars as f64);
    let stddev_pillars = if trials.len() > 1 {
        (trials
            .iter()
            .map(|t| (t.pillars as f64 - mean_pillars).powi(2))
            .sum::<f64>()
            / (count - 1.0))
            .sqrt()
    } else {
        0.0
    };
    let instance = &cell.instance;
    BenchRow {
        algorithm: cell.algorithm,
        family,
        n: cell.n,
        f: instance.car().quarter_length(),
        l: instance.track_length(),
        trials: trials.len() as u64,
        mean_pillars,
        stddev_pillars,
        mean_phases: mean(&|t| t.phases as f64),
        mean_alterations: mean(&|t| t.alterations as f64),
        mean_runtime_ms: mean(&|t| t.runtime_ms),
        bound_ratio: mean_pillars / alteration_bound(instance.n(), instance.track_length()),
    }
}
