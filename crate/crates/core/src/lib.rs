//! Sparse pillar tracks for train cars with arbitrary wheel offsets.
//!
//! A track of length `ℓ` is built from one-foot pillars at integer positions.
//! It supports a car quarter with wheels at offsets `C` when, for every
//! position `k` of the quarter along the track, some wheel in `C + k` rests on
//! a pillar. The crate provides the exact verifier ([`model`]), five
//! constructions ([`builders`]), exact and greedy minimum-track solvers
//! ([`oracle`]), lower-bound experiments over random cars ([`adversary`]), a
//! seeded benchmark grid ([`harness`]), and the file formats and CLI around
//! them ([`interface`]).
//!
//! With the default `parallel` feature, sweeps and benchmarks can spread
//! trials over a rayon pool; results are identical to sequential runs.

pub mod adversary;
pub mod builders;
pub mod exec;
pub mod harness;
pub mod interface;
pub mod model;
pub mod oracle;
pub mod rng;

pub use builders::{Algorithm, BuildError, BuildOutcome};
pub use exec::Exec;
pub use model::{
    coverage, validate_instance, CoverageReport, Instance, ModelError, TrackLayout, WheelConfig,
};
pub use oracle::{min_track_exact, min_track_greedy, OracleResult};
