//! JSON car and track files.
//!
//! ```text
//! {"quarter_length":2,"wheels":[1,2]}
//! {"track_length":4,"pillars":[2,4]}
//! ```
//!
//! Encoding is compact with fields in the order above. Decoding rejects
//! unknown keys and then applies the same checks as the in-memory types.

use serde::{Deserialize, Serialize};
use serde_json::error::Category;
use thiserror::Error;

use crate::harness::BenchRow;
use crate::model::{ModelError, TrackLayout, WheelConfig};

pub const BENCH_CSV_HEADER: &str = "algorithm,family,n,f,l,trials,mean_pillars,stddev_pillars,mean_phases,mean_alterations,mean_runtime_ms,bound_ratio";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("malformed text: {0}")]
    Malformed(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarFile {
    quarter_length: u64,
    wheels: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrackFile {
    track_length: u64,
    pillars: Vec<u64>,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, CodecError> {
    serde_json::from_str(text).map_err(|e| match e.classify() {
        Category::Data => CodecError::Schema(e.to_string()),
        _ => CodecError::Malformed(e.to_string()),
    })
}

pub fn encode_car(car: &WheelConfig) -> String {
    serde_json::to_string(&CarFile {
        quarter_length: car.quarter_length(),
        wheels: car.wheels().to_vec(),
    })
    .expect("plain integers serialize")
}

pub fn decode_car(text: &str) -> Result<WheelConfig, CodecError> {
    let file: CarFile = parse(text)?;
    Ok(WheelConfig::new(file.quarter_length, file.wheels)?)
}

pub fn encode_track(track: &TrackLayout) -> String {
    serde_json::to_string(&TrackFile {
        track_length: track.track_length(),
        pillars: track.pillars().to_vec(),
    })
    .expect("plain integers serialize")
}

pub fn decode_track(text: &str) -> Result<TrackLayout, CodecError> {
    let file: TrackFile = parse(text)?;
    Ok(TrackLayout::new(file.track_length, file.pillars)?)
}

/// Bench rows as CSV: fixed header, LF line endings, fixed decimal places.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(BENCH_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.3},{:.6}\n",
            r.algorithm,
            r.family,
            r.n,
            r.f,
            r.l,
            r.trials,
            r.mean_pillars,
            r.stddev_pillars,
            r.mean_phases,
            r.mean_alterations,
            r.mean_runtime_ms,
            r.bound_ratio
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn car_round_trip() {
        let car = WheelConfig::new(2, vec![1, 2]).unwrap();
        let text = encode_car(&car);
        assert_eq!(text, r#"{"quarter_length":2,"wheels":[1,2]}"#);
        assert_eq!(decode_car(&text).unwrap(), car);
    }

    #[test]
    fn diagnostics_are_distinct() {
        let err = decode_car(r#"{"quarter_length":2,"wheels":[2,1]}"#).unwrap_err();
        assert!(matches!(err, CodecError::Invalid(ModelError::WheelsNotSorted(1, 2))));
        assert!(err.to_string().starts_with("wheels not sorted"));

        let err = decode_track(r#"{"track_length":4,"pillars":[5]}"#).unwrap_err();
        assert!(err.to_string().starts_with("pillar out of range"));

        assert!(matches!(
            decode_car(r#"{"quarter_length":2,"wheels":[1,2],"extra":1}"#),
            Err(CodecError::Schema(_))
        ));
        assert!(matches!(
            decode_car(r#"{"quarter_length":2}"#),
            Err(CodecError::Schema(_))
        ));
        assert!(matches!(
            decode_track(r#"{"track_length":4,"pillars":[-1]}"#),
            Err(CodecError::Schema(_))
        ));
        assert!(matches!(
            decode_track(r#"{"track_length":4,"pillars":[1"#),
            Err(CodecError::Malformed(_))
        ));
        assert!(matches!(decode_car("wheels: 1 2"), Err(CodecError::Malformed(_))));
    }

    #[test]
    fn whitespace_and_newlines_accepted() {
        let t = decode_track("{ \"track_length\": 4,\n \"pillars\": [2, 4] }\n").unwrap();
        assert_eq!(encode_track(&t), r#"{"track_length":4,"pillars":[2,4]}"#);
    }

    proptest! {
        #[test]
        fn track_encoding_is_canonical(
            len in 1u64..200,
            picks in proptest::collection::btree_set(1u64..200, 0..40),
        ) {
            let pillars: Vec<u64> = picks.into_iter().filter(|&p| p <= len).collect();
            let track = TrackLayout::new(len, pillars).unwrap();
            let text = encode_track(&track);
            let back = decode_track(&text).unwrap();
            prop_assert_eq!(&back, &track);
            prop_assert_eq!(encode_track(&back), text);
        }

        #[test]
        fn car_encoding_is_canonical(
            f in 1u64..100,
            picks in proptest::collection::btree_set(1u64..100, 1..20),
        ) {
            let wheels: Vec<u64> = picks.into_iter().filter(|&w| w <= f).collect();
            prop_assume!(!wheels.is_empty());
            let car = WheelConfig::new(f, wheels).unwrap();
            let text = encode_car(&car);
            let back = decode_car(&text).unwrap();
            prop_assert_eq!(&back, &car);
            prop_assert_eq!(encode_car(&back), text);
        }
    }
}
