//! One-character-per-foot pictures of a track.
//!
//! The first line shows `#` for a pillar and `.` for a gap. Given a car and
//! an offset, a second line marks each wheel: `W` when it rests on a pillar,
//! `w` when it hangs over a gap.

use thiserror::Error;

use crate::model::{Instance, TrackLayout};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("offset {offset} out of range 0..={max}")]
    OffsetOutOfRange { offset: u64, max: u64 },
    #[error("track length {track} does not match instance length {instance}")]
    LengthMismatch { track: u64, instance: u64 },
}

pub fn render_ascii(
    track: &TrackLayout,
    car_at: Option<(&Instance, u64)>,
) -> Result<String, RenderError> {
    let mask = track.mask();
    let mut out: String = mask[1..].iter().map(|&on| if on { '#' } else { '.' }).collect();
    if let Some((instance, offset)) = car_at {
        if instance.track_length() != track.track_length() {
            return Err(RenderError::LengthMismatch {
                track: track.track_length(),
                instance: instance.track_length(),
            });
        }
        if offset > instance.max_offset() {
            return Err(RenderError::OffsetOutOfRange {
                offset,
                max: instance.max_offset(),
            });
        }
        let mut line = vec![' '; track.track_length() as usize];
        for p in instance.wheel_positions(offset) {
            line[p as usize - 1] = if mask[p as usize] { 'W' } else { 'w' };
        }
        let line: String = line.into_iter().collect();
        out.push('\n');
        out.push_str(line.trim_end());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WheelConfig;

    #[test]
    fn track_only() {
        let t = TrackLayout::new(4, vec![2, 4]).unwrap();
        assert_eq!(render_ascii(&t, None).unwrap(), ".#.#");
        assert_eq!(render_ascii(&TrackLayout::empty(3), None).unwrap(), "...");
        assert_eq!(render_ascii(&TrackLayout::full(5), None).unwrap(), "#####");
    }

    #[test]
    fn with_car() {
        let i = Instance::new(WheelConfig::new(2, vec![1, 2]).unwrap(), 4).unwrap();
        let t = TrackLayout::new(4, vec![3]).unwrap();
        assert_eq!(render_ascii(&t, Some((&i, 0))).unwrap(), "..#.\nww");
        assert_eq!(render_ascii(&t, Some((&i, 1))).unwrap(), "..#.\n wW");
        assert_eq!(
            render_ascii(&t, Some((&i, 3))),
            Err(RenderError::OffsetOutOfRange { offset: 3, max: 2 })
        );
    }
}
