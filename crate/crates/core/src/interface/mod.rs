//! File formats, text rendering and the command-line front end.

pub mod cli;
pub mod codec;
pub mod render;

pub use codec::{bench_csv, decode_car, decode_track, encode_car, encode_track, CodecError};
pub use render::render_ascii;
