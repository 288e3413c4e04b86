//! Run configuration, initial-condition presets and output formats.
//!
//! Configurations are JSON objects, frames are written as JSON Lines and
//! velocity fields as CSV. Floats are written with 17 significant digits so
//! every value round-trips exactly.

pub mod config;
pub mod frames;
pub mod presets;

pub use config::{parse_config, validate_config};
pub use frames::{read_frames, write_frames, FrameWriter};
pub use presets::{build_initial_system, PresetSpec};
