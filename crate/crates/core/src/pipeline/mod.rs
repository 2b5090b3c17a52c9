//! End-to-end processing shared by the command-line tools.

mod config;
mod log;

pub use config::{
    parse_finite, parse_interval, parse_intrinsics, parse_pose, ConfigError, RunConfig,
    DEFAULT_WATCH_INTERVAL,
};
pub use log::{
    fixed2, format_record, read_fusion_log, write_fusion_log, LogError, FUSION_LOG_HEADER,
};

use crate::geometry::{GeometryError, Intrinsics, Pose};
use crate::hotspot::{detect_blobs, localize_hotspot, Hotspot};
use crate::thermal::{decode_raw_to_celsius, RawThermalFrame};

/// Decodes a raw frame, extracts hotspots above `threshold_c` and places each
/// one in the world using a single depth reading.
pub fn locate_hotspots(
    frame: &RawThermalFrame,
    threshold_c: f64,
    depth_mm: f64,
    k: &Intrinsics,
    pose: Pose,
) -> Result<Vec<Hotspot>, GeometryError> {
    let celsius = decode_raw_to_celsius(frame);
    detect_blobs(&celsius, threshold_c)
        .iter()
        .map(|blob| localize_hotspot(blob, depth_mm, k, pose))
        .collect()
}
