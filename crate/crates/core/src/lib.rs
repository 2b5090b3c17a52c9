//! Thermal and depth sensor fusion.
//!
//! Raw radiometric frames are decoded to temperatures, thresholded into
//! hotspot blobs and placed in 3D with a pinhole back-projection driven by a
//! depth reading. Depth can come from a single-beam laser, a planar angular
//! scan or a full point cloud; scans and clouds are fused point-by-point into
//! temperature-tagged records.
//!
//! ```
//! use thermfuse::geometry::{Intrinsics, Pose};
//! use thermfuse::pipeline::locate_hotspots;
//! use thermfuse::thermal::RawThermalFrame;
//!
//! let k = Intrinsics::new(100.0, 100.0, 80.0, 60.0).unwrap();
//! let mut counts = vec![29315u16; 160 * 120]; // 20 °C
//! counts[60 * 160 + 80] = 31730; // 44.15 °C at the optical center
//! let frame = RawThermalFrame::new(160, 120, counts).unwrap();
//!
//! let hotspots = locate_hotspots(&frame, 40.0, 710.0, &k, Pose::default()).unwrap();
//! assert_eq!(hotspots.len(), 1);
//! assert_eq!(hotspots[0].world.z, 710.0);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod depth;
pub mod geometry;
pub mod hotspot;
pub mod pipeline;
pub mod sim;
mod stats;
pub mod thermal;

pub use depth::{
    CloudPoint, DepthSample1D, FovConfig, FusedRecord, PointCloud, Scan2D, ScanParams,
};
pub use geometry::{CameraPoint, Intrinsics, PixelCoord, Pose, WorldPoint};
pub use hotspot::{Blob, Hotspot, TemperatureStats};
pub use stats::{EmptySamples, SampleSummary};
pub use thermal::{CelsiusFrame, RawThermalFrame};
