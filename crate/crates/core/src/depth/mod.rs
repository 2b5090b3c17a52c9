//! Depth modalities: single-beam range samples, planar angular scans and 3D
//! point clouds, plus their fusion with a temperature frame.

mod cloud;
mod csv;
mod scan;

use std::time::Duration;

use thiserror::Error;

use crate::geometry::{CameraPoint, PixelCoord};
use crate::stats::{summarize, EmptySamples, SampleSummary};

pub use cloud::{fuse_cloud, CloudFilterConfig, CloudFusion, CloudPoint, CloudSummary, PointCloud};
pub use csv::{
    parse_cloud, parse_depth_samples, parse_scan, write_cloud, write_depth_samples, write_scan,
};
pub use scan::{
    filter_scan_to_fov, scan_to_fused, step_to_alpha, FovConfig, Scan2D, ScanFusion, ScanParams,
    ScanReturn, ScanSummary,
};

/// Maximum range of the single-beam laser, in mm.
pub const MAX_RANGE_1D_MM: f64 = 40_000.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DepthError {
    #[error("depth sample {0} mm is outside (0, {MAX_RANGE_1D_MM}] mm")]
    SampleOutOfRange(f64),
    #[error("step {step} is outside 0..{step_count}")]
    StepOutOfRange { step: usize, step_count: usize },
    #[error("invalid scan parameters: {0}")]
    InvalidScanParams(String),
    #[error("field of view must lie in (0°, 180°), got {0}°")]
    InvalidFov(f64),
    #[error("intensity threshold must be non-negative, got {0}")]
    InvalidIntensityMin(f64),
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: bad metadata: {reason}")]
    BadMetadata { line: usize, reason: String },
    #[error(transparent)]
    Empty(#[from] EmptySamples),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for DepthError {
    fn from(e: std::io::Error) -> Self {
        DepthError::Io(e.to_string())
    }
}

/// One reading of the single-beam laser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthSample1D {
    depth_mm: f64,
    timestamp: Duration,
}

impl DepthSample1D {
    pub fn new(depth_mm: f64, timestamp: Duration) -> Result<Self, DepthError> {
        if !(depth_mm > 0.0 && depth_mm <= MAX_RANGE_1D_MM) {
            return Err(DepthError::SampleOutOfRange(depth_mm));
        }
        Ok(Self {
            depth_mm,
            timestamp,
        })
    }

    pub fn depth_mm(&self) -> f64 {
        self.depth_mm
    }

    /// Monotonic time since the start of acquisition.
    pub fn timestamp(&self) -> Duration {
        self.timestamp
    }
}

pub type DepthAggregate = SampleSummary;

/// Mean and sample standard deviation of a burst of 1D depth readings.
pub fn aggregate_depth(samples: &[DepthSample1D]) -> Result<DepthAggregate, EmptySamples> {
    summarize(samples.iter().map(DepthSample1D::depth_mm))
}

/// A temperature paired with the pixel and camera-frame point it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusedRecord {
    pub t_celsius: f64,
    pub pixel: PixelCoord,
    pub camera: CameraPoint,
    /// Straight-line distance from the sensor to the point, in mm.
    pub range_d: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(values: &[f64]) -> Vec<DepthSample1D> {
        values
            .iter()
            .enumerate()
            .map(|(i, &d)| DepthSample1D::new(d, Duration::from_millis(i as u64)).unwrap())
            .collect()
    }

    #[test]
    fn aggregate_examples() {
        let a = aggregate_depth(&samples(&[858.8; 1400])).unwrap();
        assert_eq!((a.mean, a.std, a.n), (858.8, 0.0, 1400));
        let a = aggregate_depth(&samples(&[4067.6, 4075.6, 4083.6])).unwrap();
        assert!((a.mean - 4075.6).abs() < 1e-9);
        assert!((a.std - 8.0).abs() < 1e-9);
        assert_eq!(a.n, 3);
        assert_eq!(aggregate_depth(&[]), Err(EmptySamples));
    }

    #[test]
    fn sample_range_is_enforced() {
        assert!(DepthSample1D::new(0.0, Duration::ZERO).is_err());
        assert!(DepthSample1D::new(40_000.1, Duration::ZERO).is_err());
        assert!(DepthSample1D::new(40_000.0, Duration::ZERO).is_ok());
        assert!(DepthSample1D::new(f64::NAN, Duration::ZERO).is_err());
    }
}
