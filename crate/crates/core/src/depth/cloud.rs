//! 3D point clouds expressed in the camera frame.

use crate::geometry::{euclidean_range, project, CameraPoint, Intrinsics};
use crate::thermal::CelsiusFrame;

use super::{DepthError, FusedRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Laser return intensity, unitless.
    pub intensity: f64,
}

impl CloudPoint {
    pub const fn new(x: f64, y: f64, z: f64, intensity: f64) -> Self {
        Self { x, y, z, intensity }
    }

    pub fn camera(&self) -> CameraPoint {
        CameraPoint::new(self.x, self.y, self.z)
    }
}

pub type PointCloud = Vec<CloudPoint>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudFilterConfig {
    intensity_min: f64,
}

impl CloudFilterConfig {
    pub const DEFAULT_INTENSITY_MIN: f64 = 100.0;

    pub fn new(intensity_min: f64) -> Result<Self, DepthError> {
        if !(intensity_min >= 0.0 && intensity_min.is_finite()) {
            return Err(DepthError::InvalidIntensityMin(intensity_min));
        }
        Ok(Self { intensity_min })
    }

    pub fn intensity_min(&self) -> f64 {
        self.intensity_min
    }
}

impl Default for CloudFilterConfig {
    fn default() -> Self {
        Self {
            intensity_min: Self::DEFAULT_INTENSITY_MIN,
        }
    }
}

/// Where each input point ended up. The four counts always sum to the input
/// size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CloudSummary {
    pub fused: usize,
    pub excluded_intensity: usize,
    pub excluded_depth: usize,
    pub excluded_bounds: usize,
}

impl CloudSummary {
    pub fn total(&self) -> usize {
        self.fused + self.excluded_intensity + self.excluded_depth + self.excluded_bounds
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudFusion {
    pub records: Vec<FusedRecord>,
    pub summary: CloudSummary,
}

enum Outcome {
    Fused(FusedRecord),
    LowIntensity,
    BehindCamera,
    OutOfFrame,
}

fn classify(
    p: &CloudPoint,
    filt: &CloudFilterConfig,
    k: &Intrinsics,
    frame: &CelsiusFrame,
) -> Outcome {
    // NaN intensities fail this comparison and are culled with the weak returns.
    if !(p.intensity >= filt.intensity_min) {
        return Outcome::LowIntensity;
    }
    let camera = p.camera();
    let Ok(pixel) = project(camera, k) else {
        return Outcome::BehindCamera;
    };
    let Some((col, row)) = frame.nearest_pixel(pixel) else {
        return Outcome::OutOfFrame;
    };
    Outcome::Fused(FusedRecord {
        t_celsius: frame.get(col, row).expect("nearest_pixel is in bounds"),
        pixel,
        camera,
        range_d: euclidean_range(camera),
    })
}

/// Culls weak returns, points behind the camera and points projecting outside
/// the frame; the rest are paired with their temperature. Input order is kept.
pub fn fuse_cloud(
    cloud: &[CloudPoint],
    filt: &CloudFilterConfig,
    k: &Intrinsics,
    frame: &CelsiusFrame,
) -> CloudFusion {
    let mut summary = CloudSummary::default();
    let mut records = Vec::new();
    for p in cloud {
        match classify(p, filt, k, frame) {
            Outcome::Fused(r) => records.push(r),
            Outcome::LowIntensity => summary.excluded_intensity += 1,
            Outcome::BehindCamera => summary.excluded_depth += 1,
            Outcome::OutOfFrame => summary.excluded_bounds += 1,
        }
    }
    summary.fused = records.len();
    CloudFusion { records, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k() -> Intrinsics {
        Intrinsics::new(100.0, 100.0, 80.0, 60.0).unwrap()
    }

    fn hot_frame() -> CelsiusFrame {
        CelsiusFrame::filled(160, 120, 44.15).unwrap()
    }

    #[test]
    fn axis_point_is_fused() {
        let out = fuse_cloud(
            &[CloudPoint::new(0.0, 0.0, 1000.0, 255.0)],
            &CloudFilterConfig::default(),
            &k(),
            &hot_frame(),
        );
        assert_eq!(out.records.len(), 1);
        let r = out.records[0];
        assert_eq!(r.t_celsius, 44.15);
        assert_eq!((r.pixel.x, r.pixel.y), (80.0, 60.0));
        assert_eq!(r.camera, CameraPoint::new(0.0, 0.0, 1000.0));
        assert_eq!(r.range_d, 1000.0);
    }

    #[test]
    fn culling_reasons() {
        let cloud = [
            CloudPoint::new(0.0, 0.0, 1000.0, 99.0),
            CloudPoint::new(-2000.0, 0.0, 1000.0, 255.0),
            CloudPoint::new(0.0, 0.0, -5.0, 255.0),
            CloudPoint::new(0.0, 0.0, 0.0, 255.0),
            CloudPoint::new(0.0, 0.0, 1000.0, 100.0),
        ];
        let out = fuse_cloud(&cloud, &CloudFilterConfig::default(), &k(), &hot_frame());
        assert_eq!(
            out.summary,
            CloudSummary {
                fused: 1,
                excluded_intensity: 1,
                excluded_depth: 2,
                excluded_bounds: 1
            }
        );
        assert_eq!(out.summary.total(), cloud.len());
    }

    #[test]
    fn intensity_threshold_is_configurable() {
        assert!(CloudFilterConfig::new(-1.0).is_err());
        let filt = CloudFilterConfig::new(0.0).unwrap();
        let out = fuse_cloud(
            &[CloudPoint::new(0.0, 0.0, 1000.0, 0.0)],
            &filt,
            &k(),
            &hot_frame(),
        );
        assert_eq!(out.summary.fused, 1);
    }

    fn cloud_point() -> impl Strategy<Value = CloudPoint> {
        (
            -3000.0..3000.0f64,
            -3000.0..3000.0f64,
            -500.0..5000.0f64,
            0.0..255.0f64,
        )
            .prop_map(|(x, y, z, i)| CloudPoint::new(x, y, z, i))
    }

    proptest! {
        #[test]
        fn culling_is_exhaustive_and_sound(cloud in proptest::collection::vec(cloud_point(), 0..200)) {
            let frame = hot_frame();
            let out = fuse_cloud(&cloud, &CloudFilterConfig::default(), &k(), &frame);
            prop_assert_eq!(out.summary.total(), cloud.len());
            prop_assert_eq!(out.summary.fused, out.records.len());
            let survivors: Vec<_> = cloud.iter().filter(|p| {
                p.intensity >= 100.0 && p.z > 0.0
                    && project(p.camera(), &k()).ok().and_then(|px| frame.nearest_pixel(px)).is_some()
            }).collect();
            prop_assert_eq!(survivors.len(), out.records.len());
            for (r, p) in out.records.iter().zip(survivors) {
                prop_assert_eq!(r.camera, p.camera());
                prop_assert!(frame.nearest_pixel(r.pixel).is_some());
                prop_assert_eq!(r.range_d, euclidean_range(r.camera));
            }
        }
    }
}
