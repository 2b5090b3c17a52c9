//! Planar angular scans.
//!
//! Step `i` points at `α = 90° + (i − center_step) · resolution` in the scan
//! plane, so the center step looks straight down the optical axis. A range of
//! zero means the beam returned no echo.

use crate::geometry::{project, scan_point_to_camera, Intrinsics};
use crate::thermal::{temperature_at, CelsiusFrame};

use super::{DepthError, FusedRecord};

const ANGLE_EPS_DEG: f64 = 1e-9;

/// Angular layout of a scanner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    pub step_count: usize,
    pub angular_resolution_deg: f64,
    pub detection_angle_deg: f64,
    pub center_step: usize,
}

impl Default for ScanParams {
    /// 1081 steps over 270° at 0.25°.
    fn default() -> Self {
        Self {
            step_count: 1081,
            angular_resolution_deg: 0.25,
            detection_angle_deg: 270.0,
            center_step: 540,
        }
    }
}

impl ScanParams {
    pub fn validate(&self) -> Result<(), DepthError> {
        let bad = |msg: String| Err(DepthError::InvalidScanParams(msg));
        if self.step_count == 0 {
            return bad("step_count must be at least 1".into());
        }
        if !(self.angular_resolution_deg > 0.0 && self.angular_resolution_deg.is_finite()) {
            return bad(format!(
                "angular resolution must be positive, got {}",
                self.angular_resolution_deg
            ));
        }
        let implied = self.detection_angle_deg / self.angular_resolution_deg + 1.0;
        if (implied - self.step_count as f64).abs() > 1e-6 {
            return bad(format!(
                "{} steps do not cover {}° at {}° resolution",
                self.step_count, self.detection_angle_deg, self.angular_resolution_deg
            ));
        }
        if self.center_step >= self.step_count {
            return bad(format!(
                "center step {} is outside 0..{}",
                self.center_step, self.step_count
            ));
        }
        Ok(())
    }

    pub fn alpha_deg(&self, step: usize) -> Result<f64, DepthError> {
        if step >= self.step_count {
            return Err(DepthError::StepOutOfRange {
                step,
                step_count: self.step_count,
            });
        }
        Ok(90.0 + (step as f64 - self.center_step as f64) * self.angular_resolution_deg)
    }
}

/// One sweep of range readings, in mm, indexed by step.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan2D {
    params: ScanParams,
    ranges: Vec<f64>,
}

impl Scan2D {
    pub fn new(params: ScanParams, ranges: Vec<f64>) -> Result<Self, DepthError> {
        params.validate()?;
        if ranges.len() != params.step_count {
            return Err(DepthError::InvalidScanParams(format!(
                "expected {} ranges, got {}",
                params.step_count,
                ranges.len()
            )));
        }
        if let Some(r) = ranges.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(DepthError::InvalidScanParams(format!(
                "ranges must be finite and non-negative, got {r}"
            )));
        }
        Ok(Self { params, ranges })
    }

    pub fn params(&self) -> &ScanParams {
        &self.params
    }

    pub fn ranges(&self) -> &[f64] {
        &self.ranges
    }
}

pub fn step_to_alpha(step: usize, scan: &Scan2D) -> Result<f64, DepthError> {
    scan.params.alpha_deg(step)
}

/// Camera field of view and the vertical offset of the scan plane below the
/// camera center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FovConfig {
    beta_deg: f64,
    y_offset_mm: f64,
}

impl FovConfig {
    pub const DEFAULT_BETA_DEG: f64 = 60.0;

    pub fn new(beta_deg: f64, y_offset_mm: f64) -> Result<Self, DepthError> {
        if !(beta_deg > 0.0 && beta_deg < 180.0) || !y_offset_mm.is_finite() {
            return Err(DepthError::InvalidFov(beta_deg));
        }
        Ok(Self {
            beta_deg,
            y_offset_mm,
        })
    }

    pub fn beta_deg(&self) -> f64 {
        self.beta_deg
    }

    pub fn y_offset_mm(&self) -> f64 {
        self.y_offset_mm
    }
}

impl Default for FovConfig {
    fn default() -> Self {
        Self {
            beta_deg: Self::DEFAULT_BETA_DEG,
            y_offset_mm: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanReturn {
    pub step: usize,
    pub alpha_deg: f64,
    pub range_mm: f64,
}

/// Returns inside the camera's field of view, in step order.
pub fn filter_scan_to_fov(scan: &Scan2D, fov: &FovConfig) -> Vec<ScanReturn> {
    let half = fov.beta_deg / 2.0;
    scan.ranges
        .iter()
        .enumerate()
        .filter_map(|(step, &range_mm)| {
            let alpha_deg = scan.params.alpha_deg(step).ok()?;
            ((alpha_deg - 90.0).abs() <= half + ANGLE_EPS_DEG && range_mm > 0.0).then_some(
                ScanReturn {
                    step,
                    alpha_deg,
                    range_mm,
                },
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanSummary {
    pub in_fov: usize,
    pub fused: usize,
    pub excluded_bounds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanFusion {
    pub records: Vec<FusedRecord>,
    pub summary: ScanSummary,
}

/// Pairs every in-view scan return with the temperature at its projection.
/// Returns that project outside the frame are dropped and counted.
pub fn scan_to_fused(
    scan: &Scan2D,
    fov: &FovConfig,
    k: &Intrinsics,
    frame: &CelsiusFrame,
) -> ScanFusion {
    let kept = filter_scan_to_fov(scan, fov);
    let mut summary = ScanSummary {
        in_fov: kept.len(),
        ..ScanSummary::default()
    };
    let mut records = Vec::with_capacity(kept.len());
    for ret in kept {
        let fused = scan_point_to_camera(ret.alpha_deg, ret.range_mm, fov.y_offset_mm)
            .ok()
            .and_then(|camera| {
                let pixel = project(camera, k).ok()?;
                let t_celsius = temperature_at(frame, pixel).ok()?;
                Some(FusedRecord {
                    t_celsius,
                    pixel,
                    camera,
                    range_d: ret.range_mm,
                })
            });
        match fused {
            Some(r) => records.push(r),
            None => summary.excluded_bounds += 1,
        }
    }
    summary.fused = records.len();
    ScanFusion { records, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn full_scan(range: f64) -> Scan2D {
        Scan2D::new(ScanParams::default(), vec![range; 1081]).unwrap()
    }

    fn k() -> Intrinsics {
        Intrinsics::new(100.0, 100.0, 80.0, 60.0).unwrap()
    }

    /// Scan with a single non-zero return at the step nearest `alpha`.
    fn single_return(alpha: f64, range: f64) -> Scan2D {
        let p = ScanParams::default();
        let step =
            ((alpha - 90.0) / p.angular_resolution_deg + p.center_step as f64).round() as usize;
        let mut ranges = vec![0.0; p.step_count];
        ranges[step] = range;
        Scan2D::new(p, ranges).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let scan = full_scan(1000.0);
        assert_eq!(step_to_alpha(540, &scan).unwrap(), 90.0);
        assert_eq!(step_to_alpha(0, &scan).unwrap(), -45.0);
        assert_eq!(step_to_alpha(1080, &scan).unwrap(), 225.0);
        assert_eq!(
            step_to_alpha(1081, &scan),
            Err(DepthError::StepOutOfRange {
                step: 1081,
                step_count: 1081
            })
        );
        assert_eq!(
            step_to_alpha(1080, &scan).unwrap() - step_to_alpha(0, &scan).unwrap(),
            270.0
        );
    }

    #[test]
    fn params_validation() {
        let p = ScanParams {
            step_count: 1080,
            ..ScanParams::default()
        };
        assert!(p.validate().is_err());
        let p = ScanParams {
            center_step: 1081,
            ..ScanParams::default()
        };
        assert!(p.validate().is_err());
        assert!(Scan2D::new(ScanParams::default(), vec![1.0; 3]).is_err());
        assert!(Scan2D::new(ScanParams::default(), vec![-1.0; 1081]).is_err());
    }

    #[test]
    fn fov_filter_examples() {
        let fov = FovConfig::default();
        let kept = filter_scan_to_fov(&full_scan(1000.0), &fov);
        assert_eq!(kept.len(), 2 * (30.0 / 0.25) as usize + 1);
        assert_eq!(kept.first().unwrap().step, 420);
        assert_eq!(kept.last().unwrap().step, 660);
        assert!(kept.iter().any(|r| r.step == 540));

        let mut ranges = vec![1000.0; 1081];
        ranges[540] = 0.0;
        let kept = filter_scan_to_fov(&Scan2D::new(ScanParams::default(), ranges).unwrap(), &fov);
        assert_eq!(kept.len(), 240);
        assert!(kept.iter().all(|r| r.step != 540));
    }

    #[test]
    fn fov_rejects_degenerate_beta() {
        assert!(FovConfig::new(0.0, 0.0).is_err());
        assert!(FovConfig::new(180.0, 0.0).is_err());
        assert!(FovConfig::new(60.0, f64::NAN).is_err());
    }

    #[test]
    fn fused_boresight_return() {
        let frame = CelsiusFrame::filled(160, 120, 44.15).unwrap();
        let out = scan_to_fused(
            &single_return(90.0, 1000.0),
            &FovConfig::default(),
            &k(),
            &frame,
        );
        assert_eq!(out.records.len(), 1);
        let r = out.records[0];
        assert_eq!(r.t_celsius, 44.15);
        assert_relative_eq!(r.pixel.x, 80.0, epsilon = 1e-9);
        assert_eq!(r.pixel.y, 60.0);
        assert_relative_eq!(r.camera.x, 0.0, epsilon = 1e-9);
        assert_eq!((r.camera.y, r.camera.z, r.range_d), (0.0, 1000.0, 1000.0));
    }

    #[test]
    fn fused_oblique_return_reads_nearest_pixel() {
        let mut t = vec![20.0; 160 * 120];
        t[60 * 160 + 138] = 61.5;
        let frame = CelsiusFrame::new(160, 120, t).unwrap();
        let out = scan_to_fused(
            &single_return(60.0, 1000.0),
            &FovConfig::default(),
            &k(),
            &frame,
        );
        let r = out.records[0];
        assert_relative_eq!(r.camera.x, 500.0, epsilon = 1e-9);
        assert_relative_eq!(r.camera.z, 866.0254, epsilon = 1e-4);
        assert_relative_eq!(r.pixel.x, 137.735, epsilon = 1e-3);
        assert_eq!(r.pixel.y, 60.0);
        assert_eq!(r.t_celsius, 61.5);
    }

    #[test]
    fn fused_return_outside_frame_is_counted() {
        let frame = CelsiusFrame::filled(160, 120, 44.15).unwrap();
        let fov = FovConfig::new(110.0, 0.0).unwrap();
        let out = scan_to_fused(&single_return(40.0, 1000.0), &fov, &k(), &frame);
        assert!(out.records.is_empty());
        assert_eq!(
            out.summary,
            ScanSummary {
                in_fov: 1,
                fused: 0,
                excluded_bounds: 1
            }
        );
    }

    #[test]
    fn vertical_offset_moves_the_row() {
        let frame = CelsiusFrame::filled(160, 120, 30.0).unwrap();
        let fov = FovConfig::new(60.0, -40.0).unwrap();
        let out = scan_to_fused(&single_return(90.0, 750.0), &fov, &k(), &frame);
        let r = out.records[0];
        assert_eq!(r.camera.y, -40.0);
        assert_relative_eq!(r.pixel.y, 60.0 - 100.0 * 40.0 / 750.0, epsilon = 1e-9);
    }

    proptest! {
        #[test]
        fn fov_count_is_monotone_in_beta(a in 1.0..179.0f64, b in 1.0..179.0f64, seed in any::<u64>()) {
            let ranges: Vec<f64> = (0..1081u64).map(|i| if (seed >> (i % 64)) & 1 == 1 { 500.0 } else { 0.0 }).collect();
            let scan = Scan2D::new(ScanParams::default(), ranges).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let n_lo = filter_scan_to_fov(&scan, &FovConfig::new(lo, 0.0).unwrap()).len();
            let n_hi = filter_scan_to_fov(&scan, &FovConfig::new(hi, 0.0).unwrap()).len();
            prop_assert!(n_lo <= n_hi);
        }

        #[test]
        fn fused_scan_records_keep_range_identity(
            ranges in proptest::collection::vec(prop_oneof![1 => Just(0.0), 4 => 100.0..20000.0f64], 1081),
            beta in 10.0..120.0f64,
        ) {
            let scan = Scan2D::new(ScanParams::default(), ranges).unwrap();
            let frame = CelsiusFrame::filled(160, 120, 25.0).unwrap();
            let out = scan_to_fused(&scan, &FovConfig::new(beta, 0.0).unwrap(), &k(), &frame);
            prop_assert_eq!(out.summary.fused + out.summary.excluded_bounds, out.summary.in_fov);
            for r in &out.records {
                let d2 = r.range_d * r.range_d;
                prop_assert!((r.camera.x * r.camera.x + r.camera.z * r.camera.z - d2).abs() <= 1e-9 * d2);
                prop_assert!(frame.nearest_pixel(r.pixel).is_some());
                prop_assert!(r.camera.z > 0.0);
            }
        }
    }
}
