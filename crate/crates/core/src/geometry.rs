//! Pinhole coordinate mathematics.
//!
//! Every length is in millimeters and every angle crossing the public
//! interface is in degrees. Pixel coordinates put the origin at the top-left
//! corner with `x` growing rightward (columns) and `y` downward (rows); integer
//! pixel coordinates address pixel centers.
//!
//! The camera frame shares its orientation with the world frame, so a world
//! position is the platform position plus the camera-frame offset.

use std::ops::Add;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("depth must be positive, got {0} mm")]
    NonPositiveDepth(f64),
    #[error("range must be positive, got {0} mm")]
    NonPositiveRange(f64),
    #[error("scan angle {0}° is outside the open interval (0°, 180°)")]
    InvalidAngle(f64),
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(&'static str),
}

/// Focal lengths and optical center of a pinhole camera, in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
}

impl Intrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self, GeometryError> {
        if ![fx, fy, cx, cy].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::InvalidIntrinsics(
                "all parameters must be finite",
            ));
        }
        if fx <= 0.0 || fy <= 0.0 {
            return Err(GeometryError::InvalidIntrinsics(
                "focal lengths must be positive",
            ));
        }
        if cx < 0.0 || cy < 0.0 {
            return Err(GeometryError::InvalidIntrinsics(
                "optical center must be non-negative",
            ));
        }
        Ok(Self { fx, fy, cx, cy })
    }

    pub fn fx(&self) -> f64 {
        self.fx
    }

    pub fn fy(&self) -> f64 {
        self.fy
    }

    pub fn cx(&self) -> f64 {
        self.cx
    }

    pub fn cy(&self) -> f64 {
        self.cy
    }
}

/// Continuous image coordinate in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PixelCoord {
    pub x: f64,
    pub y: f64,
}

impl PixelCoord {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Nearest integer pixel, rounding halves away from zero.
    pub fn rounded(&self) -> (f64, f64) {
        (self.x.round(), self.y.round())
    }
}

/// Point in the camera frame. `z` is the depth along the optical axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CameraPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CameraPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Platform position in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

impl Add for Pose {
    type Output = Pose;

    fn add(self, rhs: Pose) -> Pose {
        Pose::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

/// Point in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Recovers the camera-frame point seen at pixel `p` at depth `depth`.
pub fn backproject(
    p: PixelCoord,
    depth: f64,
    k: &Intrinsics,
) -> Result<CameraPoint, GeometryError> {
    if !(depth > 0.0) {
        return Err(GeometryError::NonPositiveDepth(depth));
    }
    Ok(CameraPoint {
        x: depth * (p.x - k.cx) / k.fx,
        y: depth * (p.y - k.cy) / k.fy,
        z: depth,
    })
}

/// Projects a camera-frame point onto the image plane. The result is not
/// clipped to any image size.
pub fn project(q: CameraPoint, k: &Intrinsics) -> Result<PixelCoord, GeometryError> {
    if !(q.z > 0.0) {
        return Err(GeometryError::NonPositiveDepth(q.z));
    }
    Ok(PixelCoord {
        x: k.cx + k.fx * (q.x / q.z),
        y: k.cy + k.fy * (q.y / q.z),
    })
}

pub fn compose_world(q: CameraPoint, pose: Pose) -> WorldPoint {
    WorldPoint {
        x: pose.x + q.x,
        y: pose.y + q.y,
        z: pose.z + q.z,
    }
}

/// Straight-line distance from the camera center to `q`.
pub fn euclidean_range(q: CameraPoint) -> f64 {
    (q.x * q.x + q.y * q.y + q.z * q.z).sqrt()
}

/// Converts one 2D laser return into the camera frame.
///
/// `alpha_deg` is measured in the scan plane with 90° on the optical axis, so
/// `x = D·cos α` is negative past boresight. `y_offset` is the fixed vertical
/// displacement between the scan plane and the camera center.
pub fn scan_point_to_camera(
    alpha_deg: f64,
    range: f64,
    y_offset: f64,
) -> Result<CameraPoint, GeometryError> {
    if !(alpha_deg > 0.0 && alpha_deg < 180.0) {
        return Err(GeometryError::InvalidAngle(alpha_deg));
    }
    if !(range > 0.0) {
        return Err(GeometryError::NonPositiveRange(range));
    }
    let (sin, cos) = alpha_deg.to_radians().sin_cos();
    Ok(CameraPoint {
        x: range * cos,
        y: y_offset,
        z: range * sin,
    })
}
