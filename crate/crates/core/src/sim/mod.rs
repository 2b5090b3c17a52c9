//! Deterministic synthetic scenes.
//!
//! A scene is a set of camera-facing rectangular targets in front of an
//! ambient background. Given the scene and a seed, the simulator renders the
//! thermal frame and the 1D, 2D and 3D depth readings the real sensors would
//! produce, and reports where each target's temperature peak actually is.
//! Scene coordinates are camera-frame millimeters.
//!
//! Noise streams are keyed by `(seed, modality, index)`, so a pixel's noise
//! does not depend on how many other pixels were drawn before it.

mod scene_file;

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use thiserror::Error;

use crate::depth::{
    CloudPoint, DepthError, DepthSample1D, PointCloud, Scan2D, ScanParams, MAX_RANGE_1D_MM,
};
use crate::geometry::{euclidean_range, CameraPoint, Intrinsics, WorldPoint};
use crate::thermal::{
    encode_celsius_to_raw, CelsiusFrame, RawThermalFrame, ThermalError, ABSOLUTE_ZERO_C,
};

pub use scene_file::{parse_scene, write_scene};

/// Acquisition period of the single-beam laser.
pub const DEPTH_1D_PERIOD: Duration = Duration::from_micros(3620);
/// Intensity reported for every simulated cloud return.
pub const CLOUD_HIT_INTENSITY: f64 = 255.0;
/// Measured depth noise of the single-beam laser, in mm.
pub const DEFAULT_DEPTH_SIGMA_MM: f64 = 8.1;

// Smallest range a noisy reading is clamped to; keeps it off the no-return
// sentinel.
const MIN_NOISY_RANGE_MM: f64 = 1e-3;

// Thermal noise is truncated here so rendered temperatures stay within
// ambient and peak widened by this many standard deviations.
const THERMAL_NOISE_BOUND_SIGMAS: f64 = 3.0;

const STREAM_THERMAL: u64 = 1;
const STREAM_DEPTH_1D: u64 = 2;
const STREAM_SCAN: u64 = 3;
const STREAM_CLOUD: u64 = 4;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("no target intersects the optical axis")]
    NoTargetOnAxis,
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("invalid noise: {0}")]
    InvalidNoise(String),
    #[error("scene file line {line}: {reason}")]
    SceneFile { line: usize, reason: String },
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Depth(#[from] DepthError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemperatureField {
    Uniform {
        t_c: f64,
    },
    /// `ambient + (peak − ambient) · exp(−r² / 2σ²)` with `r` measured on the
    /// target plane from its center.
    GaussianBump {
        peak_c: f64,
        sigma_mm: f64,
    },
}

impl TemperatureField {
    pub fn peak_c(&self) -> f64 {
        match *self {
            TemperatureField::Uniform { t_c } => t_c,
            TemperatureField::GaussianBump { peak_c, .. } => peak_c,
        }
    }
}

/// A rectangle facing the camera, its normal along the optical axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarTarget {
    pub center: WorldPoint,
    pub width_mm: f64,
    pub height_mm: f64,
    pub field: TemperatureField,
}

impl PlanarTarget {
    fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.center.x).abs() <= self.width_mm / 2.0
            && (y - self.center.y).abs() <= self.height_mm / 2.0
    }

    fn temperature(&self, x: f64, y: f64, ambient_c: f64) -> f64 {
        match self.field {
            TemperatureField::Uniform { t_c } => t_c,
            TemperatureField::GaussianBump { peak_c, sigma_mm } => {
                let (dx, dy) = (x - self.center.x, y - self.center.y);
                let falloff = (-(dx * dx + dy * dy) / (2.0 * sigma_mm * sigma_mm)).exp();
                ambient_c + (peak_c - ambient_c) * falloff
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    ambient_c: f64,
    targets: Vec<PlanarTarget>,
}

impl Scene {
    pub fn new(ambient_c: f64, targets: Vec<PlanarTarget>) -> Result<Self, SimError> {
        let bad = |m: String| Err(SimError::InvalidScene(m));
        if !(ambient_c >= ABSOLUTE_ZERO_C && ambient_c.is_finite()) {
            return bad(format!("ambient {ambient_c} °C is below absolute zero"));
        }
        for (i, t) in targets.iter().enumerate() {
            let c = t.center;
            if ![c.x, c.y, c.z, t.width_mm, t.height_mm, t.field.peak_c()]
                .iter()
                .all(|v| v.is_finite())
            {
                return bad(format!("target {i}: non-finite parameter"));
            }
            if !(t.width_mm > 0.0 && t.height_mm > 0.0) {
                return bad(format!("target {i}: width and height must be positive"));
            }
            if !(c.z > 0.0) {
                return bad(format!("target {i}: plane depth must be positive"));
            }
            if t.field.peak_c() < ambient_c {
                return bad(format!("target {i}: temperature is below ambient"));
            }
            if let TemperatureField::GaussianBump { sigma_mm, .. } = t.field {
                if !(sigma_mm > 0.0 && sigma_mm.is_finite()) {
                    return bad(format!("target {i}: bump sigma must be positive"));
                }
            }
        }
        Ok(Self { ambient_c, targets })
    }

    pub fn empty(ambient_c: f64) -> Result<Self, SimError> {
        Self::new(ambient_c, Vec::new())
    }

    pub fn ambient_c(&self) -> f64 {
        self.ambient_c
    }

    pub fn targets(&self) -> &[PlanarTarget] {
        &self.targets
    }

    /// Hottest temperature anywhere in the scene.
    pub fn max_peak_c(&self) -> f64 {
        self.targets
            .iter()
            .map(|t| t.field.peak_c())
            .fold(self.ambient_c, f64::max)
    }

    /// Nearest target hit by the camera ray `(u, v, 1)`; returns the target
    /// and the plane coordinates of the hit.
    fn trace_pixel_ray(&self, u: f64, v: f64) -> Option<(&PlanarTarget, f64, f64)> {
        self.targets
            .iter()
            .filter_map(|t| {
                let (x, y) = (u * t.center.z, v * t.center.z);
                t.contains(x, y).then_some((t, x, y))
            })
            .min_by(|a, b| a.0.center.z.total_cmp(&b.0.center.z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    depth_sigma_mm: f64,
    thermal_sigma_c: f64,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(depth_sigma_mm: f64, thermal_sigma_c: f64, seed: u64) -> Result<Self, SimError> {
        for (name, v) in [
            ("depth_sigma_mm", depth_sigma_mm),
            ("thermal_sigma_c", thermal_sigma_c),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimError::InvalidNoise(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(Self {
            depth_sigma_mm,
            thermal_sigma_c,
            seed,
        })
    }

    /// No noise at all.
    pub fn exact(seed: u64) -> Self {
        Self {
            depth_sigma_mm: 0.0,
            thermal_sigma_c: 0.0,
            seed,
        }
    }

    pub fn depth_sigma_mm(&self) -> f64 {
        self.depth_sigma_mm
    }

    pub fn thermal_sigma_c(&self) -> f64 {
        self.thermal_sigma_c
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            depth_sigma_mm: DEFAULT_DEPTH_SIGMA_MM,
            thermal_sigma_c: 0.0,
            seed: 0,
        }
    }
}

/// Zero-mean Gaussian noise source for one `(seed, modality, index)` stream.
struct NoiseStream {
    rng: ChaCha8Rng,
    normal: Option<Normal<f64>>,
}

impl NoiseStream {
    fn new(seed: u64, modality: u64, index: u64, sigma: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((modality << 48) ^ index);
        let normal = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("validated sigma"));
        Self { rng, normal }
    }

    fn next(&mut self) -> f64 {
        match &self.normal {
            Some(n) => self.rng.sample(n),
            None => 0.0,
        }
    }
}

/// Renders the thermal frame seen through `k` at `width × height` pixels.
pub fn render_thermal(
    scene: &Scene,
    k: &Intrinsics,
    width: usize,
    height: usize,
    noise: &NoiseSpec,
) -> Result<RawThermalFrame, SimError> {
    let mut temps = Vec::with_capacity(width * height);
    for row in 0..height {
        let v = (row as f64 - k.cy()) / k.fy();
        for col in 0..width {
            let u = (col as f64 - k.cx()) / k.fx();
            let clean = match scene.trace_pixel_ray(u, v) {
                Some((target, x, y)) => target.temperature(x, y, scene.ambient_c),
                None => scene.ambient_c,
            };
            let index = (row * width + col) as u64;
            let bound = THERMAL_NOISE_BOUND_SIGMAS * noise.thermal_sigma_c;
            let jitter = NoiseStream::new(noise.seed, STREAM_THERMAL, index, noise.thermal_sigma_c)
                .next()
                .clamp(-bound, bound);
            temps.push((clean + jitter).max(ABSOLUTE_ZERO_C));
        }
    }
    let frame = CelsiusFrame::new(width, height, temps)?;
    Ok(encode_celsius_to_raw(&frame))
}

/// Depth of the nearest target on the optical axis.
pub fn axis_depth(scene: &Scene) -> Option<f64> {
    scene.trace_pixel_ray(0.0, 0.0).map(|(t, _, _)| t.center.z)
}

/// `n` noisy readings of the single-beam laser aimed down the optical axis.
pub fn simulate_depth_1d(
    scene: &Scene,
    n: usize,
    noise: &NoiseSpec,
) -> Result<Vec<DepthSample1D>, SimError> {
    let truth = axis_depth(scene).ok_or(SimError::NoTargetOnAxis)?;
    let mut stream = NoiseStream::new(noise.seed, STREAM_DEPTH_1D, 0, noise.depth_sigma_mm);
    (0..n)
        .map(|i| {
            let d = (truth + stream.next()).clamp(MIN_NOISY_RANGE_MM, MAX_RANGE_1D_MM);
            Ok(DepthSample1D::new(d, DEPTH_1D_PERIOD * i as u32)?)
        })
        .collect()
}

/// One sweep of a planar scanner whose scan plane is the camera's `y = 0`
/// plane. Steps that hit nothing read 0.
pub fn simulate_scan2d(
    scene: &Scene,
    params: ScanParams,
    noise: &NoiseSpec,
) -> Result<Scan2D, SimError> {
    params.validate()?;
    let mut stream = NoiseStream::new(noise.seed, STREAM_SCAN, 0, noise.depth_sigma_mm);
    let ranges = (0..params.step_count)
        .map(|step| {
            let alpha = params.alpha_deg(step).expect("step in range").to_radians();
            let jitter = stream.next();
            let (sin, cos) = alpha.sin_cos();
            if sin <= 0.0 {
                return 0.0;
            }
            scene
                .targets
                .iter()
                .filter_map(|t| {
                    let dist = t.center.z / sin;
                    t.contains(dist * cos, 0.0).then_some(dist)
                })
                .min_by(f64::total_cmp)
                .map_or(0.0, |d| (d + jitter).max(MIN_NOISY_RANGE_MM))
        })
        .collect();
    Ok(Scan2D::new(params, ranges)?)
}

/// `nx × ny` returns spread over the cell centers of every target face, with
/// depth noise along the optical axis.
pub fn simulate_cloud(scene: &Scene, grid: (usize, usize), noise: &NoiseSpec) -> PointCloud {
    let (nx, ny) = grid;
    let mut stream = NoiseStream::new(noise.seed, STREAM_CLOUD, 0, noise.depth_sigma_mm);
    let mut cloud = Vec::with_capacity(scene.targets.len() * nx * ny);
    for t in &scene.targets {
        for j in 0..ny {
            let y = t.center.y - t.height_mm / 2.0 + (j as f64 + 0.5) * t.height_mm / ny as f64;
            for i in 0..nx {
                let x = t.center.x - t.width_mm / 2.0 + (i as f64 + 0.5) * t.width_mm / nx as f64;
                let z = t.center.z + stream.next();
                cloud.push(CloudPoint::new(x, y, z, CLOUD_HIT_INTENSITY));
            }
        }
    }
    cloud
}

/// Location and value of a target's temperature peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub location: WorldPoint,
    pub peak_c: f64,
}

/// One entry per target, nearest first.
pub fn scene_ground_truth(scene: &Scene) -> Vec<GroundTruth> {
    let mut truth: Vec<GroundTruth> = scene
        .targets
        .iter()
        .map(|t| GroundTruth {
            location: t.center,
            peak_c: t.field.peak_c(),
        })
        .collect();
    let range = |g: &GroundTruth| {
        let c = g.location;
        euclidean_range(CameraPoint::new(c.x, c.y, c.z))
    };
    truth.sort_by(|a, b| range(a).total_cmp(&range(b)));
    truth
}
