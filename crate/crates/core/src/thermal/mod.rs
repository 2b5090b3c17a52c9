//! Radiometric thermal frames.
//!
//! The thermal camera reports absolute temperature as raw 16-bit counts in
//! hundredths of a kelvin: `°C = count · 0.01 − 273.15`. Frames are stored
//! row-major, top row first.

mod colormap;
mod grid_csv;
mod pgm;
mod watch;

use std::io::{self, Read};

use thiserror::Error;

use crate::geometry::PixelCoord;

pub use colormap::{apply_colormap, apply_colormap_with, write_ppm, Colormap, RgbImage};
pub use grid_csv::{read_celsius_csv, read_raw_csv, write_celsius_csv, write_raw_csv};
pub use pgm::{read_pgm, write_pgm};
pub use watch::{latest_frame_in_directory, FRAME_EXTENSION};

/// Native sensor width in pixels.
pub const SENSOR_WIDTH: usize = 160;
/// Native sensor height in pixels.
pub const SENSOR_HEIGHT: usize = 120;

/// Degrees Celsius per raw count.
pub const RAW_SCALE_C_PER_COUNT: f64 = 0.01;
/// Offset subtracted after scaling, in °C.
pub const RAW_OFFSET_C: f64 = 273.15;
/// Absolute zero, the lowest representable temperature.
pub const ABSOLUTE_ZERO_C: f64 = -273.15;

// The same constants expressed in the count domain, where they are exact.
const COUNTS_PER_DEGREE: f64 = 100.0;
const OFFSET_COUNTS: f64 = 27315.0;

#[derive(Debug, Error)]
pub enum ThermalError {
    #[error("frame dimensions must be at least 1x1, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("expected {expected} samples for the frame, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("temperature {value} °C at sample {index} is below absolute zero")]
    SubAbsoluteZero { index: usize, value: f64 },
    #[error("pixel ({x}, {y}) is outside the {width}x{height} frame")]
    OutOfBounds {
        x: f64,
        y: f64,
        width: usize,
        height: usize,
    },
    #[error("unsupported PGM maxval {0}; only 16-bit samples (65535) are accepted")]
    UnsupportedDepth(u32),
    #[error("payload truncated: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("invalid colormap range: t_min {t_min} must be below t_max {t_max}")]
    InvalidRange { t_min: f64, t_max: f64 },
    #[error("no .{ext} frames found in {dir}")]
    NoFrames { dir: String, ext: &'static str },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn check_dimensions(width: usize, height: usize, len: usize) -> Result<(), ThermalError> {
    if width == 0 || height == 0 {
        return Err(ThermalError::ZeroDimension { width, height });
    }
    let expected = width
        .checked_mul(height)
        .ok_or(ThermalError::ZeroDimension { width, height })?;
    if expected != len {
        return Err(ThermalError::DimensionMismatch {
            expected,
            actual: len,
        });
    }
    Ok(())
}

/// A frame of raw sensor counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawThermalFrame {
    width: usize,
    height: usize,
    counts: Vec<u16>,
}

impl RawThermalFrame {
    pub fn new(width: usize, height: usize, counts: Vec<u16>) -> Result<Self, ThermalError> {
        check_dimensions(width, height, counts.len())?;
        Ok(Self {
            width,
            height,
            counts,
        })
    }

    pub fn filled(width: usize, height: usize, count: u16) -> Result<Self, ThermalError> {
        Self::new(width, height, vec![count; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn counts(&self) -> &[u16] {
        &self.counts
    }

    pub fn get(&self, col: usize, row: usize) -> Option<u16> {
        (col < self.width && row < self.height).then(|| self.counts[row * self.width + col])
    }
}

/// A frame of temperatures in °C.
#[derive(Debug, Clone, PartialEq)]
pub struct CelsiusFrame {
    width: usize,
    height: usize,
    temperatures: Vec<f64>,
}

impl CelsiusFrame {
    /// Fails with [`ThermalError::SubAbsoluteZero`] when any value is below
    /// absolute zero or is not a number.
    pub fn new(width: usize, height: usize, temperatures: Vec<f64>) -> Result<Self, ThermalError> {
        check_dimensions(width, height, temperatures.len())?;
        if let Some((index, &value)) = temperatures
            .iter()
            .enumerate()
            .find(|(_, t)| !(**t >= ABSOLUTE_ZERO_C))
        {
            return Err(ThermalError::SubAbsoluteZero { index, value });
        }
        Ok(Self {
            width,
            height,
            temperatures,
        })
    }

    pub fn filled(width: usize, height: usize, t: f64) -> Result<Self, ThermalError> {
        Self::new(width, height, vec![t; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperatures
    }

    pub fn get(&self, col: usize, row: usize) -> Option<f64> {
        (col < self.width && row < self.height).then(|| self.temperatures[row * self.width + col])
    }

    /// Integer pixel nearest to `p`, if it lies inside the frame.
    pub fn nearest_pixel(&self, p: PixelCoord) -> Option<(usize, usize)> {
        let (x, y) = p.rounded();
        if x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64 {
            Some((x as usize, y as usize))
        } else {
            None
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.temperatures
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
                (lo.min(t), hi.max(t))
            })
    }
}

/// Converts one raw count to °C.
pub fn decode_count(raw: u16) -> f64 {
    // Equal to raw * 0.01 - 273.15, evaluated in the count domain so that the
    // result is the double nearest the exact two-decimal value.
    (f64::from(raw) - OFFSET_COUNTS) / COUNTS_PER_DEGREE
}

/// Converts one temperature to the nearest raw count, saturating at the
/// 16-bit range.
pub fn encode_temperature(t: f64) -> Result<u16, ThermalError> {
    if !(t >= ABSOLUTE_ZERO_C) {
        return Err(ThermalError::SubAbsoluteZero { index: 0, value: t });
    }
    Ok(encode_unchecked(t))
}

fn encode_unchecked(t: f64) -> u16 {
    (t * COUNTS_PER_DEGREE + OFFSET_COUNTS)
        .round()
        .clamp(0.0, f64::from(u16::MAX)) as u16
}

pub fn decode_raw_to_celsius(frame: &RawThermalFrame) -> CelsiusFrame {
    CelsiusFrame {
        width: frame.width,
        height: frame.height,
        temperatures: frame.counts.iter().map(|&c| decode_count(c)).collect(),
    }
}

pub fn encode_celsius_to_raw(frame: &CelsiusFrame) -> RawThermalFrame {
    RawThermalFrame {
        width: frame.width,
        height: frame.height,
        counts: frame
            .temperatures
            .iter()
            .map(|&t| encode_unchecked(t))
            .collect(),
    }
}

/// Temperature at the integer pixel nearest to `p`.
pub fn temperature_at(frame: &CelsiusFrame, p: PixelCoord) -> Result<f64, ThermalError> {
    let (col, row) = frame.nearest_pixel(p).ok_or(ThermalError::OutOfBounds {
        x: p.x,
        y: p.y,
        width: frame.width,
        height: frame.height,
    })?;
    Ok(frame.temperatures[row * frame.width + col])
}

/// Loads a raw frame from either a 16-bit binary PGM or a CSV grid of counts.
pub fn load_frame<R: Read>(mut source: R) -> Result<RawThermalFrame, ThermalError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    match bytes.first() {
        Some(b'P') => read_pgm(bytes.as_slice()),
        Some(_) => read_raw_csv(bytes.as_slice()),
        None => Err(ThermalError::MalformedHeader("empty input".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decode_examples() {
        assert_eq!(decode_count(31730), 44.15);
        assert_eq!(decode_count(27315), 0.0);
        assert_eq!(decode_count(0), -273.15);
        assert_eq!(format!("{:.2}", decode_count(31730)), "44.15");
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_temperature(44.15).unwrap(), 31730);
        assert_eq!(encode_temperature(0.0).unwrap(), 27315);
        assert_eq!(encode_temperature(36.60).unwrap(), 30975);
        assert!((decode_count(30975) - 36.60).abs() <= 0.005);
        assert_eq!(encode_temperature(-273.15).unwrap(), 0);
        assert_eq!(encode_temperature(1000.0).unwrap(), u16::MAX);
    }

    #[test]
    fn encode_rejects_sub_absolute_zero() {
        assert!(matches!(
            encode_temperature(-273.16),
            Err(ThermalError::SubAbsoluteZero { .. })
        ));
        assert!(matches!(
            CelsiusFrame::new(2, 1, vec![0.0, -300.0]),
            Err(ThermalError::SubAbsoluteZero { index: 1, .. })
        ));
        assert!(CelsiusFrame::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn frame_conversions_preserve_dimensions() {
        let raw = RawThermalFrame::new(3, 2, vec![0, 27315, 31730, 30975, 65535, 1]).unwrap();
        let c = decode_raw_to_celsius(&raw);
        assert_eq!((c.width(), c.height()), (3, 2));
        assert_eq!(c.get(2, 0), Some(44.15));
        assert_eq!(encode_celsius_to_raw(&c), raw);
    }

    #[test]
    fn dimension_contract() {
        assert!(matches!(
            RawThermalFrame::new(0, 5, vec![]),
            Err(ThermalError::ZeroDimension { .. })
        ));
        assert!(matches!(
            RawThermalFrame::new(2, 2, vec![0; 3]),
            Err(ThermalError::DimensionMismatch {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn temperature_lookup() {
        let uniform = CelsiusFrame::filled(SENSOR_WIDTH, SENSOR_HEIGHT, 44.15).unwrap();
        assert_eq!(
            temperature_at(&uniform, PixelCoord::new(10.0, 10.0)).unwrap(),
            44.15
        );
        assert!(matches!(
            temperature_at(&uniform, PixelCoord::new(-1.0, 5.0)),
            Err(ThermalError::OutOfBounds { x, .. }) if x == -1.0
        ));

        let mut t = vec![20.0; 16 * 12];
        t[7 * 16 + 5] = 75.55;
        let frame = CelsiusFrame::new(16, 12, t).unwrap();
        assert_eq!(
            temperature_at(&frame, PixelCoord::new(5.0, 7.0)).unwrap(),
            75.55
        );
        // nearest-integer lookup, halves away from zero
        assert_eq!(
            temperature_at(&frame, PixelCoord::new(4.5, 6.6)).unwrap(),
            75.55
        );
        assert_eq!(
            temperature_at(&frame, PixelCoord::new(5.49, 7.49)).unwrap(),
            75.55
        );
        assert_eq!(
            temperature_at(&frame, PixelCoord::new(5.5, 7.0)).unwrap(),
            20.0
        );
        // -0.4 rounds to column 0; 15.5 rounds past the last column
        assert!(temperature_at(&frame, PixelCoord::new(-0.4, 0.0)).is_ok());
        assert!(temperature_at(&frame, PixelCoord::new(15.5, 0.0)).is_err());
        assert!(temperature_at(&frame, PixelCoord::new(0.0, 11.5)).is_err());
    }

    proptest! {
        #[test]
        fn encode_inverts_decode_on_counts(c in any::<u16>()) {
            prop_assert_eq!(encode_temperature(decode_count(c)).unwrap(), c);
        }

        #[test]
        fn decode_inverts_encode_within_half_a_count(t in -273.15..382.20f64) {
            let back = decode_count(encode_temperature(t).unwrap());
            prop_assert!((back - t).abs() <= 0.005 + 1e-9);
        }

        #[test]
        fn decode_is_strictly_monotone(a in any::<u16>(), b in any::<u16>()) {
            prop_assume!(a < b);
            prop_assert!(decode_count(a) < decode_count(b));
        }

        #[test]
        fn lookup_never_below_absolute_zero(
            counts in proptest::collection::vec(any::<u16>(), 12),
            x in -2.0..6.0f64,
            y in -2.0..5.0f64,
        ) {
            let frame = decode_raw_to_celsius(&RawThermalFrame::new(4, 3, counts).unwrap());
            if let Ok(t) = temperature_at(&frame, PixelCoord::new(x, y)) {
                prop_assert!(t >= ABSOLUTE_ZERO_C);
            }
        }
    }
}
