//! False-color export of temperature frames.

use std::io::Write;

use super::{CelsiusFrame, ThermalError};

/// A lookup ramp ordered from the coldest to the hottest color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colormap {
    ramp: Vec<[u8; 3]>,
}

impl Colormap {
    pub const RAINBOW_LEN: usize = 256;

    /// Blue through cyan, green and yellow to red: hue sweeps 240° to 0° at
    /// full saturation and value.
    pub fn rainbow() -> Self {
        let n = Self::RAINBOW_LEN;
        let ramp = (0..n)
            .map(|i| {
                let hue = 240.0 * (1.0 - i as f64 / (n - 1) as f64);
                hsv_to_rgb(hue)
            })
            .collect();
        Self { ramp }
    }

    /// Custom ramp; needs at least two entries.
    pub fn from_ramp(ramp: Vec<[u8; 3]>) -> Option<Self> {
        (ramp.len() >= 2).then_some(Self { ramp })
    }

    pub fn ramp(&self) -> &[[u8; 3]] {
        &self.ramp
    }

    /// Ramp index for `t`, clamped to the ends of `[t_min, t_max]`.
    pub fn index_for(&self, t: f64, t_min: f64, t_max: f64) -> usize {
        let frac = ((t - t_min) / (t_max - t_min)).clamp(0.0, 1.0);
        let last = self.ramp.len() - 1;
        ((frac * last as f64).round() as usize).min(last)
    }

    pub fn color_for(&self, t: f64, t_min: f64, t_max: f64) -> [u8; 3] {
        self.ramp[self.index_for(t, t_min, t_max)]
    }
}

impl Default for Colormap {
    fn default() -> Self {
        Self::rainbow()
    }
}

fn hsv_to_rgb(hue: f64) -> [u8; 3] {
    let h = hue / 60.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        _ => (x, 0.0, 1.0),
    };
    let to_u8 = |v: f64| (v * 255.0).round() as u8;
    [to_u8(r), to_u8(g), to_u8(b)]
}

/// 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

/// Maps every temperature linearly onto the default rainbow ramp.
pub fn apply_colormap(
    frame: &CelsiusFrame,
    t_min: f64,
    t_max: f64,
) -> Result<RgbImage, ThermalError> {
    apply_colormap_with(frame, t_min, t_max, &Colormap::rainbow())
}

pub fn apply_colormap_with(
    frame: &CelsiusFrame,
    t_min: f64,
    t_max: f64,
    map: &Colormap,
) -> Result<RgbImage, ThermalError> {
    if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
        return Err(ThermalError::InvalidRange { t_min, t_max });
    }
    Ok(RgbImage {
        width: frame.width(),
        height: frame.height(),
        pixels: frame
            .temperatures()
            .iter()
            .map(|&t| map.color_for(t, t_min, t_max))
            .collect(),
    })
}

/// Writes a binary PPM (`P6`, maxval 255).
pub fn write_ppm<W: Write>(image: &RgbImage, mut sink: W) -> Result<(), ThermalError> {
    write!(sink, "P6\n{} {}\n255\n", image.width, image.height)?;
    let payload: Vec<u8> = image.pixels.iter().flatten().copied().collect();
    sink.write_all(&payload)?;
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(temps: Vec<f64>) -> CelsiusFrame {
        let n = temps.len();
        CelsiusFrame::new(n, 1, temps).unwrap()
    }

    #[test]
    fn ramp_endpoints_and_middle() {
        let map = Colormap::rainbow();
        let img = apply_colormap(&frame(vec![20.0, 30.0, 25.0, -5.0, 99.0]), 20.0, 30.0).unwrap();
        let ramp = map.ramp();
        assert_eq!(img.pixels[0], ramp[0]);
        assert_eq!(img.pixels[1], ramp[255]);
        // round(0.5 * 255) = 128
        assert_eq!(img.pixels[2], ramp[128]);
        assert_eq!(img.pixels[3], ramp[0]);
        assert_eq!(img.pixels[4], ramp[255]);
        assert_eq!((img.width, img.height), (5, 1));
    }

    #[test]
    fn rainbow_runs_blue_to_red() {
        let map = Colormap::rainbow();
        assert_eq!(map.ramp()[0], [0, 0, 255]);
        assert_eq!(map.ramp()[255], [255, 0, 0]);
        assert_eq!(map.ramp().len(), 256);
    }

    #[test]
    fn rejects_empty_range() {
        let f = frame(vec![1.0]);
        assert!(matches!(
            apply_colormap(&f, 5.0, 5.0),
            Err(ThermalError::InvalidRange { .. })
        ));
        assert!(matches!(
            apply_colormap(&f, 6.0, 5.0),
            Err(ThermalError::InvalidRange { .. })
        ));
    }

    #[test]
    fn ppm_layout() {
        let img = RgbImage {
            width: 2,
            height: 1,
            pixels: vec![[1, 2, 3], [4, 5, 6]],
        };
        let mut out = Vec::new();
        write_ppm(&img, &mut out).unwrap();
        assert_eq!(out, b"P6\n2 1\n255\n\x01\x02\x03\x04\x05\x06");
    }
}
