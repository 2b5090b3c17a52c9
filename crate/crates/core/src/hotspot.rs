//! Hotspot extraction: thresholding, connected components, localization and
//! temperature statistics.

use std::collections::VecDeque;

use crate::geometry::{
    backproject, compose_world, euclidean_range, CameraPoint, GeometryError, Intrinsics,
    PixelCoord, Pose, WorldPoint,
};
use crate::stats::{summarize, EmptySamples};
use crate::thermal::CelsiusFrame;

/// Which neighbors of a pixel count as connected to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// North, south, east and west.
    Four,
    /// All eight surrounding pixels.
    #[default]
    Eight,
}

/// Integer pixel position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPos {
    pub row: usize,
    pub col: usize,
}

/// A connected region of above-threshold pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Blob {
    /// Members in row-major scan order; the first one is the top-left member.
    pub pixels: Vec<GridPos>,
    pub area: usize,
    /// Unweighted mean of the member pixel centers.
    pub centroid: PixelCoord,
    pub peak_t: f64,
    pub mean_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hotspot {
    pub blob: Blob,
    pub camera: CameraPoint,
    pub world: WorldPoint,
    pub range_d: f64,
    pub depth_used: f64,
}

/// Mean, sample standard deviation and count of temperature readings.
pub type TemperatureStats = crate::stats::SampleSummary;

/// Hot pixels (`t > threshold`) grouped with 8-connectivity.
pub fn detect_blobs(frame: &CelsiusFrame, threshold: f64) -> Vec<Blob> {
    detect_blobs_with(frame, threshold, Connectivity::Eight)
}

/// Blobs are ordered by area, largest first; equal areas keep the row-major
/// order of their top-left members.
pub fn detect_blobs_with(
    frame: &CelsiusFrame,
    threshold: f64,
    connectivity: Connectivity,
) -> Vec<Blob> {
    let (w, h) = (frame.width(), frame.height());
    let temps = frame.temperatures();
    let mut visited = vec![false; w * h];
    let mut queue = VecDeque::new();
    let mut blobs = Vec::new();

    for seed in 0..w * h {
        if visited[seed] || !(temps[seed] > threshold) {
            continue;
        }
        visited[seed] = true;
        queue.push_back(seed);
        let mut members = Vec::new();
        while let Some(idx) = queue.pop_front() {
            members.push(idx);
            let (row, col) = (idx / w, idx % w);
            for (dr, dc) in neighbor_offsets(connectivity) {
                let (r, c) = (row as isize + dr, col as isize + dc);
                if r < 0 || c < 0 || r >= h as isize || c >= w as isize {
                    continue;
                }
                let n = r as usize * w + c as usize;
                if !visited[n] && temps[n] > threshold {
                    visited[n] = true;
                    queue.push_back(n);
                }
            }
        }
        members.sort_unstable();
        blobs.push(build_blob(&members, w, temps));
    }

    // stable: ties keep seed (scan) order
    blobs.sort_by_key(|b| std::cmp::Reverse(b.area));
    blobs
}

fn neighbor_offsets(connectivity: Connectivity) -> &'static [(isize, isize)] {
    const FOUR: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
    const EIGHT: [(isize, isize); 8] = [
        (-1, -1),
        (-1, 0),
        (-1, 1),
        (0, -1),
        (0, 1),
        (1, -1),
        (1, 0),
        (1, 1),
    ];
    match connectivity {
        Connectivity::Four => &FOUR,
        Connectivity::Eight => &EIGHT,
    }
}

fn build_blob(members: &[usize], width: usize, temps: &[f64]) -> Blob {
    let area = members.len();
    let (mut sx, mut sy, mut st) = (0.0, 0.0, 0.0);
    let mut peak_t = f64::NEG_INFINITY;
    let pixels = members
        .iter()
        .map(|&idx| {
            let pos = GridPos {
                row: idx / width,
                col: idx % width,
            };
            sx += pos.col as f64;
            sy += pos.row as f64;
            st += temps[idx];
            peak_t = peak_t.max(temps[idx]);
            pos
        })
        .collect();
    let n = area as f64;
    Blob {
        pixels,
        area,
        centroid: PixelCoord::new(sx / n, sy / n),
        peak_t,
        mean_t: (st / n).min(peak_t),
    }
}

/// Places a blob in 3D using a depth reading taken along the optical axis.
pub fn localize_hotspot(
    blob: &Blob,
    depth: f64,
    k: &Intrinsics,
    pose: Pose,
) -> Result<Hotspot, GeometryError> {
    let camera = backproject(blob.centroid, depth, k)?;
    Ok(Hotspot {
        blob: blob.clone(),
        camera,
        world: compose_world(camera, pose),
        range_d: euclidean_range(camera),
        depth_used: depth,
    })
}

pub fn temperature_statistics(samples: &[f64]) -> Result<TemperatureStats, EmptySamples> {
    summarize(samples.iter().copied())
}
