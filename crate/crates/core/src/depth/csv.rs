//! Text formats for scans, clouds and single-beam depth samples.
//!
//! Scan files start with optional `#key=value` metadata lines
//! (`step_count`, `angular_resolution_deg`, `detection_angle_deg`,
//! `center_step`), an optional `step,range_mm` header, then one
//! `step,range_mm` row per step. Steps without a row read as no-return.
//!
//! Cloud files hold `x_mm,y_mm,z_mm,intensity` rows; `#` lines are comments
//! and the header line is optional.

use std::io::{BufRead, BufReader, Read, Write};
use std::time::Duration;

use super::{CloudPoint, DepthError, DepthSample1D, PointCloud, Scan2D, ScanParams};

const SCAN_HEADER: &str = "step,range_mm";
const CLOUD_HEADER: &str = "x_mm,y_mm,z_mm,intensity";
const SAMPLES_HEADER: &str = "t_us,depth_mm";

fn parse_fields<const N: usize>(line: &str, line_no: usize) -> Result<[f64; N], DepthError> {
    let mut out = [0.0; N];
    let mut fields = line.split(',');
    for slot in out.iter_mut() {
        let field = fields.next().ok_or_else(|| DepthError::MalformedRow {
            line: line_no,
            reason: format!("expected {N} fields"),
        })?;
        let v: f64 = field.trim().parse().map_err(|_| DepthError::MalformedRow {
            line: line_no,
            reason: format!("cannot parse {:?} as a number", field.trim()),
        })?;
        if !v.is_finite() {
            return Err(DepthError::MalformedRow {
                line: line_no,
                reason: format!("non-finite value {v}"),
            });
        }
        *slot = v;
    }
    if fields.next().is_some() {
        return Err(DepthError::MalformedRow {
            line: line_no,
            reason: format!("expected {N} fields"),
        });
    }
    Ok(out)
}

fn apply_metadata(params: &mut ScanParams, body: &str, line: usize) -> Result<(), DepthError> {
    let bad = |reason: String| DepthError::BadMetadata { line, reason };
    let (key, value) = body
        .split_once('=')
        .ok_or_else(|| bad(format!("expected key=value, got {body:?}")))?;
    let (key, value) = (key.trim(), value.trim());
    let int = || {
        value
            .parse::<usize>()
            .map_err(|_| bad(format!("{key}: not an integer: {value:?}")))
    };
    let real = || {
        value
            .parse::<f64>()
            .map_err(|_| bad(format!("{key}: not a number: {value:?}")))
    };
    match key {
        "step_count" => params.step_count = int()?,
        "center_step" => params.center_step = int()?,
        "angular_resolution_deg" => params.angular_resolution_deg = real()?,
        "detection_angle_deg" => params.detection_angle_deg = real()?,
        _ => return Err(bad(format!("unknown key {key:?}"))),
    }
    Ok(())
}

pub fn parse_scan<R: Read>(source: R) -> Result<Scan2D, DepthError> {
    let mut params = ScanParams::default();
    let mut rows: Vec<(usize, f64, usize)> = Vec::new();
    let mut last_meta_line = 0;
    for (idx, line) in BufReader::new(source).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(body) = line.strip_prefix('#') {
            if body.contains('=') {
                if !rows.is_empty() {
                    return Err(DepthError::BadMetadata {
                        line: line_no,
                        reason: "metadata must precede the data rows".into(),
                    });
                }
                apply_metadata(&mut params, body, line_no)?;
                last_meta_line = line_no;
            }
            continue;
        }
        if line == SCAN_HEADER {
            continue;
        }
        let [step, range] = parse_fields::<2>(line, line_no)?;
        if step < 0.0 || step.fract() != 0.0 {
            return Err(DepthError::MalformedRow {
                line: line_no,
                reason: format!("step {step} is not a non-negative integer"),
            });
        }
        if range < 0.0 {
            return Err(DepthError::MalformedRow {
                line: line_no,
                reason: format!("negative range {range}"),
            });
        }
        rows.push((step as usize, range, line_no));
    }
    params.validate().map_err(|e| DepthError::BadMetadata {
        line: last_meta_line,
        reason: e.to_string(),
    })?;
    let mut ranges = vec![0.0; params.step_count];
    let mut seen = vec![false; params.step_count];
    for (step, range, line) in rows {
        if step >= params.step_count {
            return Err(DepthError::MalformedRow {
                line,
                reason: format!("step {step} is outside 0..{}", params.step_count),
            });
        }
        if std::mem::replace(&mut seen[step], true) {
            return Err(DepthError::MalformedRow {
                line,
                reason: format!("duplicate step {step}"),
            });
        }
        ranges[step] = range;
    }
    Scan2D::new(params, ranges)
}

pub fn write_scan<W: Write>(scan: &Scan2D, mut sink: W) -> Result<(), DepthError> {
    let p = scan.params();
    writeln!(sink, "#step_count={}", p.step_count)?;
    writeln!(sink, "#angular_resolution_deg={}", p.angular_resolution_deg)?;
    writeln!(sink, "#detection_angle_deg={}", p.detection_angle_deg)?;
    writeln!(sink, "#center_step={}", p.center_step)?;
    writeln!(sink, "{SCAN_HEADER}")?;
    for (step, range) in scan.ranges().iter().enumerate() {
        writeln!(sink, "{step},{range}")?;
    }
    sink.flush()?;
    Ok(())
}

pub fn parse_cloud<R: Read>(source: R) -> Result<PointCloud, DepthError> {
    let mut cloud = Vec::new();
    for (idx, line) in BufReader::new(source).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == CLOUD_HEADER {
            continue;
        }
        let [x, y, z, intensity] = parse_fields::<4>(line, line_no)?;
        if intensity < 0.0 {
            return Err(DepthError::MalformedRow {
                line: line_no,
                reason: format!("negative intensity {intensity}"),
            });
        }
        cloud.push(CloudPoint::new(x, y, z, intensity));
    }
    Ok(cloud)
}

pub fn write_cloud<W: Write>(cloud: &[CloudPoint], mut sink: W) -> Result<(), DepthError> {
    writeln!(sink, "{CLOUD_HEADER}")?;
    for p in cloud {
        writeln!(sink, "{},{},{},{}", p.x, p.y, p.z, p.intensity)?;
    }
    sink.flush()?;
    Ok(())
}

/// Single-beam readings as `t_us,depth_mm` rows, microseconds since the
/// start of acquisition.
pub fn parse_depth_samples<R: Read>(source: R) -> Result<Vec<DepthSample1D>, DepthError> {
    let mut samples = Vec::new();
    for (idx, line) in BufReader::new(source).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == SAMPLES_HEADER {
            continue;
        }
        let [t_us, depth] = parse_fields::<2>(line, line_no)?;
        if t_us < 0.0 || t_us.fract() != 0.0 {
            return Err(DepthError::MalformedRow {
                line: line_no,
                reason: format!("timestamp {t_us} is not a non-negative integer"),
            });
        }
        let sample =
            DepthSample1D::new(depth, Duration::from_micros(t_us as u64)).map_err(|e| {
                DepthError::MalformedRow {
                    line: line_no,
                    reason: e.to_string(),
                }
            })?;
        samples.push(sample);
    }
    Ok(samples)
}

pub fn write_depth_samples<W: Write>(
    samples: &[DepthSample1D],
    mut sink: W,
) -> Result<(), DepthError> {
    writeln!(sink, "{SAMPLES_HEADER}")?;
    for s in samples {
        writeln!(sink, "{},{}", s.timestamp().as_micros(), s.depth_mm())?;
    }
    sink.flush()?;
    Ok(())
}
