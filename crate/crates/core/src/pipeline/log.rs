//! Fusion log: a CSV text file with one row per fused point.

use std::io::{BufRead, BufReader, Read, Write};

use thiserror::Error;

use crate::depth::FusedRecord;
use crate::geometry::{CameraPoint, PixelCoord};

pub const FUSION_LOG_HEADER: &str = "t_celsius,x_pixel,y_pixel,x_h_mm,y_h_mm,z_h_mm,d_mm";
const FIELDS: usize = 7;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("bad header: expected {FUSION_LOG_HEADER:?}, found {0:?}")]
    BadHeader(String),
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Fixed two-decimal rendering; negative zero prints as `0.00`.
pub fn fixed2(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

pub fn format_record(r: &FusedRecord) -> String {
    [
        r.t_celsius,
        r.pixel.x,
        r.pixel.y,
        r.camera.x,
        r.camera.y,
        r.camera.z,
        r.range_d,
    ]
    .map(fixed2)
    .join(",")
}

/// Writes the header and one row per record, flushing after each row so a
/// reader tailing the file sees complete lines.
pub fn write_fusion_log<W: Write>(records: &[FusedRecord], mut sink: W) -> Result<(), LogError> {
    writeln!(sink, "{FUSION_LOG_HEADER}")?;
    for r in records {
        writeln!(sink, "{}", format_record(r))?;
        sink.flush()?;
    }
    sink.flush()?;
    Ok(())
}

pub fn read_fusion_log<R: Read>(source: R) -> Result<Vec<FusedRecord>, LogError> {
    let mut lines = BufReader::new(source).lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(LogError::BadHeader(String::new())),
        }
    };
    if header.trim() != FUSION_LOG_HEADER {
        return Err(LogError::BadHeader(header));
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let values = line
            .split(',')
            .map(|f| f.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| LogError::MalformedRow {
                line: line_no,
                reason: format!("non-numeric field in {line:?}"),
            })?;
        if values.len() != FIELDS {
            return Err(LogError::MalformedRow {
                line: line_no,
                reason: format!("expected {FIELDS} fields, found {}", values.len()),
            });
        }
        records.push(FusedRecord {
            t_celsius: values[0],
            pixel: PixelCoord::new(values[1], values[2]),
            camera: CameraPoint::new(values[3], values[4], values[5]),
            range_d: values[6],
        });
    }
    Ok(records)
}
