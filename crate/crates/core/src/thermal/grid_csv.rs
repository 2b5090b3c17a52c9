//! CSV grids: one line per image row, comma-separated values.
//!
//! Raw grids hold integer counts; Celsius grids hold decimals written with two
//! fractional digits.

use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use super::{CelsiusFrame, RawThermalFrame, ThermalError};

fn read_grid<R: Read, T: FromStr>(source: R) -> Result<(usize, usize, Vec<T>), ThermalError> {
    let mut width = None;
    let mut height = 0;
    let mut values = Vec::new();
    for (idx, line) in BufReader::new(source).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = values.len();
        for field in line.split(',') {
            let field = field.trim();
            let v = field.parse().map_err(|_| ThermalError::MalformedRow {
                line: line_no,
                reason: format!("cannot parse {field:?}"),
            })?;
            values.push(v);
        }
        let row_width = values.len() - before;
        match width {
            None => width = Some(row_width),
            Some(w) if w != row_width => {
                return Err(ThermalError::MalformedRow {
                    line: line_no,
                    reason: format!("expected {w} values, found {row_width}"),
                })
            }
            Some(_) => {}
        }
        height += 1;
    }
    let width = width.ok_or_else(|| ThermalError::MalformedHeader("empty grid".into()))?;
    Ok((width, height, values))
}

pub fn read_raw_csv<R: Read>(source: R) -> Result<RawThermalFrame, ThermalError> {
    let (w, h, counts) = read_grid::<_, u16>(source)?;
    RawThermalFrame::new(w, h, counts)
}

pub fn read_celsius_csv<R: Read>(source: R) -> Result<CelsiusFrame, ThermalError> {
    let (w, h, temps) = read_grid::<_, f64>(source)?;
    CelsiusFrame::new(w, h, temps)
}

fn write_rows<W: Write, T>(
    mut sink: W,
    width: usize,
    values: &[T],
    fmt: impl Fn(&mut String, &T),
) -> Result<(), ThermalError> {
    let mut line = String::new();
    for row in values.chunks(width) {
        line.clear();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            fmt(&mut line, v);
        }
        line.push('\n');
        sink.write_all(line.as_bytes())?;
    }
    sink.flush()?;
    Ok(())
}

pub fn write_raw_csv<W: Write>(frame: &RawThermalFrame, sink: W) -> Result<(), ThermalError> {
    use std::fmt::Write as _;
    write_rows(sink, frame.width(), frame.counts(), |s, c| {
        let _ = write!(s, "{c}");
    })
}

pub fn write_celsius_csv<W: Write>(frame: &CelsiusFrame, sink: W) -> Result<(), ThermalError> {
    use std::fmt::Write as _;
    write_rows(sink, frame.width(), frame.temperatures(), |s, t| {
        let _ = write!(s, "{t:.2}");
    })
}
