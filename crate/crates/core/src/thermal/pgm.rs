//! 16-bit binary PGM (`P5`, maxval 65535, big-endian samples).

use std::io::{Read, Write};

use super::{RawThermalFrame, ThermalError};

const MAXVAL: u32 = 65535;

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    data_offset: usize,
}

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

/// Parses `P5 <width> <height> <maxval>` followed by exactly one whitespace
/// byte. `#` comments are allowed between header tokens.
fn parse_header(bytes: &[u8]) -> Result<Header, ThermalError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(ThermalError::MalformedHeader(
            "expected binary PGM magic \"P5\"".into(),
        ));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for (i, field) in fields.iter_mut().enumerate() {
        let start_pos = pos;
        loop {
            match bytes.get(pos) {
                Some(&b) if is_space(b) => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        if pos == start_pos {
            return Err(ThermalError::MalformedHeader(format!(
                "missing whitespace before header field {}",
                i + 1
            )));
        }
        let digits_start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if pos == digits_start {
            return Err(ThermalError::MalformedHeader(format!(
                "header field {} is not a decimal integer",
                i + 1
            )));
        }
        let text = std::str::from_utf8(&bytes[digits_start..pos]).expect("ascii digits");
        *field = text
            .parse()
            .map_err(|_| ThermalError::MalformedHeader(format!("header value {text} too large")))?;
    }
    match bytes.get(pos) {
        Some(&b) if is_space(b) => pos += 1,
        _ => {
            return Err(ThermalError::MalformedHeader(
                "maxval must be followed by a single whitespace byte".into(),
            ))
        }
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(ThermalError::MalformedHeader(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    Ok(Header {
        width: width as usize,
        height: height as usize,
        maxval,
        data_offset: pos,
    })
}

pub fn read_pgm<R: Read>(mut source: R) -> Result<RawThermalFrame, ThermalError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let header = parse_header(&bytes)?;
    if header.maxval != MAXVAL {
        return Err(ThermalError::UnsupportedDepth(header.maxval));
    }
    let n = header
        .width
        .checked_mul(header.height)
        .ok_or_else(|| ThermalError::MalformedHeader("dimensions overflow".into()))?;
    let payload = &bytes[header.data_offset..];
    let expected = n * 2;
    if payload.len() < expected {
        return Err(ThermalError::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    let counts = payload[..expected]
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]))
        .collect();
    RawThermalFrame::new(header.width, header.height, counts)
}

pub fn write_pgm<W: Write>(frame: &RawThermalFrame, mut sink: W) -> Result<(), ThermalError> {
    write!(
        sink,
        "P5\n{} {}\n{}\n",
        frame.width(),
        frame.height(),
        MAXVAL
    )?;
    let mut payload = Vec::with_capacity(frame.counts().len() * 2);
    for c in frame.counts() {
        payload.extend_from_slice(&c.to_be_bytes());
    }
    sink.write_all(&payload)?;
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pgm_bytes(header: &str, payload_len: usize) -> Vec<u8> {
        let mut bytes = header.as_bytes().to_vec();
        bytes.extend((0..payload_len).map(|i| (i % 251) as u8));
        bytes
    }

    #[test]
    fn reads_native_sensor_frame() {
        let frame = read_pgm(pgm_bytes("P5 160 120 65535\n", 38400).as_slice()).unwrap();
        assert_eq!((frame.width(), frame.height()), (160, 120));
        assert_eq!(frame.get(0, 0), Some(1));
        assert_eq!(frame.get(1, 0), Some(u16::from_be_bytes([2, 3])));
    }

    #[test]
    fn rejects_eight_bit_maxval() {
        assert!(matches!(
            read_pgm(pgm_bytes("P5 4 4 255\n", 16).as_slice()),
            Err(ThermalError::UnsupportedDepth(255))
        ));
    }

    #[test]
    fn rejects_short_payload() {
        assert!(matches!(
            read_pgm(pgm_bytes("P5 160 120 65535\n", 38399).as_slice()),
            Err(ThermalError::Truncated {
                expected: 38400,
                actual: 38399
            })
        ));
    }

    #[test]
    fn malformed_headers() {
        for header in [
            "P2 4 4 65535\n",
            "P5 4 x 65535\n",
            "P5 4 4 65535",
            "P5 0 4 65535\n",
            "P54 4 65535\n",
        ] {
            assert!(
                matches!(
                    read_pgm(pgm_bytes(header, 32).as_slice()),
                    Err(ThermalError::MalformedHeader(_))
                ),
                "{header:?}"
            );
        }
    }

    #[test]
    fn header_comments_are_skipped() {
        let frame = read_pgm(pgm_bytes("P5\n# flir\n2 1\n65535\n", 4).as_slice()).unwrap();
        assert_eq!(frame.counts(), &[1, u16::from_be_bytes([2, 3])]);
    }

    #[test]
    fn writer_emits_canonical_header() {
        let frame = RawThermalFrame::new(2, 1, vec![31730, 1]).unwrap();
        let mut out = Vec::new();
        write_pgm(&frame, &mut out).unwrap();
        assert_eq!(out, b"P5\n2 1\n65535\n\x7b\xf2\x00\x01");
    }

    proptest! {
        #[test]
        fn write_then_read_is_bit_exact(
            (w, h, counts) in (1usize..20, 1usize..20)
                .prop_flat_map(|(w, h)| (Just(w), Just(h), proptest::collection::vec(any::<u16>(), w * h)))
        ) {
            let frame = RawThermalFrame::new(w, h, counts).unwrap();
            let mut out = Vec::new();
            write_pgm(&frame, &mut out).unwrap();
            prop_assert_eq!(read_pgm(out.as_slice()).unwrap(), frame);
        }
    }
}
