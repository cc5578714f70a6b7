//! Binary PGM (`P5`, maxval 255).
//!
//! The writer always emits `P5\n<w> <h>\n255\n` followed by the raw bytes.
//! The reader also accepts arbitrary header whitespace and `#` comments.

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::GrayImage;
use crate::error::{Error, Result};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("bad magic number {0:?}, expected \"P5\"")]
    BadMagic(String),
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("unsupported maxval {0}, only 255 is supported")]
    UnsupportedMaxval(u32),
    #[error("pixel payload too short: expected {expected} bytes, found {found}")]
    ShortPayload { expected: usize, found: usize },
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.pixels().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.pixels());
    out
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, PgmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::BadHeader(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PgmError::BadHeader(format!("{what} out of range")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        let magic = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(PgmError::BadMagic(magic));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    if !bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::BadHeader("missing whitespace after magic".into()));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::BadHeader(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates maxval from the raster
    if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(PgmError::BadHeader("missing whitespace after maxval".into()));
    }
    let payload = &bytes[cur.pos + 1..];
    let expected = width as usize * height as usize;
    if payload.len() < expected {
        return Err(PgmError::ShortPayload {
            expected,
            found: payload.len(),
        });
    }
    Ok(GrayImage::from_raw(width, height, payload[..expected].to_vec()).expect("dimensions checked"))
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(decode_pgm(&bytes)?)
}

pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn single_black_pixel_bytes() {
        let img = GrayImage::new(1, 1, 0);
        assert_eq!(
            encode_pgm(&img),
            vec![0x50, 0x35, 0x0A, 0x31, 0x20, 0x31, 0x0A, 0x32, 0x35, 0x35, 0x0A, 0x00]
        );
    }

    #[test]
    fn random_round_trip_through_file() {
        let mut rng = Rng::new(64);
        let pixels: Vec<u8> = (0..64 * 64).map(|_| rng.next_u64() as u8).collect();
        let img = GrayImage::from_raw(64, 64, pixels).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.pgm");
        write_pgm(&img, &path).unwrap();
        assert_eq!(read_pgm(&path).unwrap(), img);
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(decode_pgm(b"P6\n1 1\n255\n\x00\x00\x00"), Err(PgmError::BadMagic(m)) if m == "P6"));
        assert!(matches!(decode_pgm(b"P5\n1\n"), Err(PgmError::BadHeader(_))));
        assert!(matches!(decode_pgm(b"P5\n2 2\n65535\n"), Err(PgmError::UnsupportedMaxval(65535))));
        assert_eq!(
            decode_pgm(b"P5\n2 2\n255\n\x00\x01"),
            Err(PgmError::ShortPayload { expected: 4, found: 2 })
        );
        assert!(matches!(decode_pgm(b""), Err(PgmError::BadMagic(_))));
    }

    #[test]
    fn header_comments_are_skipped() {
        let img = decode_pgm(b"P5\n# made by hand\n2 1 # dims\n255\n\x07\x08").unwrap();
        assert_eq!(img.pixels(), &[7, 8]);
    }
}
