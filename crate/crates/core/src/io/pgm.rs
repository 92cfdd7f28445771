//! Netpbm graymap (PGM) reading and writing, P2 and P5, maxval up to 255.

use std::fs;
use std::io::Read;
use std::path::Path;

use super::FormatError;

/// 8-bit grayscale image with row-major pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayscaleImage {
    width: usize,
    height: usize,
    maxval: u8,
    pixels: Vec<u8>,
}

impl GrayscaleImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, FormatError> {
        Self::with_maxval(width, height, 255, pixels)
    }

    pub fn with_maxval(
        width: usize,
        height: usize,
        maxval: u8,
        pixels: Vec<u8>,
    ) -> Result<Self, FormatError> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(FormatError::DimensionMismatch {
                width,
                height,
                expected: width * height,
                found: pixels.len(),
            });
        }
        if maxval == 0 {
            return Err(FormatError::CorruptHeader("maxval must be positive".into()));
        }
        if let Some(&v) = pixels.iter().find(|&&v| v > maxval) {
            return Err(FormatError::CorruptHeader(format!(
                "sample {v} exceeds maxval {maxval}"
            )));
        }
        Ok(GrayscaleImage {
            width,
            height,
            maxval,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u8 {
        self.maxval
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmEncoding {
    /// P2
    Ascii,
    /// P5
    #[default]
    Binary,
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&[u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, field: &str) -> Result<usize, FormatError> {
        let token = self
            .token()
            .ok_or_else(|| FormatError::CorruptHeader(format!("missing {field}")))?;
        std::str::from_utf8(token)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                FormatError::CorruptHeader(format!(
                    "invalid {field} '{}'",
                    String::from_utf8_lossy(token)
                ))
            })
    }
}

/// Parses a P2 or P5 graymap.
pub fn read_pgm<R: Read>(mut reader: R) -> Result<GrayscaleImage, FormatError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(FormatError::UnsupportedFormat("not a Netpbm file".into()));
    }
    let encoding = match bytes[1] {
        b'2' => PgmEncoding::Ascii,
        b'5' => PgmEncoding::Binary,
        b'1' | b'4' => return Err(FormatError::UnsupportedFormat("PBM bitmap".into())),
        b'3' | b'6' => return Err(FormatError::UnsupportedFormat("PPM color image".into())),
        other => {
            return Err(FormatError::UnsupportedFormat(format!(
                "magic number P{}",
                other as char
            )))
        }
    };

    let mut cursor = HeaderCursor {
        bytes: &bytes,
        pos: 2,
    };
    let width = cursor.number("width")?;
    let height = cursor.number("height")?;
    let maxval = cursor.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(FormatError::CorruptHeader(format!(
            "degenerate size {width}x{height}"
        )));
    }
    if maxval == 0 {
        return Err(FormatError::CorruptHeader("maxval must be positive".into()));
    }
    if maxval > 255 {
        return Err(FormatError::UnsupportedFormat(format!(
            "maxval {maxval} needs 16-bit samples"
        )));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| FormatError::CorruptHeader("image too large".into()))?;

    let pixels = match encoding {
        PgmEncoding::Binary => {
            // Exactly one whitespace byte separates the header from the raster.
            match bytes.get(cursor.pos) {
                Some(b) if b.is_ascii_whitespace() => {}
                _ => {
                    return Err(FormatError::CorruptHeader(
                        "missing raster separator".into(),
                    ))
                }
            }
            let raster = &bytes[cursor.pos + 1..];
            if raster.len() < expected {
                return Err(FormatError::TruncatedData {
                    expected,
                    found: raster.len(),
                });
            }
            raster[..expected].to_vec()
        }
        PgmEncoding::Ascii => {
            let mut pixels = Vec::with_capacity(expected);
            while pixels.len() < expected {
                match cursor.token() {
                    Some(token) => {
                        let value: u8 = std::str::from_utf8(token)
                            .ok()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| {
                                FormatError::CorruptHeader(format!(
                                    "invalid sample '{}'",
                                    String::from_utf8_lossy(token)
                                ))
                            })?;
                        pixels.push(value);
                    }
                    None => {
                        return Err(FormatError::TruncatedData {
                            expected,
                            found: pixels.len(),
                        })
                    }
                }
            }
            pixels
        }
    };
    GrayscaleImage::with_maxval(width, height, maxval as u8, pixels)
}

pub fn read_pgm_path(path: &Path) -> Result<GrayscaleImage, FormatError> {
    read_pgm(fs::File::open(path)?)
}

/// Serializes an image; plain (P2) output keeps lines under 70 characters.
pub fn write_pgm(image: &GrayscaleImage, encoding: PgmEncoding) -> Vec<u8> {
    let magic = match encoding {
        PgmEncoding::Ascii => "P2",
        PgmEncoding::Binary => "P5",
    };
    let mut out = format!(
        "{magic}\n{} {}\n{}\n",
        image.width, image.height, image.maxval
    )
    .into_bytes();
    match encoding {
        PgmEncoding::Binary => out.extend_from_slice(&image.pixels),
        PgmEncoding::Ascii => {
            for row in image.pixels.chunks(image.width) {
                let mut line = String::new();
                for v in row {
                    let token = v.to_string();
                    if !line.is_empty() && line.len() + 1 + token.len() > 70 {
                        out.extend_from_slice(line.as_bytes());
                        out.push(b'\n');
                        line.clear();
                    }
                    if !line.is_empty() {
                        line.push(' ');
                    }
                    line.push_str(&token);
                }
                out.extend_from_slice(line.as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}
