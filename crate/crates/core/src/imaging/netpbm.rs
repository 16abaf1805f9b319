//! Binary PGM (P5) and PPM (P6) with maxval 255.

use std::fs;
use std::path::Path;

use super::{GrayImage, RgbImage};
use crate::error::NetpbmError;

/// A decoded netpbm raster: gray for P5, color for P6.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Image {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl Image {
    pub fn width(&self) -> usize {
        match self {
            Image::Gray(g) => g.width(),
            Image::Rgb(c) => c.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Image::Gray(g) => g.height(),
            Image::Rgb(c) => c.height(),
        }
    }

    /// Gray view of the image; color inputs go through luma conversion.
    pub fn into_gray(self) -> GrayImage {
        match self {
            Image::Gray(g) => g,
            Image::Rgb(c) => super::rgb_to_gray(&c),
        }
    }
}

impl From<GrayImage> for Image {
    fn from(g: GrayImage) -> Self {
        Image::Gray(g)
    }
}

impl From<RgbImage> for Image {
    fn from(c: RgbImage) -> Self {
        Image::Rgb(c)
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: &'static str) -> Result<u32, NetpbmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(NetpbmError::BadHeader { field });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(NetpbmError::BadHeader { field })
    }
}

/// Parses an in-memory P5/P6 file.
pub fn decode_netpbm(bytes: &[u8]) -> Result<Image, NetpbmError> {
    let magic = bytes.get(..2).unwrap_or(bytes);
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        _ => {
            return Err(NetpbmError::BadMagic {
                found: String::from_utf8_lossy(magic).into_owned(),
            })
        }
    };
    let mut hdr = Header { bytes, pos: 2 };
    if !hdr.bytes.get(2).is_some_and(u8::is_ascii_whitespace) {
        return Err(NetpbmError::BadHeader { field: "magic" });
    }
    let width = hdr.number("width")? as usize;
    let height = hdr.number("height")? as usize;
    if width == 0 {
        return Err(NetpbmError::BadHeader { field: "width" });
    }
    if height == 0 {
        return Err(NetpbmError::BadHeader { field: "height" });
    }
    let maxval = hdr.number("maxval")?;
    if maxval != 255 {
        return Err(NetpbmError::BadMaxval(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(hdr.pos) {
        Some(b) if b.is_ascii_whitespace() => hdr.pos += 1,
        _ => return Err(NetpbmError::BadHeader { field: "maxval" }),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or(NetpbmError::BadHeader { field: "width" })?;
    let payload = &bytes[hdr.pos..];
    if payload.len() < expected {
        return Err(NetpbmError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    let payload = &payload[..expected];
    let image = if channels == 1 {
        Image::Gray(GrayImage::new(width, height, payload.to_vec()).expect("dimensions checked"))
    } else {
        let px = payload.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Image::Rgb(RgbImage::new(width, height, px).expect("dimensions checked"))
    };
    Ok(image)
}

/// Serializes as `P5`/`P6` with the header `"P?\n<w> <h>\n255\n"`.
pub fn encode_netpbm(image: &Image) -> Vec<u8> {
    let (magic, w, h) = match image {
        Image::Gray(g) => ("P5", g.width(), g.height()),
        Image::Rgb(c) => ("P6", c.width(), c.height()),
    };
    let mut out = format!("{magic}\n{w} {h}\n255\n").into_bytes();
    match image {
        Image::Gray(g) => out.extend_from_slice(g.as_raw()),
        Image::Rgb(c) => out.extend(c.pixels().iter().flatten()),
    }
    out
}

pub fn load_netpbm(path: impl AsRef<Path>) -> Result<Image, NetpbmError> {
    decode_netpbm(&fs::read(path)?)
}

pub fn save_netpbm(image: &Image, path: impl AsRef<Path>) -> Result<(), NetpbmError> {
    fs::write(path, encode_netpbm(image))?;
    Ok(())
}
