//! File formats: PNG and PGM image input, 16-bit PNG output, and PFM
//! disparity read/write (little-endian, `Pf` header, raw signed pixels).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, StereoError};
use crate::field::DisparityField;
use crate::grid::Mask;
use crate::image::Image;

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

/// Load a PNG or PGM image (8- or 16-bit), scaled to `[0,1]` with the
/// channel count preserved. The format is sniffed from the file content.
pub fn load_image(path: &Path) -> Result<Image> {
    let mut file = File::open(path).map_err(|e| StereoError::io(path_str(path), e))?;
    let mut magic = [0u8; 2];
    file.read_exact(&mut magic)
        .map_err(|e| StereoError::io(path_str(path), e))?;
    drop(file);
    match &magic {
        b"P5" | b"P2" => load_pgm(path),
        [0x89, b'P'] => load_png(path),
        _ => Err(StereoError::UnsupportedFormat {
            path: path_str(path),
            reason: "expected PNG or PGM magic".into(),
        }),
    }
}

fn load_png(path: &Path) -> Result<Image> {
    let dynimg = image::open(path).map_err(|e| StereoError::UnsupportedFormat {
        path: path_str(path),
        reason: e.to_string(),
    })?;
    use image::DynamicImage::*;
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    let (channels, data): (usize, Vec<f64>) = match dynimg {
        ImageLuma8(buf) => (1, buf.into_raw().iter().map(|&v| v as f64 / 255.0).collect()),
        ImageLuma16(buf) => (
            1,
            buf.into_raw().iter().map(|&v| v as f64 / 65535.0).collect(),
        ),
        ImageRgb8(buf) => (3, buf.into_raw().iter().map(|&v| v as f64 / 255.0).collect()),
        ImageRgb16(buf) => (
            3,
            buf.into_raw().iter().map(|&v| v as f64 / 65535.0).collect(),
        ),
        ImageLumaA8(buf) => (
            1,
            buf.into_raw()
                .chunks(2)
                .map(|px| px[0] as f64 / 255.0)
                .collect(),
        ),
        ImageLumaA16(buf) => (
            1,
            buf.into_raw()
                .chunks(2)
                .map(|px| px[0] as f64 / 65535.0)
                .collect(),
        ),
        ImageRgba8(buf) => (
            3,
            buf.into_raw()
                .chunks(4)
                .flat_map(|px| px[..3].iter().map(|&v| v as f64 / 255.0))
                .collect(),
        ),
        ImageRgba16(buf) => (
            3,
            buf.into_raw()
                .chunks(4)
                .flat_map(|px| px[..3].iter().map(|&v| v as f64 / 65535.0))
                .collect(),
        ),
        _ => {
            return Err(StereoError::UnsupportedBitDepth {
                path: path_str(path),
                reason: "only 8- and 16-bit PNG images are supported".into(),
            })
        }
    };
    Image::new(h, w, channels, data)
}

struct PgmTokens {
    bytes: Vec<u8>,
    pos: usize,
}

impl PgmTokens {
    fn next_token(&mut self) -> Option<String> {
        // Skip whitespace and '#' comments to end of line.
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }
}

fn load_pgm(path: &Path) -> Result<Image> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| StereoError::io(path_str(path), e))?;
    let mut toks = PgmTokens { bytes, pos: 0 };
    let bad = |reason: &str| StereoError::UnsupportedFormat {
        path: path_str(path),
        reason: reason.into(),
    };
    let magic = toks.next_token().ok_or_else(|| bad("empty PGM"))?;
    let w: usize = toks
        .next_token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad PGM width"))?;
    let h: usize = toks
        .next_token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad PGM height"))?;
    let maxval: u32 = toks
        .next_token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad PGM maxval"))?;
    if maxval == 0 || maxval > 65535 {
        return Err(StereoError::UnsupportedBitDepth {
            path: path_str(path),
            reason: format!("PGM maxval {maxval} outside 1..=65535"),
        });
    }
    let scale = maxval as f64;
    let data: Vec<f64> = match magic.as_str() {
        "P2" => {
            let mut vals = Vec::with_capacity(h * w);
            for _ in 0..h * w {
                let v: u32 = toks
                    .next_token()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad("truncated P2 data"))?;
                vals.push((v.min(maxval)) as f64 / scale);
            }
            vals
        }
        "P5" => {
            // Binary payload starts after exactly one whitespace byte past maxval.
            let start = toks.pos + 1;
            let raw = &toks.bytes[start.min(toks.bytes.len())..];
            if maxval < 256 {
                if raw.len() < h * w {
                    return Err(bad("truncated P5 data"));
                }
                raw[..h * w].iter().map(|&b| b as f64 / scale).collect()
            } else {
                if raw.len() < 2 * h * w {
                    return Err(bad("truncated 16-bit P5 data"));
                }
                raw[..2 * h * w]
                    .chunks(2)
                    .map(|p| u16::from_be_bytes([p[0], p[1]]) as f64 / scale)
                    .collect()
            }
        }
        _ => return Err(bad("expected P2 or P5 PGM")),
    };
    Image::new(h, w, 1, data)
}

/// Save an image as PNG with 16-bit samples.
pub fn save_image_png(path: &Path, img: &Image) -> Result<()> {
    let quant = |v: f64| (v * 65535.0).round() as u16;
    let (w, h) = (img.width() as u32, img.height() as u32);
    let res = if img.channels() == 1 {
        let buf: Vec<u16> = img.data().iter().map(|&v| quant(v)).collect();
        image::ImageBuffer::<image::Luma<u16>, _>::from_raw(w, h, buf)
            .expect("buffer sized from image")
            .save(path)
    } else {
        let buf: Vec<u16> = img.data().iter().map(|&v| quant(v)).collect();
        image::ImageBuffer::<image::Rgb<u16>, _>::from_raw(w, h, buf)
            .expect("buffer sized from image")
            .save(path)
    };
    res.map_err(|e| StereoError::UnsupportedFormat {
        path: path_str(path),
        reason: e.to_string(),
    })
}

/// Save a binary mask as an 8-bit PNG (0 or 255).
pub fn save_mask_png(path: &Path, mask: &Mask) -> Result<()> {
    let buf: Vec<u8> = mask.data().iter().map(|&v| if v != 0 { 255 } else { 0 }).collect();
    image::ImageBuffer::<image::Luma<u8>, _>::from_raw(mask.width() as u32, mask.height() as u32, buf)
        .expect("buffer sized from mask")
        .save(path)
        .map_err(|e| StereoError::UnsupportedFormat {
            path: path_str(path),
            reason: e.to_string(),
        })
}

/// Load an 8-bit PNG as a binary mask (nonzero = set).
pub fn load_mask_png(path: &Path) -> Result<Mask> {
    let img = load_image(path)?;
    if img.channels() != 1 {
        return Err(StereoError::UnsupportedFormat {
            path: path_str(path),
            reason: "mask PNG must be single-channel".into(),
        });
    }
    Ok(Mask::from_fn(img.height(), img.width(), |r, c| {
        img.get(r, c, 0) > 0.0
    }))
}

/// Write a disparity field as grayscale PFM: `Pf` header, little-endian
/// (negative scale), rows bottom-to-top, raw signed pixel values.
pub fn write_pfm(path: &Path, field: &DisparityField) -> Result<()> {
    let file = File::create(path).map_err(|e| StereoError::io(path_str(path), e))?;
    let mut out = BufWriter::new(file);
    let (h, w) = field.dims();
    write!(out, "Pf\n{} {}\n-1.0\n", w, h).map_err(|e| StereoError::io(path_str(path), e))?;
    for r in (0..h).rev() {
        let mut row = Vec::with_capacity(w * 4);
        for c in 0..w {
            row.extend_from_slice(&(field.get(r, c) as f32).to_le_bytes());
        }
        out.write_all(&row)
            .map_err(|e| StereoError::io(path_str(path), e))?;
    }
    out.flush().map_err(|e| StereoError::io(path_str(path), e))
}

/// Read a grayscale PFM disparity field. Both `Pf` (gray) and `PF` (color)
/// headers are recognized, but disparities must be single-channel.
pub fn read_pfm(path: &Path) -> Result<DisparityField> {
    let file = File::open(path).map_err(|e| StereoError::io(path_str(path), e))?;
    let mut bytes = Vec::new();
    BufReader::new(file)
        .read_to_end(&mut bytes)
        .map_err(|e| StereoError::io(path_str(path), e))?;
    let bad = |reason: &str| StereoError::UnsupportedFormat {
        path: path_str(path),
        reason: reason.into(),
    };
    let mut toks = PgmTokens { bytes, pos: 0 };
    let magic = toks.next_token().ok_or_else(|| bad("empty PFM"))?;
    let channels = match magic.as_str() {
        "Pf" => 1usize,
        "PF" => 3usize,
        _ => return Err(bad("expected Pf or PF header")),
    };
    if channels != 1 {
        return Err(bad("3-channel PFM is not a disparity field"));
    }
    let w: usize = toks
        .next_token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad PFM width"))?;
    let h: usize = toks
        .next_token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad PFM height"))?;
    let scale: f64 = toks
        .next_token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad PFM scale"))?;
    let little_endian = scale < 0.0;
    let start = toks.pos + 1;
    let raw = &toks.bytes[start.min(toks.bytes.len())..];
    if raw.len() < 4 * h * w {
        return Err(bad("truncated PFM data"));
    }
    let mut values = vec![0.0f64; h * w];
    for (i, px) in raw[..4 * h * w].chunks(4).enumerate() {
        let b = [px[0], px[1], px[2], px[3]];
        let v = if little_endian {
            f32::from_le_bytes(b)
        } else {
            f32::from_be_bytes(b)
        };
        let r = h - 1 - i / w;
        let c = i % w;
        values[r * w + c] = v as f64;
    }
    DisparityField::from_vec(h, w, values)
}
