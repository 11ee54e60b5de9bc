//! Image containers, pyramids, bilinear sampling/warping and spatial
//! gradients consumed by every other module.

pub mod io;
mod pyramid;
mod sample;

pub use pyramid::{build_pyramid, Pyramid, PYRAMID_LEVELS};
pub use sample::{bilinear_sample, sample_channel, warp_with_disparity, warp_with_grad};

use crate::error::{Result, StereoError};
use crate::grid::Grid;

/// Minimum side length any pipeline entry point accepts.
pub const MIN_PIPELINE_DIM: usize = 16;

/// Intensity image in `[0,1]`, row-major with interleaved channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    /// Build an image, validating the value range and channel count.
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(StereoError::InvalidArgument(
                "image dimensions must be positive".into(),
            ));
        }
        if channels != 1 && channels != 3 {
            return Err(StereoError::InvalidArgument(format!(
                "images must have 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(StereoError::InvalidArgument(format!(
                "image data length {} does not match {}x{}x{}",
                data.len(),
                height,
                width,
                channels
            )));
        }
        if !data.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)) {
            return Err(StereoError::InvalidArgument(
                "image values must be finite and within [0,1]".into(),
            ));
        }
        Ok(Image {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn constant(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        Image::new(
            height,
            width,
            channels,
            vec![value; height * width * channels],
        )
    }

    /// Build a grayscale image from a per-pixel function. Values are expected
    /// to already lie in `[0,1]`.
    pub fn from_fn(height: usize, width: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Image::new(height, width, 1, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize, ch: usize) -> f64 {
        self.data[(r * self.width + c) * self.channels + ch]
    }

    #[inline]
    pub(crate) fn set(&mut self, r: usize, c: usize, ch: usize, v: f64) {
        self.data[(r * self.width + c) * self.channels + ch] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Mean intensity over all pixels and channels.
    pub fn mean(&self) -> f64 {
        let row_len = self.width * self.channels;
        crate::exec::sum_rows(self.height, |r| {
            self.data[r * row_len..(r + 1) * row_len].iter().sum()
        }) / (self.height * row_len) as f64
    }

    /// Per-pixel mean over channels. Identity for grayscale images.
    pub fn channel_mean(&self) -> Grid {
        let (h, w, c) = (self.height, self.width, self.channels);
        if c == 1 {
            return Grid::from_fn(h, w, |r, cc| self.get(r, cc, 0));
        }
        Grid::from_fn(h, w, |r, cc| {
            (0..c).map(|ch| self.get(r, cc, ch)).sum::<f64>() / c as f64
        })
    }
}

/// Absolute forward-difference gradients, reduced over channels by the mean
/// of per-channel absolute differences. The last column of the x-gradient
/// and the last row of the y-gradient are zero.
pub fn image_gradients(img: &Image) -> (Image, Image) {
    let (h, w, c) = (img.height, img.width, img.channels);
    let mut gx = vec![0.0; h * w];
    let mut gy = vec![0.0; h * w];
    crate::exec::for_each_row(&mut gx, w, |r, row| {
        for (col, slot) in row.iter_mut().enumerate().take(w - 1) {
            let mut acc = 0.0;
            for ch in 0..c {
                acc += (img.get(r, col + 1, ch) - img.get(r, col, ch)).abs();
            }
            *slot = acc / c as f64;
        }
    });
    crate::exec::for_each_row(&mut gy, w, |r, row| {
        if r + 1 < h {
            for (col, slot) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for ch in 0..c {
                    acc += (img.get(r + 1, col, ch) - img.get(r, col, ch)).abs();
                }
                *slot = acc / c as f64;
            }
        }
    });
    let gx = Image::new(h, w, 1, gx).expect("gradients of a valid image stay in [0,1]");
    let gy = Image::new(h, w, 1, gy).expect("gradients of a valid image stay in [0,1]");
    (gx, gy)
}

/// Apply a photometric gain/bias to an image, clamping back into `[0,1]`.
pub fn apply_jitter(img: &Image, gain: f64, bias: f64) -> Image {
    let data = img
        .data
        .iter()
        .map(|&v| (gain * v + bias).clamp(0.0, 1.0))
        .collect();
    Image {
        height: img.height,
        width: img.width,
        channels: img.channels,
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_values() {
        assert!(Image::new(2, 2, 1, vec![0.0, 0.5, 1.0, 1.5]).is_err());
        assert!(Image::new(2, 2, 1, vec![0.0, 0.5, 1.0, f64::NAN]).is_err());
        assert!(Image::new(2, 2, 2, vec![0.0; 8]).is_err());
    }

    #[test]
    fn gradients_of_constant_are_zero() {
        let img = Image::constant(8, 8, 1, 0.3).unwrap();
        let (gx, gy) = image_gradients(&img);
        assert!(gx.data().iter().all(|&v| v == 0.0));
        assert!(gy.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradients_of_horizontal_ramp() {
        let img = Image::from_fn(6, 10, |_, c| 0.1 * c as f64 / 10.0).unwrap();
        let (gx, gy) = image_gradients(&img);
        for r in 0..6 {
            for c in 0..10 {
                let expect = if c == 9 { 0.0 } else { 0.01 };
                assert!((gx.get(r, c, 0) - expect).abs() < 1e-12);
                assert_eq!(gy.get(r, c, 0), 0.0);
            }
        }
    }

    #[test]
    fn gradients_match_difference_oracle() {
        let img = Image::from_fn(9, 11, |r, c| {
            ((r * 31 + c * 17) % 97) as f64 / 96.0
        })
        .unwrap();
        let (gx, gy) = image_gradients(&img);
        for r in 0..9 {
            for c in 0..11 {
                let ex = if c + 1 < 11 {
                    (img.get(r, c + 1, 0) - img.get(r, c, 0)).abs()
                } else {
                    0.0
                };
                let ey = if r + 1 < 9 {
                    (img.get(r + 1, c, 0) - img.get(r, c, 0)).abs()
                } else {
                    0.0
                };
                assert_eq!(gx.get(r, c, 0), ex);
                assert_eq!(gy.get(r, c, 0), ey);
            }
        }
    }
}
