//! Bilinear sampling and disparity warping.
//!
//! Out-of-bounds coordinates clamp to the border, which keeps sampling a
//! total function and gives zero horizontal derivative outside the frame.

use crate::error::{Result, StereoError};
use crate::field::DisparityField;
use crate::grid::Grid;
use crate::image::Image;

/// Resolve the interpolation cell for a clamped coordinate.
/// Returns (low index, fraction in [0,1]).
#[inline]
fn cell(coord: f64, len: usize) -> (usize, f64) {
    let max = (len - 1) as f64;
    let x = coord.clamp(0.0, max);
    if len == 1 {
        return (0, 0.0);
    }
    let lo = (x.floor() as usize).min(len - 2);
    (lo, x - lo as f64)
}

/// Sample one channel at continuous coordinates.
#[inline]
pub fn sample_channel(img: &Image, x: f64, y: f64, ch: usize) -> f64 {
    let (c0, fx) = cell(x, img.width());
    let (r0, fy) = cell(y, img.height());
    let p00 = img.get(r0, c0, ch);
    let p01 = img.get(r0, c0 + usize::from(img.width() > 1), ch);
    let p10 = img.get(r0 + usize::from(img.height() > 1), c0, ch);
    let p11 = img.get(
        r0 + usize::from(img.height() > 1),
        c0 + usize::from(img.width() > 1),
        ch,
    );
    // Convex form: exact at integer coordinates (fx, fy in {0, 1}).
    let top = p00 * (1.0 - fx) + p01 * fx;
    let bot = p10 * (1.0 - fx) + p11 * fx;
    top * (1.0 - fy) + bot * fy
}

/// Sample one channel and its derivative with respect to `x`. The derivative
/// is zero where the clamp is active (outside `[0, W-1]`).
#[inline]
fn sample_channel_with_dx(img: &Image, x: f64, y: f64, ch: usize) -> (f64, f64) {
    let (c0, fx) = cell(x, img.width());
    let (r0, fy) = cell(y, img.height());
    let p00 = img.get(r0, c0, ch);
    let p01 = img.get(r0, c0 + usize::from(img.width() > 1), ch);
    let p10 = img.get(r0 + usize::from(img.height() > 1), c0, ch);
    let p11 = img.get(
        r0 + usize::from(img.height() > 1),
        c0 + usize::from(img.width() > 1),
        ch,
    );
    let top = p00 * (1.0 - fx) + p01 * fx;
    let bot = p10 * (1.0 - fx) + p11 * fx;
    let value = top * (1.0 - fy) + bot * fy;
    let dx = if x < 0.0 || x > (img.width() - 1) as f64 {
        0.0
    } else {
        (p01 - p00) * (1.0 - fy) + (p11 - p10) * fy
    };
    (value, dx)
}

/// Bilinear interpolation of all channels at `(x, y)` (column, row order).
pub fn bilinear_sample(img: &Image, x: f64, y: f64) -> Vec<f64> {
    (0..img.channels())
        .map(|ch| sample_channel(img, x, y, ch))
        .collect()
}

/// Bilinear sample of a single-channel plane with border clamping.
pub fn sample_grid(grid: &Grid, x: f64, y: f64) -> f64 {
    let (c0, fx) = cell(x, grid.width());
    let (r0, fy) = cell(y, grid.height());
    let c1 = c0 + usize::from(grid.width() > 1);
    let r1 = r0 + usize::from(grid.height() > 1);
    let top = grid.get(r0, c0) * (1.0 - fx) + grid.get(r0, c1) * fx;
    let bot = grid.get(r1, c0) * (1.0 - fx) + grid.get(r1, c1) * fx;
    top * (1.0 - fy) + bot * fy
}

fn check_dims(src: &Image, disp: &DisparityField) -> Result<()> {
    if src.height() != disp.height() || src.width() != disp.width() {
        return Err(StereoError::dims(
            "warp_with_disparity",
            src.dims(),
            (disp.height(), disp.width()),
        ));
    }
    Ok(())
}

/// Reconstruct the reference view: `out(r,c) = src(r, c - disp(r,c))`,
/// sampled bilinearly. With the left image as reference, `src` is the right
/// image and `disp` the left disparity.
pub fn warp_with_disparity(src: &Image, disp: &DisparityField) -> Result<Image> {
    let (h, w, c) = (src.height(), src.width(), src.channels());
    check_dims(src, disp)?;
    let mut data = vec![0.0; h * w * c];
    crate::exec::for_each_row(&mut data, w * c, |r, row| {
        for col in 0..w {
            let x = col as f64 - disp.get(r, col);
            for ch in 0..c {
                row[col * c + ch] = sample_channel(src, x, r as f64, ch);
            }
        }
    });
    Image::new(h, w, c, data)
}

/// Warp and also return, per channel, the derivative of the warped value
/// with respect to the disparity at that pixel:
/// `d out / d disp = -d sample / d x`.
pub fn warp_with_grad(src: &Image, disp: &DisparityField) -> Result<(Image, Vec<Grid>)> {
    let (h, w, c) = (src.height(), src.width(), src.channels());
    check_dims(src, disp)?;
    let mut data = vec![0.0; h * w * c];
    let mut ddisp = vec![0.0; h * w * c];
    let mut packed = vec![(0.0f64, 0.0f64); h * w * c];
    crate::exec::for_each_row(&mut packed, w * c, |r, row| {
        for col in 0..w {
            let x = col as f64 - disp.get(r, col);
            for ch in 0..c {
                let (v, dx) = sample_channel_with_dx(src, x, r as f64, ch);
                row[col * c + ch] = (v, -dx);
            }
        }
    });
    for (i, (v, g)) in packed.into_iter().enumerate() {
        data[i] = v;
        ddisp[i] = g;
    }
    let img = Image::new(h, w, c, data)?;
    let grads = (0..c)
        .map(|ch| {
            Grid::from_fn(h, w, |r, col| ddisp[(r * w + col) * c + ch])
        })
        .collect();
    Ok((img, grads))
}
