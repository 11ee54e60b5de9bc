//! Disparity fields: the per-pixel horizontal displacement being optimized.

use crate::error::{Result, StereoError};

/// Signed per-pixel horizontal displacement in pixels of its own grid.
/// Positive disparity `d` means the reference pixel `(r,c)` matches the
/// other view at `(r, c-d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityField {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl DisparityField {
    pub fn constant(height: usize, width: usize, value: f64) -> Self {
        DisparityField {
            height,
            width,
            values: vec![value; height * width],
        }
    }

    pub fn from_vec(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != height * width {
            return Err(StereoError::InvalidArgument(format!(
                "disparity data length {} does not match {}x{}",
                values.len(),
                height,
                width
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(StereoError::InvalidArgument(
                "disparity values must be finite".into(),
            ));
        }
        Ok(DisparityField {
            height,
            width,
            values,
        })
    }

    pub fn from_fn(height: usize, width: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                values.push(f(r, c));
            }
        }
        DisparityField {
            height,
            width,
            values,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.width + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.values[r * self.width + c] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Bilinear sample with border clamping (column, row coordinate order).
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let (r0, fy) = clamped_cell(y, self.height);
        let (c0, fx) = clamped_cell(x, self.width);
        let r1 = r0 + usize::from(self.height > 1);
        let c1 = c0 + usize::from(self.width > 1);
        let top = self.get(r0, c0) * (1.0 - fx) + self.get(r0, c1) * fx;
        let bot = self.get(r1, c0) * (1.0 - fx) + self.get(r1, c1) * fx;
        top * (1.0 - fy) + bot * fy
    }

    /// Mean absolute difference against another field over all pixels.
    pub fn mean_abs_diff(&self, other: &DisparityField) -> f64 {
        assert_eq!(self.dims(), other.dims());
        let w = self.width;
        crate::exec::sum_rows(self.height, |r| {
            (0..w)
                .map(|c| (self.get(r, c) - other.get(r, c)).abs())
                .sum()
        }) / (self.height * self.width) as f64
    }
}

/// Bilinear upsampling of a disparity field. Values are scaled by the
/// horizontal size ratio so disparities stay in pixels of the target grid.
/// Coordinates map through pixel centers (`src = (dst + 0.5) * s/t - 0.5`),
/// so a same-size target is the identity.
pub fn upsample_field(
    field: &DisparityField,
    target_height: usize,
    target_width: usize,
) -> Result<DisparityField> {
    let (sh, sw) = field.dims();
    if target_height < sh || target_width < sw {
        return Err(StereoError::InvalidArgument(format!(
            "upsample target {target_height}x{target_width} smaller than source {sh}x{sw}"
        )));
    }
    let scale = target_width as f64 / sw as f64;
    let ry = sh as f64 / target_height as f64;
    let rx = sw as f64 / target_width as f64;
    let mut values = vec![0.0; target_height * target_width];
    crate::exec::for_each_row(&mut values, target_width, |r, row| {
        let sy = (r as f64 + 0.5) * ry - 0.5;
        let (r0, fy) = clamped_cell(sy, sh);
        let r1 = r0 + usize::from(sh > 1);
        for (c, slot) in row.iter_mut().enumerate() {
            let sx = (c as f64 + 0.5) * rx - 0.5;
            let (c0, fx) = clamped_cell(sx, sw);
            let c1 = c0 + usize::from(sw > 1);
            let top = field.get(r0, c0) * (1.0 - fx) + field.get(r0, c1) * fx;
            let bot = field.get(r1, c0) * (1.0 - fx) + field.get(r1, c1) * fx;
            *slot = (top * (1.0 - fy) + bot * fy) * scale;
        }
    });
    DisparityField::from_vec(target_height, target_width, values)
}

/// Box-downsample a field by repeated 2x halving until it reaches the target
/// dimensions, scaling values by the horizontal ratio at each halving.
/// Target dimensions must arise from repeated `ceil(n/2)` halving.
pub fn downsample_field(
    field: &DisparityField,
    target_height: usize,
    target_width: usize,
) -> Result<DisparityField> {
    let mut cur = field.clone();
    while cur.dims() != (target_height, target_width) {
        let (h, w) = cur.dims();
        if h < target_height || w < target_width || (h == target_height && w != target_width) {
            return Err(StereoError::InvalidArgument(format!(
                "cannot reach {target_height}x{target_width} from {h}x{w} by halving"
            )));
        }
        let (oh, ow) = (h.div_ceil(2), w.div_ceil(2));
        let scale = ow as f64 / w as f64;
        let mut values = vec![0.0; oh * ow];
        crate::exec::for_each_row(&mut values, ow, |r, row| {
            let r0 = 2 * r;
            let r1 = (2 * r + 1).min(h - 1);
            for (c, slot) in row.iter_mut().enumerate() {
                let c0 = 2 * c;
                let c1 = (2 * c + 1).min(w - 1);
                let mut acc = 0.0;
                let mut n = 0usize;
                for rr in [r0, r1] {
                    for cc in [c0, c1] {
                        acc += cur.get(rr, cc);
                        n += 1;
                    }
                }
                if r1 == r0 {
                    acc /= 2.0;
                    n /= 2;
                }
                if c1 == c0 {
                    acc /= 2.0;
                    n /= 2;
                }
                *slot = acc / n as f64 * scale;
            }
        });
        cur = DisparityField::from_vec(oh, ow, values)?;
    }
    Ok(cur)
}

#[inline]
fn clamped_cell(coord: f64, len: usize) -> (usize, f64) {
    let max = (len - 1) as f64;
    let x = coord.clamp(0.0, max);
    if len == 1 {
        return (0, 0.0);
    }
    let lo = (x.floor() as usize).min(len - 2);
    (lo, x - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_scales_by_ratio() {
        let f = DisparityField::constant(8, 8, 3.0);
        let up = upsample_field(&f, 16, 16).unwrap();
        assert!(up.values().iter().all(|&v| (v - 6.0).abs() < 1e-12));
    }

    #[test]
    fn same_size_upsample_is_identity() {
        let f = DisparityField::from_fn(7, 9, |r, c| (r as f64) - 2.0 * (c as f64));
        let up = upsample_field(&f, 7, 9).unwrap();
        assert_eq!(up.values(), f.values());
    }

    #[test]
    fn rejects_shrinking_target() {
        let f = DisparityField::constant(8, 8, 1.0);
        assert!(upsample_field(&f, 4, 8).is_err());
    }

    #[test]
    fn ramp_upsamples_to_doubled_ramp_matching_oracle() {
        let f = DisparityField::from_fn(8, 8, |_, c| c as f64);
        let up = upsample_field(&f, 16, 16).unwrap();
        // Independent oracle: same pixel-center mapping evaluated directly.
        for r in 0..16 {
            for c in 0..16 {
                let sx = ((c as f64 + 0.5) * 0.5 - 0.5).clamp(0.0, 7.0);
                let c0 = (sx.floor() as usize).min(6);
                let fx = sx - c0 as f64;
                let expect = ((c0 as f64) + fx * 1.0) * 2.0;
                assert!(
                    (up.get(r, c) - expect).abs() < 1e-12,
                    "({r},{c}): {} vs {}",
                    up.get(r, c),
                    expect
                );
            }
        }
    }

    #[test]
    fn downsample_halves_values_and_dims() {
        let f = DisparityField::constant(16, 16, 4.0);
        let down = downsample_field(&f, 8, 8).unwrap();
        assert_eq!(down.dims(), (8, 8));
        assert!(down.values().iter().all(|&v| (v - 2.0).abs() < 1e-12));
        let down2 = downsample_field(&f, 4, 4).unwrap();
        assert!(down2.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }
}
