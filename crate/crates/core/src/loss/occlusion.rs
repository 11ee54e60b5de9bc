//! Occlusion detection from forward-backward disparity consistency.

use crate::error::{Result, StereoError};
use crate::field::DisparityField;
use crate::grid::{Mask, OcclusionMask};

/// A pixel is visible when the backward disparity, sampled at the location
/// its forward disparity maps to, cancels the forward disparity:
/// `|d_f(r,c) + d_b(r, c - d_f(r,c))|^2 < tau`. Everything else is occluded.
pub fn detect_occlusion(
    forward: &DisparityField,
    backward: &DisparityField,
    tau: f64,
) -> Result<OcclusionMask> {
    if forward.dims() != backward.dims() {
        return Err(StereoError::dims(
            "detect_occlusion",
            forward.dims(),
            backward.dims(),
        ));
    }
    let (h, w) = forward.dims();
    let mut data = vec![0u8; h * w];
    crate::exec::for_each_row(&mut data, w, |r, row| {
        for (c, slot) in row.iter_mut().enumerate() {
            let df = forward.get(r, c);
            let db = backward.sample(c as f64 - df, r as f64);
            let residual = df + db;
            *slot = u8::from(residual * residual >= tau);
        }
    });
    Ok(Mask::from_fn(h, w, |r, c| data[r * w + c] != 0))
}
