//! Single-channel planes and binary masks shared across the crate.

use crate::error::{Result, StereoError};

/// A dense `height x width` plane of `f64` values, row-major. Used for
/// uncertainty maps, error channels and other signed per-pixel quantities
/// that are not images in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn zeros(height: usize, width: usize) -> Self {
        Grid {
            height,
            width,
            data: vec![0.0; height * width],
        }
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(StereoError::InvalidArgument(format!(
                "grid data length {} does not match {}x{}",
                data.len(),
                height,
                width
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(StereoError::InvalidArgument(
                "grid contains non-finite values".into(),
            ));
        }
        Ok(Grid {
            height,
            width,
            data,
        })
    }

    pub fn from_fn(height: usize, width: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Grid {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.width + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn mean(&self) -> f64 {
        crate::exec::sum_rows(self.height, |r| {
            self.data[r * self.width..(r + 1) * self.width].iter().sum()
        }) / (self.height * self.width) as f64
    }

    /// 3x3 neighborhood mean with shrinking windows at the borders.
    pub fn box_mean3(&self) -> Grid {
        let (h, w) = (self.height, self.width);
        let mut out = Grid::zeros(h, w);
        crate::exec::for_each_row(out.data_mut(), w, |r, row| {
            let r0 = r.saturating_sub(1);
            let r1 = (r + 1).min(h - 1);
            for (c, slot) in row.iter_mut().enumerate() {
                let c0 = c.saturating_sub(1);
                let c1 = (c + 1).min(w - 1);
                let mut acc = 0.0;
                let mut n = 0usize;
                for rr in r0..=r1 {
                    for cc in c0..=c1 {
                        acc += self.data[rr * w + cc];
                        n += 1;
                    }
                }
                *slot = acc / n as f64;
            }
        });
        out
    }
}

/// Binary per-pixel mask. The meaning of 1 depends on the use site:
/// occlusion masks use 1 = occluded, reliability masks use 1 = reliable,
/// validity masks use 1 = valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    height: usize,
    width: usize,
    data: Vec<u8>,
}

/// Forward-backward occlusion mask: 1 = occluded, 0 = visible.
pub type OcclusionMask = Mask;

/// Reliability mask over uncertainty scores: 1 = reliable.
pub type ReliabilityMask = Mask;

impl Mask {
    pub fn filled(height: usize, width: usize, value: bool) -> Self {
        Mask {
            height,
            width,
            data: vec![u8::from(value); height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(u8::from(f(r, c)));
            }
        }
        Mask {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.width + c] != 0
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r * self.width + c] = u8::from(v);
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn count_set(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    /// Grow the set region by `radius` pixels (Chebyshev distance).
    pub fn dilate(&self, radius: usize) -> Mask {
        let (h, w) = (self.height, self.width);
        Mask::from_fn(h, w, |r, c| {
            let r0 = r.saturating_sub(radius);
            let r1 = (r + radius).min(h - 1);
            let c0 = c.saturating_sub(radius);
            let c1 = (c + radius).min(w - 1);
            (r0..=r1).any(|rr| (c0..=c1).any(|cc| self.get(rr, cc)))
        })
    }
}
