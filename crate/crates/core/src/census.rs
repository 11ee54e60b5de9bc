//! Census transform: one 48-bit descriptor per pixel from sign comparisons
//! over a 7x7 window, robust to monotonic intensity remappings.

use crate::grid::Grid;
use crate::image::Image;

/// Half-width of the census window.
pub const CENSUS_RADIUS: i64 = 3;
/// Comparisons per descriptor: 7*7 - 1.
pub const CENSUS_BITS: u32 = 48;

/// Per-pixel census descriptors. Bit `k` (raster order over the 7x7 window,
/// center skipped) is 1 iff neighbor `k` is strictly darker than the center.
/// Windows at the border clamp coordinates into the frame.
#[derive(Debug, Clone)]
pub struct CensusMap {
    height: usize,
    width: usize,
    bits: Vec<u64>,
}

impl CensusMap {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.bits[r * self.width + c]
    }
}

/// Number of differing bits between two descriptors.
#[inline]
pub fn hamming(a: u64, b: u64) -> u32 {
    (a ^ b).count_ones()
}

pub(crate) fn census_of_grid(intensity: &Grid) -> CensusMap {
    let (h, w) = (intensity.height(), intensity.width());
    let mut bits = vec![0u64; h * w];
    crate::exec::for_each_row(&mut bits, w, |r, row| {
        for (c, slot) in row.iter_mut().enumerate() {
            let center = intensity.get(r, c);
            let mut desc = 0u64;
            let mut k = 0u32;
            for dr in -CENSUS_RADIUS..=CENSUS_RADIUS {
                for dc in -CENSUS_RADIUS..=CENSUS_RADIUS {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let rr = (r as i64 + dr).clamp(0, h as i64 - 1) as usize;
                    let cc = (c as i64 + dc).clamp(0, w as i64 - 1) as usize;
                    if intensity.get(rr, cc) < center {
                        desc |= 1u64 << k;
                    }
                    k += 1;
                }
            }
            *slot = desc;
        }
    });
    CensusMap {
        height: h,
        width: w,
        bits,
    }
}

/// Census transform of an image; multi-channel inputs are reduced to their
/// channel-mean intensity first.
pub fn census_transform(img: &Image) -> CensusMap {
    census_of_grid(&img.channel_mean())
}
