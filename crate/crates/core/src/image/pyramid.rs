use crate::error::{Result, StereoError};
use crate::image::{Image, MIN_PIPELINE_DIM};

/// Number of scales used throughout the pipeline.
pub const PYRAMID_LEVELS: usize = 3;

/// Three-level image pyramid. Level 0 is full resolution; each level halves
/// both dimensions (rounded up) with a 2x2 box average.
#[derive(Debug, Clone)]
pub struct Pyramid {
    levels: Vec<Image>,
}

impl Pyramid {
    pub fn level(&self, k: usize) -> &Image {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Image] {
        &self.levels
    }
}

/// Downsample by averaging 2x2 blocks; odd trailing rows/columns average
/// over the available 1 or 2 pixels.
fn box_halve(img: &Image) -> Image {
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let (oh, ow) = (h.div_ceil(2), w.div_ceil(2));
    let mut data = vec![0.0; oh * ow * c];
    crate::exec::for_each_row(&mut data, ow * c, |r, row| {
        let r0 = 2 * r;
        let r1 = (2 * r + 1).min(h - 1);
        for col in 0..ow {
            let c0 = 2 * col;
            let c1 = (2 * col + 1).min(w - 1);
            for ch in 0..c {
                let mut acc = 0.0;
                let mut n = 0usize;
                for rr in [r0, r1] {
                    for cc in [c0, c1] {
                        acc += img.get(rr, cc, ch);
                        n += 1;
                    }
                }
                // min() above duplicates the edge pixel for odd sizes, so
                // deduplicate the accumulation instead of reweighting.
                if r1 == r0 {
                    acc /= 2.0;
                    n /= 2;
                }
                if c1 == c0 {
                    acc /= 2.0;
                    n /= 2;
                }
                row[col * c + ch] = acc / n as f64;
            }
        }
    });
    Image::new(oh, ow, c, data).expect("box average of [0,1] stays in [0,1]")
}

/// Build the three-scale pyramid used by the cascade.
pub fn build_pyramid(img: &Image) -> Result<Pyramid> {
    if img.height() < MIN_PIPELINE_DIM || img.width() < MIN_PIPELINE_DIM {
        return Err(StereoError::InvalidArgument(format!(
            "pyramid input must be at least {MIN_PIPELINE_DIM}x{MIN_PIPELINE_DIM}, got {}x{}",
            img.height(),
            img.width()
        )));
    }
    let mut levels = Vec::with_capacity(PYRAMID_LEVELS);
    levels.push(img.clone());
    for _ in 1..PYRAMID_LEVELS {
        let next = box_halve(levels.last().unwrap());
        levels.push(next);
    }
    Ok(Pyramid { levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_stays_constant_with_halved_sizes() {
        let img = Image::constant(64, 64, 1, 0.5).unwrap();
        let pyr = build_pyramid(&img).unwrap();
        let sizes: Vec<(usize, usize)> = pyr.levels().iter().map(|l| l.dims()).collect();
        assert_eq!(sizes, vec![(64, 64), (32, 32), (16, 16)]);
        for level in pyr.levels() {
            assert!(level.data().iter().all(|&v| (v - 0.5).abs() < 1e-15));
        }
    }

    #[test]
    fn checkerboard_averages_to_half() {
        let img = Image::from_fn(64, 64, |r, c| ((r + c) % 2) as f64).unwrap();
        let pyr = build_pyramid(&img).unwrap();
        assert!(pyr
            .level(1)
            .data()
            .iter()
            .all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn level1_pixels_are_block_means_of_level0() {
        let img = Image::from_fn(64, 64, |r, c| ((r * 37 + c * 11) % 101) as f64 / 100.0).unwrap();
        let pyr = build_pyramid(&img).unwrap();
        let l1 = pyr.level(1);
        for r in 0..32 {
            for c in 0..32 {
                let mean = (img.get(2 * r, 2 * c, 0)
                    + img.get(2 * r, 2 * c + 1, 0)
                    + img.get(2 * r + 1, 2 * c, 0)
                    + img.get(2 * r + 1, 2 * c + 1, 0))
                    / 4.0;
                assert!((l1.get(r, c, 0) - mean).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mean_intensity_is_preserved_across_even_levels() {
        let img = Image::from_fn(64, 64, |r, c| ((r * 13 + c * 29) % 83) as f64 / 82.0).unwrap();
        let pyr = build_pyramid(&img).unwrap();
        let m0 = pyr.level(0).mean();
        for level in pyr.levels() {
            assert!((level.mean() - m0).abs() < 1e-6);
        }
    }

    #[test]
    fn odd_dimensions_round_up() {
        let img = Image::constant(17, 21, 1, 0.25).unwrap();
        let pyr = build_pyramid(&img).unwrap();
        assert_eq!(pyr.level(1).dims(), (9, 11));
        assert_eq!(pyr.level(2).dims(), (5, 6));
        assert!(pyr
            .level(2)
            .data()
            .iter()
            .all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn rejects_images_below_minimum_size() {
        let img = Image::constant(8, 64, 1, 0.5).unwrap();
        assert!(build_pyramid(&img).is_err());
    }
}
