//! Census matching costs over disparity hypotheses, softmax disparity
//! regression with confidence statistics, and the confidence-driven search
//! range for the next cascade stage.

use crate::census::{census_transform, hamming, CENSUS_BITS};
use crate::error::{Result, StereoError};
use crate::field::{upsample_field, DisparityField};
use crate::grid::Grid;
use crate::image::Image;

/// Cost assigned to hypotheses outside a pixel's active range. Large enough
/// that the softmax weight underflows to zero.
pub const MASKED_COST: f64 = 1e4;

/// Softmax temperature applied to raw census costs. A 5-bit Hamming gap
/// (~0.1 after normalization) yields a near-one-hot weight at this scale.
pub const DEFAULT_TEMPERATURE: f64 = 0.05;

/// Per-pixel inclusive disparity bounds plus the normalization factors that
/// produced them.
#[derive(Debug, Clone)]
pub struct HypothesisRange {
    height: usize,
    width: usize,
    d_min: Vec<i32>,
    d_max: Vec<i32>,
    /// Spread scale factor used when this range was derived.
    pub s: f64,
    /// Additive spread margin used when this range was derived.
    pub epsilon: f64,
}

impl HypothesisRange {
    pub fn uniform(height: usize, width: usize, lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return Err(StereoError::InvalidArgument(format!(
                "hypothesis range [{lo},{hi}] is empty"
            )));
        }
        Ok(HypothesisRange {
            height,
            width,
            d_min: vec![lo; height * width],
            d_max: vec![hi; height * width],
            s: 0.0,
            epsilon: 0.0,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn min_at(&self, r: usize, c: usize) -> i32 {
        self.d_min[r * self.width + c]
    }

    #[inline]
    pub fn max_at(&self, r: usize, c: usize) -> i32 {
        self.d_max[r * self.width + c]
    }

    /// Smallest and largest hypotheses over the whole field.
    pub fn global_span(&self) -> (i32, i32) {
        let lo = self.d_min.iter().copied().min().unwrap_or(0);
        let hi = self.d_max.iter().copied().max().unwrap_or(0);
        (lo, hi)
    }

    /// Range for the opposite matching direction: negated and swapped bounds.
    pub fn mirrored(&self) -> HypothesisRange {
        HypothesisRange {
            height: self.height,
            width: self.width,
            d_min: self.d_max.iter().map(|&v| -v).collect(),
            d_max: self.d_min.iter().map(|&v| -v).collect(),
            s: self.s,
            epsilon: self.epsilon,
        }
    }

    /// Per-pixel half-width `(d_max - d_min) / 2`.
    pub fn halfspan(&self) -> Grid {
        Grid::from_fn(self.height, self.width, |r, c| {
            (self.max_at(r, c) - self.min_at(r, c)) as f64 / 2.0
        })
    }

    /// Clamp a field into this range in place.
    pub fn clamp_field(&self, field: &mut DisparityField) {
        assert_eq!((self.height, self.width), field.dims());
        for r in 0..self.height {
            for c in 0..self.width {
                let v = field
                    .get(r, c)
                    .clamp(self.min_at(r, c) as f64, self.max_at(r, c) as f64);
                field.set(r, c, v);
            }
        }
    }
}

/// Rectangular cost tensor: one cost per (pixel, integer hypothesis), with
/// per-pixel variable ranges realized by masking to [`MASKED_COST`].
#[derive(Debug, Clone)]
pub struct CostVolume {
    height: usize,
    width: usize,
    hypotheses: Vec<i32>,
    cost: Vec<f64>,
}

impl CostVolume {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn hypotheses(&self) -> &[i32] {
        &self.hypotheses
    }

    #[inline]
    pub fn cost_at(&self, r: usize, c: usize, j: usize) -> f64 {
        self.cost[(r * self.width + c) * self.hypotheses.len() + j]
    }

    /// Build a volume directly from per-pixel costs (for tests and tools).
    pub fn from_fn(
        height: usize,
        width: usize,
        hypotheses: Vec<i32>,
        f: impl Fn(usize, usize, i32) -> f64,
    ) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(StereoError::InvalidArgument(
                "hypothesis list must be non-empty".into(),
            ));
        }
        if !hypotheses.windows(2).all(|w| w[0] < w[1]) {
            return Err(StereoError::InvalidArgument(
                "hypotheses must be strictly increasing".into(),
            ));
        }
        let mut cost = Vec::with_capacity(height * width * hypotheses.len());
        for r in 0..height {
            for c in 0..width {
                for &d in &hypotheses {
                    let v = f(r, c, d);
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(StereoError::InvalidArgument(
                            "costs must be finite and non-negative".into(),
                        ));
                    }
                    cost.push(v);
                }
            }
        }
        Ok(CostVolume {
            height,
            width,
            hypotheses,
            cost,
        })
    }
}

/// Normalized census Hamming costs for every hypothesis in the range's
/// global span; hypotheses outside a pixel's own `[d_min, d_max]` are masked.
pub fn build_cost_volume(
    left: &Image,
    right: &Image,
    range: &HypothesisRange,
) -> Result<CostVolume> {
    if left.dims() != right.dims() {
        return Err(StereoError::dims("build_cost_volume", left.dims(), right.dims()));
    }
    if (range.height(), range.width()) != left.dims() {
        return Err(StereoError::dims(
            "build_cost_volume range",
            left.dims(),
            (range.height(), range.width()),
        ));
    }
    let (h, w) = left.dims();
    let (lo, hi) = range.global_span();
    let hypotheses: Vec<i32> = (lo..=hi).collect();
    let n = hypotheses.len();
    let census_l = census_transform(left);
    let census_r = census_transform(right);
    let mut cost = vec![0.0f64; h * w * n];
    crate::exec::for_each_row(&mut cost, w * n, |r, row| {
        for c in 0..w {
            let dmin = range.min_at(r, c);
            let dmax = range.max_at(r, c);
            let desc_l = census_l.get(r, c);
            for (j, &d) in hypotheses.iter().enumerate() {
                row[c * n + j] = if d < dmin || d > dmax {
                    MASKED_COST
                } else {
                    let cc = (c as i64 - d as i64).clamp(0, w as i64 - 1) as usize;
                    hamming(desc_l, census_r.get(r, cc)) as f64 / CENSUS_BITS as f64
                };
            }
        }
    });
    Ok(CostVolume {
        height: h,
        width: w,
        hypotheses,
        cost,
    })
}

/// Softmax disparity regression: per pixel, weights `softmax(-cost/T)` over
/// hypotheses give the expected disparity and its standard deviation.
pub fn soft_regress(cv: &CostVolume, temperature: f64) -> (DisparityField, Grid) {
    let (h, w) = (cv.height, cv.width);
    let n = cv.hypotheses.len();
    let mut out = vec![(0.0f64, 0.0f64); h * w];
    crate::exec::for_each_row(&mut out, w, |r, row| {
        for (c, slot) in row.iter_mut().enumerate() {
            let base = (r * w + c) * n;
            let costs = &cv.cost[base..base + n];
            let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
            let mut z = 0.0;
            let mut mean = 0.0;
            for (j, &cost) in costs.iter().enumerate() {
                let wgt = (-(cost - min) / temperature).exp();
                z += wgt;
                mean += cv.hypotheses[j] as f64 * wgt;
            }
            mean /= z;
            let mut var = 0.0;
            for (j, &cost) in costs.iter().enumerate() {
                let wgt = (-(cost - min) / temperature).exp();
                let dd = cv.hypotheses[j] as f64 - mean;
                var += dd * dd * wgt;
            }
            *slot = (mean, (var / z).sqrt());
        }
    });
    let disp = DisparityField::from_fn(h, w, |r, c| out[r * w + c].0);
    let sigma = Grid::from_fn(h, w, |r, c| out[r * w + c].1);
    (disp, sigma)
}

/// Search range for the next (finer) cascade stage: the regressed disparity
/// widened by `(s+1)*sigma + epsilon`, bilinearly upsampled to the target
/// grid (values rescaled with it), rounded outward to integers and clipped
/// to the global disparity range.
pub fn next_range(
    disp: &DisparityField,
    sigma: &Grid,
    s: f64,
    epsilon: f64,
    target_height: usize,
    target_width: usize,
    global: (i32, i32),
) -> Result<HypothesisRange> {
    if disp.dims() != (sigma.height(), sigma.width()) {
        return Err(StereoError::dims(
            "next_range",
            disp.dims(),
            (sigma.height(), sigma.width()),
        ));
    }
    let (h, w) = disp.dims();
    let spread = |r: usize, c: usize| ((s + 1.0) * sigma.get(r, c) + epsilon).max(0.0);
    let hi = DisparityField::from_fn(h, w, |r, c| disp.get(r, c) + spread(r, c));
    let lo = DisparityField::from_fn(h, w, |r, c| disp.get(r, c) - spread(r, c));
    let hi_up = upsample_field(&hi, target_height, target_width)?;
    let lo_up = upsample_field(&lo, target_height, target_width)?;
    let (g_lo, g_hi) = (global.0, global.1);
    let mut d_min = Vec::with_capacity(target_height * target_width);
    let mut d_max = Vec::with_capacity(target_height * target_width);
    for r in 0..target_height {
        for c in 0..target_width {
            let a = (lo_up.get(r, c).floor() as i64).clamp(g_lo as i64, g_hi as i64) as i32;
            let b = (hi_up.get(r, c).ceil() as i64).clamp(g_lo as i64, g_hi as i64) as i32;
            d_min.push(a.min(b));
            d_max.push(b.max(a));
        }
    }
    Ok(HypothesisRange {
        height: target_height,
        width: target_width,
        d_min,
        d_max,
        s,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(h: usize, w: usize, seed: u64) -> Image {
        Image::from_fn(h, w, |r, c| {
            let v = (r as u64)
                .wrapping_mul(6364136223846793005)
                .wrapping_add((c as u64).wrapping_mul(1442695040888963407))
                .wrapping_add(seed)
                .wrapping_mul(2862933555777941757);
            ((v >> 33) % 1000) as f64 / 999.0
        })
        .unwrap()
    }

    #[test]
    fn identical_pair_has_zero_cost_at_zero_disparity() {
        let img = textured(20, 20, 7);
        let range = HypothesisRange::uniform(20, 20, 0, 0).unwrap();
        let cv = build_cost_volume(&img, &img, &range).unwrap();
        assert_eq!(cv.hypotheses(), &[0]);
        for r in 0..20 {
            for c in 0..20 {
                assert_eq!(cv.cost_at(r, c, 0), 0.0);
            }
        }
    }

    #[test]
    fn shifted_pair_argmin_recovers_the_shift() {
        let left = textured(24, 40, 3);
        let right = Image::from_fn(24, 40, |r, c| left.get(r, (c + 2).min(39), 0)).unwrap();
        let range = HypothesisRange::uniform(24, 40, 0, 4).unwrap();
        let cv = build_cost_volume(&left, &right, &range).unwrap();
        for r in 4..20 {
            for c in 8..30 {
                let mut best = (f64::INFINITY, -1i32);
                for (j, &d) in cv.hypotheses().iter().enumerate() {
                    let v = cv.cost_at(r, c, j);
                    if v < best.0 {
                        best = (v, d);
                    }
                }
                assert_eq!(best.1, 2, "argmin at ({r},{c})");
            }
        }
    }

    #[test]
    fn unmasked_costs_are_normalized_to_unit_interval() {
        let left = textured(16, 16, 1);
        let right = textured(16, 16, 2);
        let range = HypothesisRange::uniform(16, 16, -3, 3).unwrap();
        let cv = build_cost_volume(&left, &right, &range).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                for j in 0..cv.hypotheses().len() {
                    let v = cv.cost_at(r, c, j);
                    assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }

    #[test]
    fn census_cost_invariant_under_monotonic_remap() {
        let left = textured(20, 20, 11);
        let right = textured(20, 20, 12);
        let remap = |img: &Image| {
            Image::from_fn(img.height(), img.width(), |r, c| {
                img.get(r, c, 0).powf(2.3) * 0.8 + 0.1
            })
            .unwrap()
        };
        let range = HypothesisRange::uniform(20, 20, -2, 2).unwrap();
        let cv_a = build_cost_volume(&left, &right, &range).unwrap();
        let cv_b = build_cost_volume(&remap(&left), &remap(&right), &range).unwrap();
        assert_eq!(cv_a.cost, cv_b.cost);
    }

    #[test]
    fn single_hypothesis_regression_is_degenerate() {
        let cv = CostVolume::from_fn(4, 4, vec![5], |_, _, _| 0.3).unwrap();
        let (disp, sigma) = soft_regress(&cv, DEFAULT_TEMPERATURE);
        assert!(disp.values().iter().all(|&v| v == 5.0));
        assert!(sigma.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn uniform_costs_reproduce_uniform_moments() {
        let cv = CostVolume::from_fn(3, 3, vec![0, 1, 2, 3], |_, _, _| 0.25).unwrap();
        let (disp, sigma) = soft_regress(&cv, 1.0);
        for r in 0..3 {
            for c in 0..3 {
                assert!((disp.get(r, c) - 1.5).abs() < 1e-9);
                assert!((sigma.get(r, c) - 1.25f64.sqrt()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn near_one_hot_costs_concentrate_regression() {
        let cv = CostVolume::from_fn(2, 2, (0..6).collect(), |_, _, d| {
            if d == 2 {
                0.0
            } else {
                100.0
            }
        })
        .unwrap();
        let (disp, sigma) = soft_regress(&cv, 1.0);
        assert!((disp.get(0, 0) - 2.0).abs() < 1e-6);
        assert!(sigma.get(0, 0) < 1e-3);
    }

    #[test]
    fn regression_matches_brute_force_oracle() {
        // Naive per-pixel exp/normalize/sum, no max-shift.
        let hyps: Vec<i32> = (-4..4).collect();
        let cv = CostVolume::from_fn(8, 8, hyps.clone(), |r, c, d| {
            (((r * 31 + c * 17) as i64 + d as i64 * 13).rem_euclid(29)) as f64 / 29.0
        })
        .unwrap();
        let t = 0.1;
        let (disp, sigma) = soft_regress(&cv, t);
        for r in 0..8 {
            for c in 0..8 {
                let weights: Vec<f64> = (0..hyps.len())
                    .map(|j| (-cv.cost_at(r, c, j) / t).exp())
                    .collect();
                let z: f64 = weights.iter().sum();
                let mean: f64 = hyps
                    .iter()
                    .zip(&weights)
                    .map(|(&d, &w)| d as f64 * w)
                    .sum::<f64>()
                    / z;
                let var: f64 = hyps
                    .iter()
                    .zip(&weights)
                    .map(|(&d, &w)| (d as f64 - mean).powi(2) * w)
                    .sum::<f64>()
                    / z;
                assert!((disp.get(r, c) - mean).abs() < 1e-6);
                assert!((sigma.get(r, c) - var.sqrt()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn shrinking_temperature_approaches_argmin() {
        // Distinct costs with gaps of at least 0.1 per pixel.
        let hyps: Vec<i32> = (-3..=3).collect();
        let cv = CostVolume::from_fn(6, 6, hyps.clone(), |r, c, d| {
            ((r * 7 + c * 3 + (d + 3) as usize * 5) % 11) as f64 / 10.0
        })
        .unwrap();
        let (disp, _) = soft_regress(&cv, 1e-3);
        for r in 0..6 {
            for c in 0..6 {
                let mut best = (f64::INFINITY, 0i32);
                for (j, &d) in hyps.iter().enumerate() {
                    let v = cv.cost_at(r, c, j);
                    if v < best.0 {
                        best = (v, d);
                    }
                }
                assert!((disp.get(r, c) - best.1 as f64).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn sigma_zero_iff_weight_concentrated() {
        let cv = CostVolume::from_fn(1, 1, vec![0, 1], |_, _, d| if d == 0 { 0.0 } else { 1.0 })
            .unwrap();
        // Weight on d=0 exceeds 1 - 1e-9: sigma collapses.
        let (_, sigma_tight) = soft_regress(&cv, 0.02);
        assert!(sigma_tight.get(0, 0) <= 1e-9);
        let (_, sigma_loose) = soft_regress(&cv, 10.0);
        assert!(sigma_loose.get(0, 0) > 0.1);
    }

    #[test]
    fn zero_spread_range_collapses_to_outward_rounded_disparity() {
        let disp = DisparityField::from_fn(6, 6, |r, c| (r as f64 * 0.7) - (c as f64 * 0.4));
        let sigma = Grid::zeros(6, 6);
        let range = next_range(&disp, &sigma, 0.0, 0.0, 6, 6, (-128, 128)).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                let v = disp.get(r, c);
                assert_eq!(range.min_at(r, c), v.floor() as i32);
                assert_eq!(range.max_at(r, c), v.ceil() as i32);
            }
        }
    }

    #[test]
    fn epsilon_widens_range_by_one_before_upsample_scale() {
        let disp = DisparityField::constant(4, 4, 0.0);
        let sigma = Grid::from_fn(4, 4, |_, _| 2.0);
        let range = next_range(&disp, &sigma, 0.0, 1.0, 4, 4, (-128, 128)).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(range.min_at(r, c), -3);
                assert_eq!(range.max_at(r, c), 3);
            }
        }
        let range2x = next_range(&disp, &sigma, 0.0, 1.0, 8, 8, (-128, 128)).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                assert_eq!(range2x.min_at(r, c), -6);
                assert_eq!(range2x.max_at(r, c), 6);
            }
        }
    }

    #[test]
    fn range_always_contains_upsampled_disparity() {
        let disp = DisparityField::from_fn(5, 5, |r, c| ((r * c) as f64 * 0.37).sin() * 20.0);
        let sigma = Grid::from_fn(5, 5, |r, c| ((r + c) as f64 * 0.11).cos().abs());
        let range = next_range(&disp, &sigma, 0.5, 0.25, 10, 10, (-128, 128)).unwrap();
        let up = upsample_field(&disp, 10, 10).unwrap();
        for r in 0..10 {
            for c in 0..10 {
                assert!(range.min_at(r, c) <= range.max_at(r, c));
                assert!(range.min_at(r, c) as f64 <= up.get(r, c) + 1e-9);
                assert!(range.max_at(r, c) as f64 >= up.get(r, c) - 1e-9);
            }
        }
    }
}
