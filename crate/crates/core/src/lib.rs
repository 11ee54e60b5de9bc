//! Unsupervised stereo matching on rectified pairs.
//!
//! The pipeline estimates a per-pixel disparity field without ground truth:
//! census-descriptor cost volumes give an initial disparity and a confidence
//! (standard deviation) per pixel, confidence sets the search range of the
//! next finer scale, and a coarse-to-fine gradient-descent refinement
//! minimizes a photometric + census + smoothness loss with analytic
//! gradients. A small trainable scorer fuses confidence and left-right
//! reconstruction error into a per-pixel uncertainty score, which gates a
//! fine-supervises-coarse refinement pass.
//!
//! All operations are deterministic: reductions use a fixed tiling so that
//! results are bit-identical across thread counts, with or without the
//! `parallel` feature (rayon, enabled by default).

pub mod census;
pub mod cost;
mod error;
pub mod exec;
pub mod field;
pub mod grid;
pub mod image;

pub use error::{Result, StereoError};
pub use field::{downsample_field, upsample_field, DisparityField};
pub use grid::{Grid, Mask, OcclusionMask, ReliabilityMask};
pub use image::{
    apply_jitter, bilinear_sample, build_pyramid, image_gradients, warp_with_disparity, Image,
    Pyramid, PYRAMID_LEVELS,
};
