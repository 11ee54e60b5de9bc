//! Deterministic execution helpers.
//!
//! Reductions over pixels are grouped into fixed row tiles: each tile is
//! accumulated sequentially in row-major order and the tile partials are
//! combined in tile-index order. The `parallel` feature only changes *who*
//! computes each tile, never the grouping or the combination order, so
//! results are bit-identical across thread counts and with the sequential
//! fallback.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows per reduction tile. Fixed so the float summation tree never depends
/// on the thread count.
pub const TILE_ROWS: usize = 16;

fn tile_bounds(height: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..height.div_ceil(TILE_ROWS)).map(move |t| {
        let r0 = t * TILE_ROWS;
        (r0, (r0 + TILE_ROWS).min(height))
    })
}

/// Sum `row_sum(r)` over all rows using the fixed tiling scheme.
pub fn sum_rows<F>(height: usize, row_sum: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let tiles: Vec<(usize, usize)> = tile_bounds(height).collect();
    let partials = map_tiles(&tiles, |&(r0, r1)| {
        let mut acc = 0.0;
        for r in r0..r1 {
            acc += row_sum(r);
        }
        acc
    });
    partials.into_iter().sum()
}

/// Sum two quantities per row in one pass (avoids walking the image twice).
pub fn sum_rows2<F>(height: usize, row_sums: F) -> (f64, f64)
where
    F: Fn(usize) -> (f64, f64) + Sync,
{
    let tiles: Vec<(usize, usize)> = tile_bounds(height).collect();
    let partials = map_tiles(&tiles, |&(r0, r1)| {
        let mut a = 0.0;
        let mut b = 0.0;
        for r in r0..r1 {
            let (ra, rb) = row_sums(r);
            a += ra;
            b += rb;
        }
        (a, b)
    });
    partials.into_iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y))
}

#[cfg(feature = "parallel")]
fn map_tiles<T, U, F>(tiles: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    tiles.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_tiles<T, U, F>(tiles: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    tiles.iter().map(f).collect()
}

/// Fill `out` (row-major, `row_len` elements per row) by running `fill_row`
/// on each row independently. Rows have no cross-talk, so the parallel and
/// sequential paths are trivially bit-identical.
pub fn for_each_row<T, F>(out: &mut [T], row_len: usize, fill_row: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    debug_assert_eq!(out.len() % row_len.max(1), 0);
    #[cfg(feature = "parallel")]
    {
        out.par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(r, row)| fill_row(r, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (r, row) in out.chunks_mut(row_len).enumerate() {
            fill_row(r, row);
        }
    }
}
