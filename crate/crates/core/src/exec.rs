//! Row-parallel execution helpers.
//!
//! With the `parallel` feature the helpers fan out over rayon; without it
//! (or after `set_parallel(false)`) they run the identical arithmetic in a
//! plain loop. Reductions always sum fixed-size chunks first and then fold
//! the partial sums left to right, so both paths are bit-identical.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static PARALLEL: AtomicBool = AtomicBool::new(true);

/// Chunk length for deterministic reductions.
const REDUCE_CHUNK: usize = 256;

/// Enables or disables the rayon path at runtime. No effect when the crate
/// is built without the `parallel` feature.
pub fn set_parallel(enabled: bool) {
    PARALLEL.store(enabled, Ordering::Relaxed);
}

/// Whether helpers currently dispatch to rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && PARALLEL.load(Ordering::Relaxed)
}

/// Calls `f(row_index, row)` for every `width`-long row of `data`.
pub fn for_each_row<T, F>(data: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    debug_assert!(width > 0 && data.len().is_multiple_of(width));
    #[cfg(feature = "parallel")]
    if is_parallel() {
        data.par_chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
        return;
    }
    data.chunks_mut(width)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

/// Builds a vector of length `n` from an index map.
pub fn collect_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Deterministic sum of `f(i)` over `0..n`.
pub fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    let chunks = n.div_ceil(REDUCE_CHUNK);
    let partial = collect_indexed(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(n);
        (lo..hi).map(&f).sum::<f64>()
    });
    partial.into_iter().sum()
}

/// Deterministic maximum of `f(i)` over `0..n` (`-inf` when empty).
pub fn max_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    let chunks = n.div_ceil(REDUCE_CHUNK);
    let partial = collect_indexed(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(n);
        (lo..hi).map(&f).fold(f64::NEG_INFINITY, f64::max)
    });
    partial.into_iter().fold(f64::NEG_INFINITY, f64::max)
}
