//! Data-parallel map helpers with a sequential fallback.
//!
//! All parallel regions in the crate go through [`map_indexed`] so that
//! disabling the `parallel` feature swaps in a plain sequential loop without
//! touching solver code. Results are collected in index order and reductions
//! happen sequentially afterwards, so output is bit-identical regardless of
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to `0..n` and collect the results in order.
#[cfg(feature = "parallel")]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Apply `f` to `0..n` and collect the results in order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}
