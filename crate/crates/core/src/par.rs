//! Data-parallel helpers with a sequential fallback when the `parallel`
//! feature is disabled.
//!
//! Every call site maps independent pure work items and collects in input
//! order, so the numerical output is identical with and without rayon.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items`, preserving order.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Runs `f(row_index, row)` over the rows of a row-major buffer.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_row<F>(entries: &mut [f64], dim: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    entries
        .par_chunks_exact_mut(dim)
        .enumerate()
        .for_each(|(n, row)| f(n, row));
}

/// Runs `f(row_index, row)` over the rows of a row-major buffer.
#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row<F>(entries: &mut [f64], dim: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    for (n, row) in entries.chunks_exact_mut(dim).enumerate() {
        f(n, row);
    }
}
