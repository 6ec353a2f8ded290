//! Batch execution: data-parallel via rayon when the `parallel` feature is
//! on, plain iteration otherwise. Results always come back in input order,
//! so downstream CSV output is deterministic either way.

/// Maps `f` over `items`, in parallel when built with the `parallel`
/// feature. Individual solves stay single-threaded; this is only for fanning
/// out independent instances in grids and sweeps.
#[cfg(feature = "parallel")]
pub fn batch_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    use rayon::prelude::*;
    items.par_iter().map(&f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn batch_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference for [`batch_map`], kept unconditionally so the two
/// can be benchmarked against each other.
pub fn batch_map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
