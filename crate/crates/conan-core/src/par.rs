//! Data-parallel map helper with a sequential fallback.
//!
//! Analysis stages that fan out per file or per unit go through [`map_vec`]
//! so the `parallel` feature is the only place the rayon dependency shows up.

#[cfg(feature = "parallel")]
pub(crate) fn map_vec<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_vec<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
