//! Thin switch between rayon and sequential execution.
//!
//! With the `parallel` feature (default) the helpers fan out over rayon's
//! global pool; without it they run plain loops. Results are collected in
//! input order either way, so callers are deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over a slice, preserving order.
#[cfg(feature = "parallel")]
pub fn map_slice<T: Sync, U: Send, F: Fn(&T) -> U + Sync + Send>(items: &[T], f: F) -> Vec<U> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, U, F: Fn(&T) -> U>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Map over an index range, preserving order.
#[cfg(feature = "parallel")]
pub fn map_range<U: Send, F: Fn(usize) -> U + Sync + Send>(n: usize, f: F) -> Vec<U> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<U, F: Fn(usize) -> U>(n: usize, f: F) -> Vec<U> {
    (0..n).map(f).collect()
}

/// Configure the rayon pool size. No-op in sequential builds; returns
/// whether the request took effect.
#[cfg(feature = "parallel")]
pub fn set_threads(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn set_threads(_n: usize) -> bool {
    false
}
