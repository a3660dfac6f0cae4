//! Point-parallel loops. With the `parallel` feature these run on the rayon
//! pool; without it they are plain sequential loops with identical results
//! (every output slot is written by exactly one closure call, so the order of
//! evaluation never matters).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Env var that caps the worker count.
pub const THREADS_ENV: &str = "RELCONT_THREADS";

/// Configure the global pool from `RELCONT_THREADS` (if set). Safe to call
/// more than once; later calls are no-ops.
pub fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Fill `out` in chunks of `width`: `f(i, chunk)` writes the i-th chunk.
pub fn fill_chunks<F>(out: &mut [f64], width: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    out.par_chunks_mut(width).enumerate().for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(width).enumerate().for_each(|(i, c)| f(i, c));
}

/// `(0..n).map(f).collect()`, in parallel when enabled.
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return (0..n).into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..n).map(f).collect();
}

/// Run independent jobs, returning results in input order.
pub fn map_items<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}
