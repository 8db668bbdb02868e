//! Data-parallel map over independent work items. With the `parallel`
//! feature this runs on a rayon pool of the requested size; without it (or
//! with `jobs == 1`) it runs sequentially. Output order always matches input
//! order.

/// Maps `f` over `items` using up to `jobs` threads (`0` = all cores).
pub fn map_indexed<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if jobs != 1 {
            use rayon::prelude::*;
            let run = || items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
            if jobs == 0 {
                return run();
            }
            match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(pool) => return pool.install(run),
                Err(_) => return run(),
            }
        }
    }
    let _ = jobs;
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Whether this build can run work items concurrently.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
