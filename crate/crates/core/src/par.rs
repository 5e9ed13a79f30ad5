//! Data-parallel map over a fixed item list. With the `parallel` feature the
//! work runs on the rayon pool; without it the same code runs sequentially.
//! Either way results come back in input order, so every reduction done on
//! them is independent of scheduling.

/// Environment variable capping the worker count (`0` = automatic).
pub const THREADS_ENV: &str = "ASYMPTOTIC_MEANS_THREADS";

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Whether this build runs work on a thread pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Size the global pool once; `0` keeps the automatic choice. Returns an
/// error message if the pool was already initialised.
pub fn configure_threads(threads: usize) -> Result<(), String> {
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return Ok(());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(())
    }
}

/// Thread cap from [`THREADS_ENV`], if set to a valid number.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let ys = map(&xs, |x| x * x);
        assert!(ys.iter().enumerate().all(|(i, &y)| y == (i * i) as u64));
    }
}
