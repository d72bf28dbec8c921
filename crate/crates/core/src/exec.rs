//! Execution policy for the data-parallel loops (subroutine fans, seed
//! sweeps, Monte Carlo batches).
//!
//! With the `parallel` feature the [`ExecPolicy::Parallel`] policy runs on the
//! rayon pool; without it every policy degrades to a plain sequential loop.
//! Results are always returned in input order, so output never depends on
//! which policy ran.

/// Environment variable overriding the worker pool size.
pub const THREADS_ENV: &str = "SOCO_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecPolicy {
    Sequential,
    #[default]
    Parallel,
}

impl ExecPolicy {
    /// True when this policy actually fans out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel
    }
}

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_indices<R, F>(policy: ExecPolicy, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        use rayon::prelude::*;
        init_pool();
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = policy;
    (0..n).map(f).collect()
}

/// Map `f` over a slice, collecting results in slice order.
pub fn map_slice<T, R, F>(policy: ExecPolicy, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_indices(policy, items.len(), |i| f(&items[i]))
}

/// Configure the global pool from `SOCO_LAB_THREADS` once. A malformed value
/// is ignored and the rayon default is kept.
#[cfg(feature = "parallel")]
fn init_pool() {
    static INIT: std::sync::OnceLock<()> = std::sync::OnceLock::new();
    INIT.get_or_init(|| {
        if let Some(n) = threads_from_env() {
            // Fails only if some other code already built the global pool.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    });
}

pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_policies_preserve_order() {
        let seq = map_indices(ExecPolicy::Sequential, 100, |i| i * i);
        let par = map_indices(ExecPolicy::Parallel, 100, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }

    #[test]
    fn slice_map_matches_iterator() {
        let xs: Vec<f64> = (0..17).map(|i| i as f64 * 0.5).collect();
        let ys = map_slice(ExecPolicy::Parallel, &xs, |x| x + 1.0);
        let expect: Vec<f64> = xs.iter().map(|x| x + 1.0).collect();
        assert_eq!(ys, expect);
    }
}
