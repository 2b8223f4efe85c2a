//! Execution policy for the data-parallel loops (bound sweeps, simplex grids,
//! Monte Carlo trials).
//!
//! With the `parallel` feature the work is spread over the rayon pool; without
//! it, or with [`Execution::Sequential`], everything runs on the calling
//! thread. Results are identical either way: every loop body is a pure
//! function of its index.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether `Parallel` actually runs on a thread pool in this build.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Order-preserving map over `items`.
pub(crate) fn map<T, R, F>(exec: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        _ => items.into_iter().map(f).collect(),
    }
}

/// Order-preserving map over `0..len`.
pub(crate) fn map_range<R, F>(exec: Execution, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    map(exec, (0..len).collect(), f)
}
