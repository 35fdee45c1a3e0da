//! Data-parallel helpers. With the `parallel` feature (default) work is
//! spread over the rayon pool; without it, or with [`Exec::Sequential`],
//! the same closures run on the calling thread. Results never depend on
//! the mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Maps `f` over `items`, returning results in input order.
pub fn map_ordered<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Folds the index range `0..len` into per-worker accumulators and merges
/// them. `merge` must be associative for the result to be mode independent.
/// Chunks are kept long so that accumulators holding caches stay useful.
pub fn fold_range<A, I, F, M>(exec: Exec, len: u64, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, u64) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        let chunks = 4 * rayon::current_num_threads() as u64;
        let size = len.div_ceil(chunks).max(1);
        return (0..len.div_ceil(size))
            .into_par_iter()
            .map(|c| (c * size..len.min((c + 1) * size)).fold(init(), &fold))
            .reduce(&init, &merge);
    }
    let _ = (exec, &merge);
    (0..len).fold(init(), fold)
}
