//! Data-parallel map over independent evaluations.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`]
//! fans out over the rayon pool; without it every policy runs on the
//! calling thread. Output order always follows input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn available() -> bool {
        cfg!(feature = "parallel")
    }
}

pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Like [`map`] but stops at the first error in input order.
pub fn try_map<T, R, E, F>(items: &[T], exec: Execution, f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(items, exec, f).into_iter().collect()
}
