//! Execution strategy for the per-pixel kernels.
//!
//! Every kernel dispatched through here is a pure function of its pixel
//! index, so the parallel and sequential paths produce identical output.
//! Without the `parallel` feature, [`Execution::Parallel`] runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Below this many items the thread-pool overhead dominates.
#[cfg_attr(not(feature = "parallel"), allow(dead_code))]
const PAR_THRESHOLD: usize = 4096;

impl Execution {
    /// Evaluates `f` on `0..len` and collects the results in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel if len >= PAR_THRESHOLD => {
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }
}
