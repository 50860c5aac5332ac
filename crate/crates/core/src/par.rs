//! Order-preserving map over independent work items, parallel when the
//! `parallel` feature is enabled.

/// How to evaluate independent points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Parallel when built with the `parallel` feature, otherwise sequential.
    #[default]
    Parallel,
    Sequential,
}

/// Maps `f` over `items`, returning results in input order.
pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}
