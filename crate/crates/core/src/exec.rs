//! Sequential / data-parallel execution of independent work items.
//!
//! Every helper here preserves input order in its output, so callers that
//! reduce with a deterministic tie-break get identical results under either
//! strategy. Without the `parallel` feature, [`Exec::Parallel`] runs
//! sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when this build can actually run work concurrently.
    pub fn is_concurrent(&self) -> bool {
        cfg!(feature = "parallel") && *self == Exec::Parallel
    }

    /// Map `f` over `items`, returning results in input order.
    pub fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if *self == Exec::Parallel {
            return items.into_par_iter().map(f).collect();
        }
        items.into_iter().map(f).collect()
    }

    /// Index of the first item (in input order) satisfying `pred`.
    pub fn position_first<T, F>(&self, items: &[T], pred: F) -> Option<usize>
    where
        T: Sync,
        F: Fn(&T) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if *self == Exec::Parallel {
            return items.par_iter().position_first(pred);
        }
        items.iter().position(pred)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let items: Vec<u64> = (0..500).collect();
        let seq = Exec::Sequential.map(items.clone(), |x| x * x);
        let par = Exec::Parallel.map(items, |x| x * x);
        assert_eq!(seq, par);
    }

    #[test]
    fn position_first_is_leftmost() {
        let items: Vec<u64> = (0..1000).collect();
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(exec.position_first(&items, |&x| x % 97 == 96), Some(96));
            assert_eq!(exec.position_first(&items, |&x| x > 5000), None);
        }
    }
}
