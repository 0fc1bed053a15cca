//! Execution strategy for data-parallel loops.
//!
//! With the `parallel` feature, [`Exec::Parallel`] runs on the rayon pool.
//! Without it, every strategy runs sequentially. Results are always
//! returned in input order, so output does not depend on the strategy.

use crate::automata::DEFAULT_CLOSURE_BOUND;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel if items.len() > 1 => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}

/// Bounds and execution strategy for semi-decision procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    /// Limit on nucleus candidates and on automaton closures.
    pub bound: usize,
    pub exec: Exec,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            bound: DEFAULT_CLOSURE_BOUND,
            exec: Exec::default(),
        }
    }
}

impl Settings {
    pub fn with_bound(bound: usize) -> Self {
        Settings {
            bound,
            ..Settings::default()
        }
    }

    pub fn sequential(self) -> Self {
        Settings {
            exec: Exec::Sequential,
            ..self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_and_keep_order() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = Exec::Sequential.map(&items, |x| x * x);
        let par = Exec::Parallel.map(&items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 998_001);
    }
}
