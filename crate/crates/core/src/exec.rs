//! Sharded execution. Work is cut into independent shards whose results are
//! merged in shard order, so the merged output never depends on scheduling.
//!
//! With the `parallel` feature (default) shards run on the rayon pool;
//! without it, or with [`Execution::Sequential`], they run in order on the
//! calling thread.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default hard cap on enumerated elements.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// How enumeration work is cut and run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShardPlan {
    /// Requested number of shards; the prefix depth is the smallest one that
    /// yields at least this many prefixes.
    pub shards: usize,
    pub execution: Execution,
    /// Hard cap on the number of visited elements.
    pub budget: u64,
}

impl Default for ShardPlan {
    fn default() -> Self {
        ShardPlan {
            shards: 16,
            execution: Execution::default(),
            budget: DEFAULT_BUDGET,
        }
    }
}

impl ShardPlan {
    pub fn sequential() -> Self {
        ShardPlan {
            shards: 1,
            execution: Execution::Sequential,
            ..ShardPlan::default()
        }
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards.max(1);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Maps `f` over `items`, returning results in input order.
    pub fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        match self.execution {
            #[cfg(feature = "parallel")]
            Execution::Parallel if items.len() > 1 => {
                use rayon::prelude::*;
                items.into_par_iter().map(f).collect()
            }
            _ => items.into_iter().map(f).collect(),
        }
    }

    /// Maps fallible work over `items`; the first error in input order wins.
    pub fn try_map<T, R, F>(&self, items: Vec<T>, f: F) -> Result<Vec<R>>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> Result<R> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }
}

/// Shared element counter that fails once the budget is exhausted.
#[derive(Debug)]
pub struct BudgetMeter {
    limit: u64,
    used: AtomicU64,
}

impl BudgetMeter {
    pub fn new(limit: u64) -> Self {
        BudgetMeter {
            limit,
            used: AtomicU64::new(0),
        }
    }

    pub fn charge(&self, amount: u64) -> Result<()> {
        let prev = self.used.fetch_add(amount, Ordering::Relaxed);
        if prev + amount > self.limit {
            Err(Error::Budget { limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order_in_both_modes() {
        let items: Vec<u32> = (0..100).collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            let plan = ShardPlan::default().with_execution(exec);
            let out = plan.map(items.clone(), |x| x * 2);
            assert_eq!(out, items.iter().map(|x| x * 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn meter_trips_at_limit() {
        let m = BudgetMeter::new(10);
        assert!(m.charge(10).is_ok());
        assert_eq!(m.charge(1), Err(Error::Budget { limit: 10 }));
    }
}
