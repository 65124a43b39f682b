//! Last-letter-constrained DFS over normal forms.
//!
//! Work is sharded by normal-form prefixes of a fixed depth. Each shard is a
//! DFS subtree visited in lexicographic order, and shard results come back in
//! prefix order, so collected spheres are in lexicographic order whatever the
//! shard count.

use crate::error::Result;
use crate::exec::{BudgetMeter, ShardPlan};
use crate::group::{Element, GroupModel, Letter};

const CHARGE_BATCH: u64 = 4096;

/// All normal forms of length exactly `depth`, in lexicographic order.
pub(crate) fn normal_words(model: &GroupModel, depth: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &out {
            for &x in model.successors(w.last().copied()) {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Smallest prefix depth `d <= max_depth` giving at least `shards` prefixes.
pub(crate) fn prefix_depth(model: &GroupModel, shards: usize, max_depth: usize) -> usize {
    let mut count = 1usize;
    let mut d = 0;
    while count < shards && d < max_depth {
        count = if d == 0 {
            model.alphabet_len()
        } else {
            count * model.successors(Some(Letter(0))).len().max(1)
        };
        d += 1;
    }
    d
}

struct Walker<'a, A, F> {
    model: &'a GroupModel,
    meter: &'a BudgetMeter,
    visit: &'a F,
    pending: u64,
    _acc: std::marker::PhantomData<A>,
}

impl<A, F> Walker<'_, A, F>
where
    F: Fn(&mut A, &[Letter]),
{
    fn tick(&mut self) -> Result<()> {
        self.pending += 1;
        if self.pending == CHARGE_BATCH {
            self.meter.charge(self.pending)?;
            self.pending = 0;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let p = std::mem::take(&mut self.pending);
        self.meter.charge(p)
    }

    /// Visits `word` and its extensions of length `lo..=hi`.
    fn walk(&mut self, acc: &mut A, word: &mut Vec<Letter>, lo: usize, hi: usize) -> Result<()> {
        if word.len() >= lo {
            self.tick()?;
            (self.visit)(acc, word);
        }
        if word.len() == hi {
            return Ok(());
        }
        let model = self.model;
        for &x in model.successors(word.last().copied()) {
            word.push(x);
            let r = self.walk(acc, word, lo, hi);
            word.pop();
            r?;
        }
        Ok(())
    }
}

/// Folds `visit` over every normal form with length in `lo..=hi`. Returns one
/// accumulator per shard in shard order: a head shard for words shorter than
/// the prefix depth, then one per prefix.
pub fn fold_range<A, I, F>(
    model: &GroupModel,
    lo: usize,
    hi: usize,
    plan: &ShardPlan,
    init: I,
    visit: F,
) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, &[Letter]) + Sync + Send,
{
    let meter = BudgetMeter::new(plan.budget);
    let depth = prefix_depth(model, plan.shards, hi);
    let run = |prefix: Option<Vec<Letter>>| -> Result<A> {
        let mut acc = init();
        let mut walker = Walker {
            model,
            meter: &meter,
            visit: &visit,
            pending: 0,
            _acc: std::marker::PhantomData,
        };
        match prefix {
            // Head shard: words shorter than the prefix depth.
            None => {
                for d in lo..depth.min(hi + 1) {
                    for w in normal_words(model, d) {
                        walker.tick()?;
                        visit(&mut acc, &w);
                    }
                }
            }
            Some(mut w) => walker.walk(&mut acc, &mut w, lo, hi)?,
        }
        walker.flush()?;
        Ok(acc)
    };
    let mut tasks: Vec<Option<Vec<Letter>>> = vec![None];
    tasks.extend(normal_words(model, depth).into_iter().map(Some));
    plan.try_map(tasks, run)
}

/// Elements of length exactly `n`, in lexicographic order.
pub fn enumerate_sphere(model: &GroupModel, n: usize, plan: &ShardPlan) -> Result<Vec<Element>> {
    let parts = fold_range(
        model,
        n,
        n,
        plan,
        Vec::new,
        |acc: &mut Vec<Vec<Letter>>, w| acc.push(w.to_vec()),
    )?;
    Ok(parts
        .into_iter()
        .flatten()
        .map(|w| model.element_unchecked(w))
        .collect())
}

/// Elements of length at most `radius`, in shortlex order.
pub fn enumerate_ball(model: &GroupModel, radius: usize, plan: &ShardPlan) -> Result<Vec<Element>> {
    let mut out = Vec::new();
    for n in 0..=radius {
        out.extend(enumerate_sphere(model, n, plan)?);
    }
    Ok(out)
}

/// Sphere sizes `|S(n)|` for `n = 0..=max`, by exhaustive enumeration.
pub fn sphere_counts(model: &GroupModel, max: usize, plan: &ShardPlan) -> Result<Vec<u64>> {
    let parts = fold_range(
        model,
        0,
        max,
        plan,
        || vec![0u64; max + 1],
        |acc: &mut Vec<u64>, w| acc[w.len()] += 1,
    )?;
    let mut counts = vec![0u64; max + 1];
    for p in parts {
        for (c, x) in counts.iter_mut().zip(p) {
            *c += x;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::exec::Execution;
    use std::collections::{HashSet, VecDeque};

    /// Breadth-first search over the Cayley graph with hashing.
    fn bfs_sphere_sizes(model: &GroupModel, max: usize) -> Vec<u64> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        let mut counts = vec![0u64; max + 1];
        seen.insert(model.identity());
        queue.push_back((model.identity(), 0usize));
        while let Some((g, d)) = queue.pop_front() {
            counts[d] += 1;
            if d == max {
                continue;
            }
            for x in model.alphabet() {
                let h = model.mul(&g, &model.generator(x));
                if seen.insert(h.clone()) {
                    queue.push_back((h, d + 1));
                }
            }
        }
        counts
    }

    #[test]
    fn f2_sphere_two() {
        let m = GroupModel::free(2).unwrap();
        let s = enumerate_sphere(&m, 2, &ShardPlan::default()).unwrap();
        assert_eq!(s.len(), 12);
        assert_eq!(
            enumerate_sphere(&m, 0, &ShardPlan::default()).unwrap(),
            vec![m.identity()]
        );
    }

    #[test]
    fn counts_match_bfs() {
        let m = GroupModel::free(2).unwrap();
        assert_eq!(
            sphere_counts(&m, 6, &ShardPlan::default()).unwrap(),
            bfs_sphere_sizes(&m, 6)
        );
        let p = GroupModel::free_product(&[2, 3]).unwrap();
        let c = sphere_counts(&p, 10, &ShardPlan::default()).unwrap();
        assert_eq!(c, bfs_sphere_sizes(&p, 10));
        assert_eq!(c[4], 8);
    }

    #[test]
    fn sharding_preserves_order() {
        let m = GroupModel::free(2).unwrap();
        let base = enumerate_sphere(&m, 5, &ShardPlan::sequential()).unwrap();
        for shards in [1, 2, 4, 7, 16, 64] {
            for exec in [Execution::Sequential, Execution::Parallel] {
                let plan = ShardPlan::default()
                    .with_shards(shards)
                    .with_execution(exec);
                assert_eq!(enumerate_sphere(&m, 5, &plan).unwrap(), base);
            }
        }
        let mut sorted = base.clone();
        sorted.sort();
        assert_eq!(sorted, base);
    }

    #[test]
    fn budget_fails_loudly() {
        let m = GroupModel::free(2).unwrap();
        let plan = ShardPlan::default().with_budget(100);
        assert!(matches!(
            sphere_counts(&m, 8, &plan),
            Err(Error::Budget { limit: 100 })
        ));
    }
}
