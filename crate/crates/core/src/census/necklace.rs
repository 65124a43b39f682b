//! Conjugacy classes enumerated as necklaces over the cyclic normal-form
//! constraint, one least-rotation representative per class.
//!
//! The walk is the prenecklace recursion restricted to allowed adjacent
//! pairs. A node `a_1..a_t` with Lyndon period `p` is a necklace exactly when
//! `p | t` and the wrap pair `a_t a_1` is allowed; it is aperiodic when
//! `p = t`. Single letters of a free product are torsion and are counted
//! outside the walk.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::exec::{BudgetMeter, ShardPlan};
use crate::group::{ConjugacyRecord, Element, GroupModel, Letter};

/// Largest radius for which the class index is materialized by default.
pub const DEFAULT_INDEX_CAP: usize = 10;

const CHARGE_BATCH: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugacyCensus {
    pub max_radius: usize,
    /// Classes with `ℓ_o = n`, identity at 0 and torsion at 1.
    pub classes_exact: Vec<u64>,
    /// Primitive classes with `ℓ_o = n`.
    pub primitive_exact: Vec<u64>,
    /// Torsion classes; all have `ℓ_o = 1`.
    pub torsion_classes: u64,
    /// `#C(o,n)`, identity included.
    pub counts_pointed: Vec<u64>,
    /// `#(C(n) ∩ C(o,n))`.
    pub counts_stable_capped: Vec<u64>,
    /// `#C'(o,n)`.
    pub primitive_pointed: Vec<u64>,
    /// `#(C'(n) ∩ C(o,n))`.
    pub primitive_stable_capped: Vec<u64>,
    /// Canonical representative to class record, when indexed.
    #[serde(skip)]
    pub class_index: Option<BTreeMap<Element, ConjugacyRecord>>,
}

#[derive(Default)]
struct Tally {
    classes: Vec<u64>,
    primitive: Vec<u64>,
    necklaces: Vec<Vec<Letter>>,
}

impl Tally {
    fn new(max: usize) -> Self {
        Tally {
            classes: vec![0; max + 1],
            primitive: vec![0; max + 1],
            necklaces: Vec::new(),
        }
    }

    fn absorb(&mut self, other: Tally) {
        for (a, b) in self.classes.iter_mut().zip(other.classes) {
            *a += b;
        }
        for (a, b) in self.primitive.iter_mut().zip(other.primitive) {
            *a += b;
        }
        self.necklaces.extend(other.necklaces);
    }
}

struct Walker<'a> {
    allowed: &'a [Vec<bool>],
    k: usize,
    max: usize,
    keep: bool,
    meter: &'a BudgetMeter,
    pending: u64,
    tally: Tally,
}

impl Walker<'_> {
    fn ok(&self, x: Letter, y: Letter) -> bool {
        self.allowed[x.index()][y.index()]
    }

    fn visit(&mut self, a: &[Letter], p: usize) -> Result<()> {
        self.pending += 1;
        if self.pending == CHARGE_BATCH {
            self.meter.charge(self.pending)?;
            self.pending = 0;
        }
        let t = a.len();
        if t.is_multiple_of(p) && self.ok(a[t - 1], a[0]) {
            self.tally.classes[t] += 1;
            if p == t {
                self.tally.primitive[t] += 1;
            }
            if self.keep {
                self.tally.necklaces.push(a.to_vec());
            }
        }
        Ok(())
    }

    /// Children of the node `a` with period `p`, as `(letter, period)`.
    fn children(&self, a: &[Letter], p: usize) -> impl Iterator<Item = (Letter, usize)> + '_ {
        let t = a.len();
        let last = a[t - 1];
        let floor = a[t - p];
        (floor.index()..self.k)
            .map(|j| Letter(j as u8))
            .filter(move |&y| self.ok(last, y))
            .map(move |y| (y, if y == floor { p } else { t + 1 }))
    }

    /// Visits the strict descendants of `a`.
    fn descend(&mut self, a: &mut Vec<Letter>, p: usize) -> Result<()> {
        if a.len() == self.max {
            return Ok(());
        }
        let kids: Vec<(Letter, usize)> = self.children(a, p).collect();
        for (y, q) in kids {
            a.push(y);
            let r = self.visit(a, q).and_then(|_| self.descend(a, q));
            a.pop();
            r?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let p = std::mem::take(&mut self.pending);
        self.meter.charge(p)
    }
}

fn allowed_pairs(model: &GroupModel) -> Vec<Vec<bool>> {
    let k = model.alphabet_len();
    (0..k)
        .map(|x| {
            (0..k)
                .map(|y| model.follows(Letter(x as u8), Letter(y as u8)))
                .collect()
        })
        .collect()
}

impl ConjugacyCensus {
    /// Census to `max_radius`, indexed when `max_radius <= DEFAULT_INDEX_CAP`.
    pub fn build(model: &GroupModel, max_radius: usize, plan: &ShardPlan) -> Result<Self> {
        Self::build_with_index_cap(model, max_radius, DEFAULT_INDEX_CAP, plan)
    }

    pub fn build_with_index_cap(
        model: &GroupModel,
        max_radius: usize,
        index_cap: usize,
        plan: &ShardPlan,
    ) -> Result<Self> {
        let keep = max_radius <= index_cap;
        let allowed = allowed_pairs(model);
        let meter = BudgetMeter::new(plan.budget);
        let k = model.alphabet_len();
        let walker = |tally| Walker {
            allowed: &allowed,
            k,
            max: max_radius,
            keep,
            meter: &meter,
            pending: 0,
            tally,
        };

        // Expand level by level until there are enough subtrees to shard.
        let mut head = walker(Tally::new(max_radius));
        let mut frontier: Vec<(Vec<Letter>, usize)> = Vec::new();
        if max_radius >= 1 {
            for x in model.alphabet() {
                head.visit(&[x], 1)?;
                frontier.push((vec![x], 1));
            }
        }
        while frontier.len() < plan.shards
            && !frontier.is_empty()
            && frontier[0].0.len() < max_radius
        {
            let mut next = Vec::new();
            for (a, p) in &frontier {
                let kids: Vec<(Letter, usize)> = head.children(a, *p).collect();
                for (y, q) in kids {
                    let mut b = a.clone();
                    b.push(y);
                    head.visit(&b, q)?;
                    next.push((b, q));
                }
            }
            frontier = next;
        }
        head.flush()?;
        let parts = plan.try_map(frontier, |(mut a, p)| {
            let mut w = walker(Tally::new(max_radius));
            w.descend(&mut a, p)?;
            w.flush()?;
            Ok(w.tally)
        })?;
        let mut tally = head.tally;
        for part in parts {
            tally.absorb(part);
        }
        Ok(Self::assemble(model, max_radius, tally, keep))
    }

    fn assemble(model: &GroupModel, max_radius: usize, mut tally: Tally, keep: bool) -> Self {
        let torsion = if model.is_free() || max_radius == 0 {
            0
        } else {
            model.alphabet_len() as u64
        };
        let mut classes_exact = tally.classes.clone();
        classes_exact[0] = 1;
        if max_radius >= 1 {
            classes_exact[1] += torsion;
        }
        let loxodromic: Vec<u64> = tally.classes.clone();
        let cumulative = |v: &[u64]| {
            v.iter()
                .scan(0u64, |s, &x| {
                    *s += x;
                    Some(*s)
                })
                .collect::<Vec<_>>()
        };
        let class_index = keep.then(|| {
            let mut index = BTreeMap::new();
            let mut reps: Vec<Vec<Letter>> = vec![Vec::new()];
            if torsion > 0 {
                reps.extend(model.alphabet().map(|x| vec![x]));
            }
            reps.append(&mut tally.necklaces);
            for w in reps {
                let rec = model.record_for_core(&w);
                index.insert(rec.canonical_rep.clone(), rec);
            }
            index
        });
        ConjugacyCensus {
            max_radius,
            counts_pointed: cumulative(&classes_exact),
            counts_stable_capped: cumulative(&loxodromic),
            primitive_pointed: cumulative(&tally.primitive),
            primitive_stable_capped: cumulative(&tally.primitive),
            classes_exact,
            primitive_exact: tally.primitive,
            torsion_classes: torsion,
            class_index,
        }
    }

    /// Loxodromic classes with `τ = ℓ_o = n`.
    pub fn loxodromic_exact(&self) -> Vec<u64> {
        let mut v = self.classes_exact.clone();
        v[0] = 0;
        if self.max_radius >= 1 {
            v[1] -= self.torsion_classes;
        }
        v
    }

    /// CSV table; the envelope columns hold `n·count/exp(delta·n)` for the
    /// pointed and primitive pointed counts.
    pub fn to_csv(&self, delta: f64) -> String {
        let mut s = String::from(
            "n,pointed,stable_capped,primitive_pointed,primitive_stable_capped,envelope_pointed,envelope_primitive\n",
        );
        for n in 0..=self.max_radius {
            let e = |c: u64| n as f64 * c as f64 * (-delta * n as f64).exp();
            s.push_str(&format!(
                "{n},{},{},{},{},{},{}\n",
                self.counts_pointed[n],
                self.counts_stable_capped[n],
                self.primitive_pointed[n],
                self.primitive_stable_capped[n],
                e(self.counts_pointed[n]),
                e(self.primitive_pointed[n]),
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;

    #[test]
    fn f2_small_radii() {
        let m = GroupModel::free(2).unwrap();
        let c = ConjugacyCensus::build(&m, 3, &ShardPlan::default()).unwrap();
        assert_eq!(c.classes_exact, vec![1, 4, 8, 12]);
        assert_eq!(c.counts_pointed[2], 13);
        // 28 cyclically reduced words of length 3: 4 fixed, 24 in orbits of 3.
        assert_eq!(c.loxodromic_exact()[3], 12);
        assert_eq!(c.primitive_exact, vec![0, 4, 4, 8]);
        assert_eq!(c.class_index.as_ref().unwrap().len(), 25);
    }

    #[test]
    fn z2z3_torsion_is_pointed_only() {
        let m = GroupModel::free_product(&[2, 3]).unwrap();
        let c = ConjugacyCensus::build(&m, 4, &ShardPlan::default()).unwrap();
        assert_eq!(c.torsion_classes, 3);
        assert_eq!(c.counts_pointed[1], 4);
        assert_eq!(c.counts_stable_capped[1], 0);
        // s t, s t^2 at length 2; s t s t^2 and its rotations plus squares at 4.
        assert_eq!(c.classes_exact[2], 2);
        assert_eq!(c.classes_exact[3], 0);
        assert_eq!(c.classes_exact[4], 3);
        assert_eq!(c.primitive_exact[4], 1);
    }

    #[test]
    fn sharding_is_invisible() {
        let m = GroupModel::free(2).unwrap();
        let base = ConjugacyCensus::build(&m, 9, &ShardPlan::sequential().with_shards(1)).unwrap();
        for shards in [1, 3, 4, 16, 100] {
            for exec in [Execution::Sequential, Execution::Parallel] {
                let plan = ShardPlan::default()
                    .with_shards(shards)
                    .with_execution(exec);
                assert_eq!(ConjugacyCensus::build(&m, 9, &plan).unwrap(), base);
            }
        }
    }

    #[test]
    fn index_cap_and_radius_zero() {
        let m = GroupModel::free(2).unwrap();
        let c = ConjugacyCensus::build_with_index_cap(&m, 4, 3, &ShardPlan::default()).unwrap();
        assert!(c.class_index.is_none());
        let c = ConjugacyCensus::build(&m, 0, &ShardPlan::default()).unwrap();
        assert_eq!(c.counts_pointed, vec![1]);
        assert!(c.to_csv(1.0).lines().count() == 2);
    }
}
