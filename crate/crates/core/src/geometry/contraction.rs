//! Exhaustive audits of contraction, bounded intersection and stable axes
//! inside a finite ball.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::axis::{projection_diameter_growing, AxisSet, AxisTemplate};
use super::path::AxisLine;
use crate::enumeration::enumerate_ball;
use crate::error::{Error, Result};
use crate::exec::{BudgetMeter, ShardPlan};
use crate::group::{Element, GroupModel, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionReport {
    pub sample_radius: usize,
    /// Least `C` such that every geodesic in the ball at distance `> C`
    /// from the axis has projection diameter `<= C`.
    pub c_emp: usize,
    /// `[d]`: largest projection diameter among geodesics at distance `d`.
    pub max_diameter_by_distance: Vec<usize>,
    pub geodesics_checked: u64,
}

/// Ball vertices with their right-multiplication neighbours.
struct BallGraph {
    vertices: Vec<Element>,
    /// `next[v][x]`: index of `v·x` if it lies in the ball.
    next: Vec<Vec<Option<u32>>>,
}

impl BallGraph {
    fn new(model: &GroupModel, radius: usize, plan: &ShardPlan) -> Result<Self> {
        let vertices = enumerate_ball(model, radius, plan)?;
        let index: HashMap<&[Letter], u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.word(), i as u32))
            .collect();
        let next = vertices
            .iter()
            .map(|v| {
                model
                    .alphabet()
                    .map(|x| {
                        let w = model.mul_words(v.word(), &[x]);
                        index.get(w.as_slice()).copied()
                    })
                    .collect()
            })
            .collect();
        Ok(BallGraph { vertices, next })
    }
}

/// Audits `C`-contraction of `axis` against every geodesic with both
/// endpoints in the ball of radius `sample_radius`.
///
/// Each geodesic from `x` is a normal-form walk `x·w`; the walk carries the
/// running distance to the axis and the union of projections, so every pair
/// of endpoints costs one step.
pub fn contraction_audit(
    model: &GroupModel,
    axis: &AxisSet,
    sample_radius: usize,
    plan: &ShardPlan,
) -> Result<ContractionReport> {
    let ball = BallGraph::new(model, sample_radius, plan)?;
    let n = ball.vertices.len();
    let meter = BudgetMeter::new(plan.budget);
    meter.charge((n as u64).saturating_mul(n as u64))?;

    let mut axis = axis.clone();
    let mut targets: Vec<Element> = Vec::new();
    let mut target_index: HashMap<Element, usize> = HashMap::new();
    let mut proj_bits = Vec::with_capacity(n);
    let mut dist = Vec::with_capacity(n);
    for v in &ball.vertices {
        let p = axis.project_growing(model, v);
        let mut bits = 0u128;
        for q in p.points {
            let next = targets.len();
            let i = *target_index.entry(q.clone()).or_insert_with(|| {
                targets.push(q);
                next
            });
            if i >= 128 {
                return Err(Error::Unsupported(
                    "more than 128 distinct projection points; lower the radius".into(),
                ));
            }
            bits |= 1 << i;
        }
        proj_bits.push(bits);
        dist.push(p.distance);
    }
    let tdist: Vec<Vec<usize>> = targets
        .iter()
        .map(|p| targets.iter().map(|q| model.distance(p, q)).collect())
        .collect();
    let union_diameter = |bits: u128| {
        let mut d = 0;
        let mut a = bits;
        while a != 0 {
            let i = a.trailing_zeros() as usize;
            a &= a - 1;
            let mut b = a;
            while b != 0 {
                let j = b.trailing_zeros() as usize;
                b &= b - 1;
                d = d.max(tdist[i][j]);
            }
        }
        d
    };
    let max_d = dist.iter().copied().max().unwrap_or(0);

    let chunk = n.div_ceil(plan.shards.max(1)).max(1);
    let starts: Vec<std::ops::Range<usize>> = (0..n)
        .step_by(chunk)
        .map(|s| s..(s + chunk).min(n))
        .collect();
    let parts = plan.map(starts, |range| {
        let mut best = vec![0usize; max_d + 1];
        let mut cache: HashMap<u128, usize> = HashMap::new();
        let mut steps = 0u64;
        let mut stack: Vec<(u32, Option<Letter>, usize, u128, usize)> = Vec::new();
        for x in range {
            stack.push((
                x as u32,
                None,
                dist[x],
                proj_bits[x],
                union_diameter(proj_bits[x]),
            ));
            while let Some((v, last, md, bits, diam)) = stack.pop() {
                steps += 1;
                best[md] = best[md].max(diam);
                for &y in model.successors(last) {
                    let Some(u) = ball.next[v as usize][y.index()] else {
                        continue;
                    };
                    let u = u as usize;
                    let nb = bits | proj_bits[u];
                    let nd = if nb == bits {
                        diam
                    } else {
                        *cache.entry(nb).or_insert_with(|| union_diameter(nb))
                    };
                    stack.push((u as u32, Some(y), md.min(dist[u]), nb, nd));
                }
            }
        }
        (best, steps)
    });
    let mut best = vec![0usize; max_d + 1];
    let mut checked = 0u64;
    for (b, s) in parts {
        checked += s;
        for (x, y) in best.iter_mut().zip(b) {
            *x = (*x).max(y);
        }
    }
    let c_emp = (0..=max_d + best.iter().copied().max().unwrap_or(0))
        .find(|&c| best.iter().skip(c + 1).all(|&d| d <= c))
        .unwrap_or(0);
    Ok(ContractionReport {
        sample_radius,
        c_emp,
        max_diameter_by_distance: best,
        geodesics_checked: checked,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedIntersectionReport {
    pub sample_radius: usize,
    /// Largest `diam π_{X'}(X)` or `diam π_X(X')` over distinct translates.
    pub b_emp: usize,
    pub pairs_checked: usize,
    pub worst_translate: Option<String>,
    /// The bound did not change when the truncation of the axes grew.
    pub truncation_stable: bool,
}

/// Audits bounded intersection between `X = Ax(f)` and its distinct
/// translates `t·X`, `|t| <= sample_radius`. Both axes are truncated to a
/// ball; the audit is repeated with a larger truncation to flag instability.
pub fn bounded_intersection_audit(
    model: &GroupModel,
    f: &Element,
    sample_radius: usize,
    plan: &ShardPlan,
) -> Result<BoundedIntersectionReport> {
    let template = Arc::new(AxisTemplate::new(model, f, plan)?);
    let translates: Vec<Element> = enumerate_ball(model, sample_radius, plan)?
        .into_iter()
        .filter(|t| !template.contains(model, t))
        .collect();
    let trunc = sample_radius + 2 * template.root.len() + 2;
    let audit = |w: usize| {
        let x = template.materialize(model, &model.identity(), w);
        plan.map(translates.clone(), |t| {
            let mut x = x.clone();
            let mut y = template.materialize(model, &t, w + t.len());
            let y_pts: Vec<Element> = y
                .points
                .iter()
                .filter(|p| model.distance(p, &t) <= w)
                .cloned()
                .collect();
            let x_pts = x.points.clone();
            let a = projection_diameter_growing(model, &x_pts, &mut y);
            let b = projection_diameter_growing(model, &y_pts, &mut x);
            a.max(b)
        })
    };
    let first = audit(trunc);
    let second = audit(trunc + 2 * template.root.len());
    let worst = first
        .iter()
        .enumerate()
        .max_by_key(|&(i, b)| (*b, std::cmp::Reverse(i)))
        .map(|(i, _)| i);
    Ok(BoundedIntersectionReport {
        sample_radius,
        b_emp: first.iter().copied().max().unwrap_or(0),
        pairs_checked: translates.len(),
        worst_translate: worst.map(|i| model.format(&translates[i])),
        truncation_stable: first == second,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableAxisSample {
    pub point: String,
    /// `d(x, g·x)`.
    pub displacement: usize,
    /// `|τ[g] - d(x, g·x)|`.
    pub deviation: usize,
    /// `d(x, g·x) >= 3R`.
    pub precondition: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableAxisReport {
    pub tau: usize,
    pub r: usize,
    pub samples: Vec<StableAxisSample>,
    pub max_deviation: usize,
    /// `max_deviation <= 2R` over samples meeting the precondition.
    pub within_bound: bool,
}

/// Audits `|τ[g] - d(x, g·x)| <= 2R` at the given sample points.
pub fn stable_axis_audit(
    model: &GroupModel,
    g: &Element,
    r: usize,
    samples: &[Element],
) -> Result<StableAxisReport> {
    let tau = AxisLine::of(model, g)?.period();
    let samples: Vec<StableAxisSample> = samples
        .iter()
        .map(|x| {
            let d = model.distance(x, &model.mul(g, x));
            StableAxisSample {
                point: model.format(x),
                displacement: d,
                deviation: tau.abs_diff(d),
                precondition: d >= 3 * r,
            }
        })
        .collect();
    let max_deviation = samples
        .iter()
        .filter(|s| s.precondition)
        .map(|s| s.deviation)
        .max()
        .unwrap_or(0);
    Ok(StableAxisReport {
        tau,
        r,
        within_bound: max_deviation <= 2 * r,
        max_deviation,
        samples,
    })
}

/// Vertices `ℓ(j)`, `-periods·τ <= j <= periods·τ`, of the axis line of `g`.
pub fn axis_samples(model: &GroupModel, g: &Element, periods: usize) -> Result<Vec<Element>> {
    let line = AxisLine::of(model, g)?;
    let span = (periods * line.period()) as i64;
    Ok((-span..=span).map(|j| line.vertex(model, j)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan() -> ShardPlan {
        ShardPlan::default()
    }

    fn axis(m: &GroupModel, f: &str, r: usize) -> AxisSet {
        AxisSet::new(m, &m.parse(f).unwrap(), &m.identity(), r, &plan()).unwrap()
    }

    /// Pairwise brute force over endpoint pairs.
    fn brute_c(m: &GroupModel, x: &mut AxisSet, radius: usize) -> usize {
        let ball = enumerate_ball(m, radius, &plan()).unwrap();
        let mut by_dist: HashMap<usize, usize> = HashMap::new();
        for p in &ball {
            for q in &ball {
                let path = super::super::path::GeodesicPath::between(m, p, q).vertices(m);
                let d = path.iter().map(|v| x.distance_growing(m, v)).min().unwrap();
                let diam = projection_diameter_growing(m, &path, x);
                let e = by_dist.entry(d).or_insert(0);
                *e = (*e).max(diam);
            }
        }
        (0..)
            .find(|&c| by_dist.iter().all(|(&d, &v)| d <= c || v <= c))
            .unwrap()
    }

    #[test]
    fn contraction_constants() {
        let m = GroupModel::free(2).unwrap();
        let r = contraction_audit(&m, &axis(&m, "a", 4), 5, &plan()).unwrap();
        assert_eq!(r.c_emp, 0);
        // A vertex halfway between orbit points projects to both, so the
        // orbit axis of ab has C = 2 = spacing rather than the line's 0.
        let mut x = axis(&m, "a b", 4);
        let r = contraction_audit(&m, &x, 4, &plan()).unwrap();
        assert_eq!(r.c_emp, 2);
        assert_eq!(r.c_emp, brute_c(&m, &mut x, 4));
        assert_eq!(r.geodesics_checked, 161 * 161);
        let p = GroupModel::free_product(&[2, 3]).unwrap();
        let mut y = axis(&p, "a b", 4);
        let r = contraction_audit(&p, &y, 6, &plan()).unwrap();
        assert_eq!(r.c_emp, brute_c(&p, &mut y, 6));
    }

    #[test]
    fn contraction_is_shard_invariant() {
        let m = GroupModel::free(2).unwrap();
        let x = axis(&m, "a b", 4);
        let base = contraction_audit(&m, &x, 4, &ShardPlan::sequential().with_shards(1)).unwrap();
        for s in [4, 16] {
            assert_eq!(
                contraction_audit(&m, &x, 4, &plan().with_shards(s)).unwrap(),
                base
            );
        }
    }

    #[test]
    fn bounded_intersection() {
        let m = GroupModel::free(2).unwrap();
        let r = bounded_intersection_audit(&m, &m.parse("a").unwrap(), 2, &plan()).unwrap();
        assert!(r.truncation_stable);
        // b·Ax(a) and Ax(a) project to single points on each other.
        let x = axis(&m, "a", 10);
        let mut y = Arc::clone(&x.template).materialize(&m, &m.parse("b").unwrap(), 12);
        assert_eq!(projection_diameter_growing(&m, &x.points, &mut y), 0);
        let r = bounded_intersection_audit(&m, &m.parse("a b").unwrap(), 4, &plan()).unwrap();
        assert!(r.truncation_stable);
        assert!(r.b_emp <= 4, "{r:?}");
    }

    #[test]
    fn stable_axis_examples() {
        let m = GroupModel::free(2).unwrap();
        let ab = m.parse("a b").unwrap();
        let r = stable_axis_audit(&m, &ab, 0, &[m.identity()]).unwrap();
        assert_eq!(r.max_deviation, 0);
        let g = m.parse("a b a'").unwrap();
        let r = stable_axis_audit(&m, &g, 0, &[m.parse("a").unwrap()]).unwrap();
        assert_eq!(r.samples[0].displacement, 1);
        assert_eq!(r.max_deviation, 0);
        let samples = axis_samples(&m, &g, 3).unwrap();
        assert!(stable_axis_audit(&m, &g, 0, &samples).unwrap().within_bound);
        let p = GroupModel::free_product(&[2, 3]).unwrap();
        let st = p.parse("a b").unwrap();
        assert_eq!(
            stable_axis_audit(&p, &st, 0, &[p.identity()])
                .unwrap()
                .max_deviation,
            0
        );
        // Off-axis points move farther than τ.
        let r = stable_axis_audit(&m, &ab, 1, &[m.parse("a'").unwrap()]).unwrap();
        assert_eq!(r.samples[0].displacement, 4);
        assert!(r.within_bound);
    }
}
