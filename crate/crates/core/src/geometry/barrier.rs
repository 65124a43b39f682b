//! Barriers along geodesics and the barrier-free and fractional censuses.
//!
//! Geodesics are unique in the supported models, so every path is a normal
//! word read from a start vertex. For a point `p` and the path `γ` from `o`
//! along `w` with `l = lcp(p, w)`, the vertices of `γ` within `ε` of `p`
//! form the interval `[|p| - ε, ε + 2l + m - |p|]` (clipped to `[0, |w|]`),
//! where `m = 1` when `p` and `w` diverge inside one free-product factor.

use serde::Serialize;

use crate::enumeration::{fold_range, normal_words};
use crate::error::{Error, Result};
use crate::exec::ShardPlan;
use crate::fit::{log_slope, LineFit};
use crate::group::{Element, GroupModel, Letter};

use super::path::GeodesicPath;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BarrierSpec {
    pub epsilon: usize,
    #[serde(skip)]
    pub f: Element,
    /// Endpoint slack: geodesics may start in `B(o, M)` and end in `B(g·o, M)`.
    pub m: usize,
    /// `t·o` must be reached no later than `t·f·o` along the geodesic.
    pub oriented: bool,
    /// Only barriers whose contact interval avoids both endpoints count.
    pub proper: bool,
}

impl BarrierSpec {
    /// Oriented, non-proper barriers with no endpoint slack.
    pub fn new(model: &GroupModel, epsilon: usize, f: &Element) -> Result<Self> {
        if f.is_empty() || model.is_torsion(f) {
            return Err(Error::Domain(format!(
                "barrier element {} must have infinite order",
                model.format(f)
            )));
        }
        Ok(BarrierSpec {
            epsilon,
            f: f.clone(),
            m: 0,
            oriented: true,
            proper: false,
        })
    }

    pub fn with_slack(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_oriented(mut self, oriented: bool) -> Self {
        self.oriented = oriented;
        self
    }

    pub fn with_proper(mut self, proper: bool) -> Self {
        self.proper = proper;
        self
    }
}

/// A barrier `t` found along a path, with the vertex index intervals of the
/// path within `ε` of `t·o` and of `t·f·o`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarrierHit {
    pub t: Element,
    pub near_t: (usize, usize),
    pub near_tf: (usize, usize),
}

impl BarrierHit {
    /// Minimal subpaths `[x, y]` that still carry this barrier.
    fn minimal_intervals(&self, oriented: bool) -> Vec<(usize, usize)> {
        let ((a1, b1), (a2, b2)) = (self.near_t, self.near_tf);
        let (lo, hi) = (a1.max(a2), b1.min(b2));
        if lo <= hi {
            return (lo..=hi).map(|c| (c, c)).collect();
        }
        if b1 < a2 {
            vec![(b1, a2)]
        } else if oriented {
            Vec::new()
        } else {
            vec![(b2, a1)]
        }
    }
}

/// Vertices of the path from `o` along `w` within `eps` of `p`.
fn near_interval(
    model: &GroupModel,
    w: &[Letter],
    p: &[Letter],
    eps: usize,
) -> Option<(usize, usize)> {
    let l = w.iter().zip(p).take_while(|(x, y)| x == y).count();
    if p.len() > eps + l {
        return None;
    }
    let m = usize::from(
        l < p.len() && l < w.len() && !model.is_free() && model.factor(p[l]) == model.factor(w[l]),
    );
    let lo = p.len().saturating_sub(eps);
    let hi = (eps + 2 * l + m).saturating_sub(p.len()).min(w.len());
    (lo <= hi).then_some((lo, hi))
}

/// Precomputed pieces shared by every scan under one spec.
pub(crate) struct BarrierProbe<'a> {
    model: &'a GroupModel,
    spec: &'a BarrierSpec,
    ball: Vec<Vec<Letter>>,
}

impl<'a> BarrierProbe<'a> {
    pub(crate) fn new(model: &'a GroupModel, spec: &'a BarrierSpec) -> Self {
        let ball = (0..=spec.epsilon)
            .flat_map(|d| normal_words(model, d))
            .collect();
        BarrierProbe { model, spec, ball }
    }

    /// Visits every barrier of the path from `o` along `w`, in order of the
    /// path vertex it was found from, until `visit` returns false.
    fn scan(
        &self,
        w: &[Letter],
        mut visit: impl FnMut(Vec<Letter>, (usize, usize), (usize, usize)) -> bool,
    ) {
        let eps = self.spec.epsilon;
        let f = self.spec.f.word();
        for k in 0..=w.len() {
            for u in &self.ball {
                let t = self.model.mul_words(&w[..k], u);
                // Report each t once, from the first vertex within ε of it.
                let Some(st) = near_interval(self.model, w, &t, eps) else {
                    continue;
                };
                if st.0 != k {
                    continue;
                }
                let tf = self.model.mul_words(&t, f);
                let Some(stf) = near_interval(self.model, w, &tf, eps) else {
                    continue;
                };
                if self.spec.oriented && st.0 > stf.1 {
                    continue;
                }
                if self.spec.proper {
                    let entry = st.0.min(stf.0);
                    let exit = st.1.max(stf.1);
                    if entry == 0 || exit == w.len() {
                        continue;
                    }
                }
                if !visit(t, st, stf) {
                    return;
                }
            }
        }
    }

    pub(crate) fn has_barrier(&self, w: &[Letter]) -> bool {
        let mut found = false;
        self.scan(w, |_, _, _| {
            found = true;
            false
        });
        found
    }

    /// `jmax[i]`: the largest `j` with `[i, j]` barrier-free, or `None` when
    /// even the single vertex `i` carries a barrier.
    fn barrier_free_reach(&self, w: &[Letter]) -> Vec<Option<usize>> {
        let n = w.len();
        // first_end[x]: least y over minimal barrier intervals [x, y].
        let mut first_end = vec![usize::MAX; n + 1];
        self.scan(w, |t, st, stf| {
            let hit = BarrierHit {
                t: self.model.element_unchecked(t),
                near_t: st,
                near_tf: stf,
            };
            for (x, y) in hit.minimal_intervals(self.spec.oriented) {
                first_end[x] = first_end[x].min(y);
            }
            true
        });
        let mut reach = vec![None; n + 1];
        let mut bound = usize::MAX;
        for i in (0..=n).rev() {
            bound = bound.min(first_end[i]);
            reach[i] = if bound == usize::MAX {
                Some(n)
            } else if bound > i {
                Some(bound - 1)
            } else {
                None
            };
        }
        reach
    }
}

/// The first barrier along `path` (ordered by the first vertex within `ε` of
/// `t·o`), or `None` if the path is barrier-free.
pub fn find_barrier(
    model: &GroupModel,
    path: &GeodesicPath,
    spec: &BarrierSpec,
) -> Option<BarrierHit> {
    let scanner = BarrierProbe::new(model, spec);
    let mut hit = None;
    scanner.scan(&path.word, |t, st, stf| {
        hit = Some(BarrierHit {
            t: model.mul(&path.start, &model.element_unchecked(t)),
            near_t: st,
            near_tf: stf,
        });
        false
    });
    hit
}

/// Whether `g` has a barrier-free geodesic from `B(o, M)` to `B(g·o, M)`.
fn element_barrier_free(scanner: &BarrierProbe<'_>, slack: &[Vec<Letter>], g: &[Letter]) -> bool {
    let model = scanner.model;
    slack.iter().any(|x| {
        let xg = model.mul_words(&model.inv_word(x), g);
        slack
            .iter()
            .any(|y| !scanner.has_barrier(&model.mul_words(&xg, y)))
    })
}

/// Per-radius counts for a census over spheres `0..=max_radius`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionCensus {
    pub satisfied: Vec<u64>,
    pub totals: Vec<u64>,
    pub fractions: Vec<f64>,
}

impl FractionCensus {
    pub(crate) fn from_counts(satisfied: Vec<u64>, totals: Vec<u64>) -> Self {
        let fractions = satisfied
            .iter()
            .zip(&totals)
            .map(|(&s, &t)| if t == 0 { 0.0 } else { s as f64 / t as f64 })
            .collect();
        FractionCensus {
            satisfied,
            totals,
            fractions,
        }
    }

    /// Log-linear fit of the fractions on `lo..=hi`; `exp(slope)` is the
    /// per-step decay rate.
    pub fn decay(&self, lo: usize, hi: usize) -> Result<LineFit> {
        let points = self.window(lo, hi, &self.fractions)?;
        log_slope(&points)
            .ok_or_else(|| Error::InsufficientData("no positive fractions to fit".into()))
    }

    /// Slope of `ln satisfied(n)` on `lo..=hi`.
    pub fn exponent(&self, lo: usize, hi: usize) -> Result<LineFit> {
        let counts: Vec<f64> = self.satisfied.iter().map(|&c| c as f64).collect();
        let points = self.window(lo, hi, &counts)?;
        log_slope(&points)
            .ok_or_else(|| Error::InsufficientData("no positive counts to fit".into()))
    }

    fn window(&self, lo: usize, hi: usize, values: &[f64]) -> Result<Vec<(usize, f64)>> {
        if lo >= hi || hi >= values.len() {
            return Err(Error::Window(format!(
                "window {lo}..={hi} needs two radii below {}",
                values.len()
            )));
        }
        Ok((lo..=hi).map(|n| (n, values[n])).collect())
    }

    /// True iff fractions never increase on `lo..=hi`.
    pub fn nonincreasing(&self, lo: usize, hi: usize) -> bool {
        self.fractions[lo..=hi].windows(2).all(|p| p[1] <= p[0])
    }

    /// CSV with `n,satisfied,total,fraction`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,satisfied,total,fraction\n");
        for (n, ((a, b), c)) in self
            .satisfied
            .iter()
            .zip(&self.totals)
            .zip(&self.fractions)
            .enumerate()
        {
            s.push_str(&format!("{n},{a},{b},{c}\n"));
        }
        s
    }
}

fn sphere_census<F>(
    model: &GroupModel,
    max_radius: usize,
    plan: &ShardPlan,
    classify: F,
) -> Result<FractionCensus>
where
    F: Fn(&[Letter]) -> bool + Sync + Send,
{
    let parts = fold_range(
        model,
        0,
        max_radius,
        plan,
        || (vec![0u64; max_radius + 1], vec![0u64; max_radius + 1]),
        |(sat, tot): &mut (Vec<u64>, Vec<u64>), w| {
            tot[w.len()] += 1;
            if classify(w) {
                sat[w.len()] += 1;
            }
        },
    )?;
    let mut sat = vec![0u64; max_radius + 1];
    let mut tot = vec![0u64; max_radius + 1];
    for (s, t) in parts {
        for n in 0..=max_radius {
            sat[n] += s[n];
            tot[n] += t[n];
        }
    }
    Ok(FractionCensus::from_counts(sat, tot))
}

/// Fraction of each sphere that is `(ε, M, f)`-barrier-free.
pub fn barrier_free_census(
    model: &GroupModel,
    spec: &BarrierSpec,
    max_radius: usize,
    plan: &ShardPlan,
) -> Result<FractionCensus> {
    let scanner = BarrierProbe::new(model, spec);
    let slack: Vec<Vec<Letter>> = (0..=spec.m).flat_map(|d| normal_words(model, d)).collect();
    sphere_census(model, max_radius, plan, |w| {
        element_barrier_free(&scanner, &slack, w)
    })
}

/// Largest total length of vertex-disjoint closed barrier-free intervals of
/// length at least `min_len` along the path from `o` along `w`.
fn fractional_cover(scanner: &BarrierProbe<'_>, w: &[Letter], min_len: usize) -> usize {
    let n = w.len();
    let reach = scanner.barrier_free_reach(w);
    // best[i]: optimum using vertices i..=n only.
    let mut best = vec![0usize; n + 2];
    for i in (0..=n).rev() {
        let mut b = best[i + 1];
        if let Some(j_max) = reach[i] {
            for j in (i + min_len)..=j_max {
                b = b.max(j - i + best[j + 1]);
            }
        }
        best[i] = b;
    }
    best[0]
}

/// Whether the geodesic `[o, g·o]` is `(θ, L)`-fractionally barrier-free.
/// `spec.proper` is ignored.
pub fn is_fractionally_barrier_free(
    model: &GroupModel,
    spec: &BarrierSpec,
    theta: f64,
    min_len: usize,
    g: &Element,
) -> bool {
    let spec = spec.clone().with_proper(false);
    let scanner = BarrierProbe::new(model, &spec);
    fractional_cover(&scanner, g.word(), min_len) as f64 >= theta * g.len() as f64
}

/// Fraction of each sphere in `V^{θ,L}`. Decided exactly: the best cover is
/// an interval dynamic program over barrier-free reaches. Properness is
/// relative to each interval, so `spec.proper` is ignored here.
pub fn fractional_barrier_census(
    model: &GroupModel,
    spec: &BarrierSpec,
    theta: f64,
    min_len: usize,
    max_radius: usize,
    plan: &ShardPlan,
) -> Result<FractionCensus> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Input(format!("theta {theta} outside (0, 1]")));
    }
    let spec = spec.clone().with_proper(false);
    let scanner = BarrierProbe::new(model, &spec);
    sphere_census(model, max_radius, plan, |w| {
        fractional_cover(&scanner, w, min_len) as f64 >= theta * w.len() as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::enumerate_ball;
    use proptest::prelude::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    fn spec(m: &GroupModel, eps: usize, f: &str) -> BarrierSpec {
        BarrierSpec::new(m, eps, &m.parse(f).unwrap()).unwrap()
    }

    /// Independent definition: every `t` in a large ball, distances to every
    /// path vertex.
    fn brute_has_barrier(m: &GroupModel, path: &GeodesicPath, spec: &BarrierSpec) -> bool {
        let verts = path.vertices(m);
        let radius = path.start.len() + path.len() + spec.epsilon;
        let near = |p: &Element| -> Vec<usize> {
            (0..verts.len())
                .filter(|&k| m.distance(p, &verts[k]) <= spec.epsilon)
                .collect()
        };
        enumerate_ball(m, radius, &ShardPlan::sequential())
            .unwrap()
            .iter()
            .any(|t| {
                let a = near(t);
                let b = near(&m.mul(t, &spec.f));
                if a.is_empty() || b.is_empty() {
                    return false;
                }
                let oriented_ok = !spec.oriented || a[0] <= *b.last().unwrap();
                let proper_ok = !spec.proper || {
                    let lo = a[0].min(b[0]);
                    let hi = a.last().unwrap().max(b.last().unwrap());
                    lo > 0 && *hi < path.len()
                };
                oriented_ok && proper_ok
            })
    }

    #[test]
    fn find_barrier_examples() {
        let m = f2();
        let path = GeodesicPath::from_origin(&m, &m.parse("a b a b").unwrap());
        assert_eq!(
            find_barrier(&m, &path, &spec(&m, 0, "a b")).unwrap().t,
            m.identity()
        );
        let path = GeodesicPath::from_origin(&m, &m.parse("a a a a").unwrap());
        assert!(find_barrier(&m, &path, &spec(&m, 0, "b")).is_none());
        let path = GeodesicPath::from_origin(&m, &m.parse("a b' a").unwrap());
        let hit = find_barrier(&m, &path, &spec(&m, 1, "a b")).unwrap();
        assert_eq!(hit.t, m.identity());
        assert_eq!(hit.near_tf, (1, 1));
    }

    #[test]
    fn orientation_matters_on_inverse() {
        let m = f2();
        let path = GeodesicPath::from_origin(&m, &m.parse("b' a'").unwrap());
        let s = spec(&m, 0, "a b");
        assert!(find_barrier(&m, &path, &s).is_none());
        let hit = find_barrier(&m, &path, &s.clone().with_oriented(false)).unwrap();
        assert_eq!(m.format(&hit.t), "b' a'");
    }

    #[test]
    fn sphere_two_fraction() {
        let m = f2();
        let c = barrier_free_census(&m, &spec(&m, 0, "a b"), 2, &ShardPlan::default()).unwrap();
        assert_eq!(c.satisfied[2], 11);
        assert_eq!(c.totals[2], 12);
        assert_eq!(c.fractions[0], 1.0);
    }

    #[test]
    fn census_matches_path_brute_force() {
        for m in [f2(), GroupModel::free_product(&[2, 3]).unwrap()] {
            let f = if m.is_free() { "a b'" } else { "a b" };
            for eps in 0..=1 {
                for proper in [false, true] {
                    let s = spec(&m, eps, f).with_proper(proper);
                    let c = barrier_free_census(&m, &s, 5, &ShardPlan::default()).unwrap();
                    let mut sat = vec![0u64; 6];
                    for g in enumerate_ball(&m, 5, &ShardPlan::default()).unwrap() {
                        if !brute_has_barrier(&m, &GeodesicPath::from_origin(&m, &g), &s) {
                            sat[g.len()] += 1;
                        }
                    }
                    assert_eq!(c.satisfied, sat, "eps {eps} proper {proper}");
                }
            }
        }
    }

    #[test]
    fn slack_only_adds_barrier_free_elements() {
        let m = f2();
        let s = spec(&m, 0, "a b");
        let plan = ShardPlan::default();
        let tight = barrier_free_census(&m, &s, 5, &plan).unwrap();
        let loose = barrier_free_census(&m, &s.clone().with_slack(1), 5, &plan).unwrap();
        for n in 0..=5 {
            assert!(loose.satisfied[n] >= tight.satisfied[n]);
        }
        // ab itself: [a, ab·b] = a·(b b) avoids ab.
        assert_eq!(loose.satisfied[2], 12);
    }

    #[test]
    fn theta_one_is_the_barrier_census() {
        let m = f2();
        let plan = ShardPlan::default();
        for eps in 0..=1 {
            let s = spec(&m, eps, "a b");
            let plain = barrier_free_census(&m, &s, 7, &plan).unwrap();
            let frac = fractional_barrier_census(&m, &s, 1.0, 1, 7, &plan).unwrap();
            assert_eq!(plain.satisfied[1..], frac.satisfied[1..]);
        }
    }

    #[test]
    fn fractional_cover_examples() {
        let m = f2();
        let s = spec(&m, 0, "a b");
        let scanner = BarrierProbe::new(&m, &s);
        // a a a b b b: the barrier spans [2, 4]; best cover [0, 2] + [3, 6].
        let w = m.parse("a a a b b b").unwrap();
        assert_eq!(fractional_cover(&scanner, w.word(), 1), 5);
        assert_eq!(fractional_cover(&scanner, w.word(), 3), 3);
        assert!(is_fractionally_barrier_free(&m, &s, 0.5, 3, &w));
        assert!(!is_fractionally_barrier_free(&m, &s, 0.9, 1, &w));
    }

    /// Exhaustive search over families of disjoint closed intervals.
    fn brute_cover(m: &GroupModel, s: &BarrierSpec, w: &[Letter], min_len: usize) -> usize {
        let n = w.len();
        let free = |i: usize, j: usize| {
            let path = GeodesicPath {
                start: m.element_unchecked(w[..i].to_vec()),
                word: w[i..j].to_vec(),
            };
            find_barrier(m, &path, s).is_none()
        };
        fn go(i: usize, n: usize, min_len: usize, free: &dyn Fn(usize, usize) -> bool) -> usize {
            if i > n {
                return 0;
            }
            let mut best = go(i + 1, n, min_len, free);
            for j in (i + min_len)..=n {
                if free(i, j) {
                    best = best.max(j - i + go(j + 1, n, min_len, free));
                }
            }
            best
        }
        go(0, n, min_len, &free)
    }

    proptest! {
        #[test]
        fn cover_matches_exhaustive(
            raw in proptest::collection::vec(0u8..4, 0..9),
            eps in 0usize..2,
            min_len in 1usize..4,
            oriented in any::<bool>(),
        ) {
            let m = f2();
            let w = m.normalize(&raw.into_iter().map(Letter).collect::<Vec<_>>()).unwrap();
            let s = spec(&m, eps, "a b").with_oriented(oriented);
            let scanner = BarrierProbe::new(&m, &s);
            prop_assert_eq!(fractional_cover(&scanner, w.word(), min_len), brute_cover(&m, &s, w.word(), min_len));
        }

        #[test]
        fn find_barrier_matches_brute(
            raw in proptest::collection::vec(0u8..5, 0..7),
            start in proptest::collection::vec(0u8..5, 0..3),
            eps in 0usize..2,
            proper in any::<bool>(),
        ) {
            let m = GroupModel::free_product(&[2, 3]).unwrap();
            let to_el = |v: Vec<u8>| m.normalize(&v.into_iter().map(|x| Letter(x % 3)).collect::<Vec<_>>()).unwrap();
            let g = to_el(raw);
            let x = to_el(start);
            let path = GeodesicPath::between(&m, &x, &m.mul(&x, &g));
            let s = spec(&m, eps, "a b").with_proper(proper);
            prop_assert_eq!(find_barrier(&m, &path, &s).is_some(), brute_has_barrier(&m, &path, &s));
        }

        #[test]
        fn barrier_free_fraction_nonincreasing_in_epsilon(n in 2usize..6) {
            let m = f2();
            let plan = ShardPlan::default();
            let a = barrier_free_census(&m, &spec(&m, 0, "a b"), n, &plan).unwrap();
            let b = barrier_free_census(&m, &spec(&m, 1, "a b"), n, &plan).unwrap();
            prop_assert!(b.fractions[n] <= a.fractions[n]);
        }
    }
}
