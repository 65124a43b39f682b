//! Periodic admissible paths for `g = t1·f^m·t2`: construction along the
//! axis line of `g`, validation of the defining conditions, measured
//! conclusions, and single-condition mutations for testing the validator.
//!
//! Segments are ordered `… p_0 q_0 p_1 q_1 …` with `p_i` on
//! `X_i = g^i·t1·Ax(f)`, so each connector `q_i` runs from `X_i` to
//! `X_{i+1}`.

use std::sync::Arc;

use serde::Serialize;

use super::axis::{projection_diameter_growing, AxisSet, AxisTemplate};
use super::path::{is_geodesic_vertex_path, AxisLine};
use crate::error::{Error, Result};
use crate::exec::ShardPlan;
use crate::group::{Element, GroupModel};

pub const DEFAULT_D: usize = 2;
pub const DEFAULT_WINDOW: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissiblePathWitness {
    pub g: Element,
    pub d: usize,
    pub tau: usize,
    /// Segments are stored for `i ∈ -window..=window`.
    pub window: usize,
    pub p: Vec<Vec<Element>>,
    pub q: Vec<Vec<Element>>,
    /// `X_i` for `i ∈ -window..=window + 1`.
    pub axes: Vec<AxisSet>,
}

impl AdmissiblePathWitness {
    fn slot(&self, i: i64) -> usize {
        (i + self.window as i64) as usize
    }

    pub fn p(&self, i: i64) -> &[Element] {
        &self.p[self.slot(i)]
    }

    pub fn q(&self, i: i64) -> &[Element] {
        &self.q[self.slot(i)]
    }

    pub fn len_p0(&self) -> usize {
        self.p(0).len().saturating_sub(1)
    }

    pub fn len_q0(&self) -> usize {
        self.q(0).len().saturating_sub(1)
    }

    fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -(self.window as i64)..=self.window as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleParams {
    pub d: usize,
    /// Connector projection bound; `None` uses the orbit spacing of `Ax(f)`.
    pub tau: Option<usize>,
    pub window: usize,
}

impl Default for AdmissibleParams {
    fn default() -> Self {
        AdmissibleParams {
            d: DEFAULT_D,
            tau: None,
            window: DEFAULT_WINDOW,
        }
    }
}

/// Builds the periodic path for `g = t1·f^m·t2` along the axis line `ℓ` of
/// `g`: `p_0 = [ℓ(a), ℓ(b)]` spans the orbit points of `X_0` on `ℓ` and
/// `q_0 = [ℓ(b), ℓ(a + τ[g])]`. When `g` preserves `X_0`, `p_0` is one
/// period and `q_0` is a single vertex.
pub fn build_admissible_witness(
    model: &GroupModel,
    t1: &Element,
    f: &Element,
    m: usize,
    t2: &Element,
    params: &AdmissibleParams,
    plan: &ShardPlan,
) -> Result<AdmissiblePathWitness> {
    if params.d == 0 {
        return Err(Error::Input("D must be positive".into()));
    }
    if m == 0 {
        return Err(Error::Domain(
            "condition (1) unreachable: m = 0 leaves no axis segment of length at least D".into(),
        ));
    }
    let template = Arc::new(AxisTemplate::new(model, f, plan)?);
    let g = model.mul(&model.mul(t1, &model.pow(f, m as i64)), t2);
    let line = AxisLine::of(model, &g)?;
    let tau_g = line.period() as i64;
    let t1_inv = model.inv(t1);
    let on_x0 = |j: i64| template.contains(model, &model.mul(&t1_inv, &line.vertex(model, j)));

    let (a, b) = if template.contains(model, &model.conjugate(&t1_inv, &g)) {
        let a = (0..tau_g)
            .find(|&j| on_x0(j))
            .ok_or_else(|| Error::Domain("the axis of g misses the orbit points of X_0".into()))?;
        (a, a + tau_g)
    } else {
        let reach =
            (t1.len() + g.len() + 2 * m * f.len() + 4 * template.spacing) as i64 + 4 * tau_g;
        let hits: Vec<i64> = (-reach..=reach).filter(|&j| on_x0(j)).collect();
        let (Some(&a), Some(&b)) = (hits.first(), hits.last()) else {
            return Err(Error::Domain(
                "the axis of g misses the orbit points of X_0".into(),
            ));
        };
        if b - a > tau_g {
            return Err(Error::Domain(format!(
                "X_0 follows the axis for {} > τ[g] = {tau_g}; consecutive segments would overlap",
                b - a
            )));
        }
        (a, b)
    };
    if ((b - a) as usize) < params.d {
        return Err(Error::Domain(format!(
            "condition (1) unreachable: the axis meets X_0 along {} < D = {}",
            b - a,
            params.d
        )));
    }

    let w = params.window as i64;
    let seg = |lo: i64, hi: i64| line.segment(model, lo, hi).vertices(model);
    let p = (-w..=w)
        .map(|i| seg(a + i * tau_g, b + i * tau_g))
        .collect();
    let q = (-w..=w)
        .map(|i| seg(b + i * tau_g, a + (i + 1) * tau_g))
        .collect();
    let axes = (-w..=w + 1)
        .map(|i| {
            let t = model.mul(&model.pow(&g, i), t1);
            let r = t.len() + 2 * (b - a).unsigned_abs() as usize + 2 * g.len() + 8;
            template.materialize(model, &t, r)
        })
        .collect();
    Ok(AdmissiblePathWitness {
        tau: params.tau.unwrap_or(template.spacing),
        g,
        d: params.d,
        window: params.window,
        p,
        q,
        axes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleReport {
    /// (1): each `p_i` is a geodesic of length `>= D` with endpoints in `X_i`.
    pub condition1: bool,
    /// (2): each `q_i` is a geodesic projecting to `X_i` and `X_{i+1}` with
    /// diameter `<= tau`.
    pub condition2: bool,
    /// (3): `p_i = g^i·p_0`, `q_i = g^i·q_0`, and consecutive segments meet.
    pub condition3: bool,
    pub max_connector_projection: usize,
    pub valid: bool,
    pub tau_g: usize,
    pub len_p0: usize,
    pub len_q0: usize,
    /// `|τ[g] - len(p_0) - len(q_0)|`.
    pub r_measured: usize,
    /// `X_0 = X_1`: `g` preserves `X_0` and the axis line lies in it, so
    /// entry and exit points are not defined.
    pub degenerate: bool,
    /// Largest distance from the entry and exit points of the axis line of
    /// `g` in `N_C(X_i)` to `(p_i)_-` and `(p_i)_+`; `None` when the line
    /// misses some `N_C(X_i)` or the axis is degenerate.
    pub epsilon_measured: Option<usize>,
}

/// Checks the three defining conditions in the stored window, then measures
/// the conclusions along the axis line of `g` with contraction constant `c`.
pub fn validate_admissible(
    model: &GroupModel,
    w: &AdmissiblePathWitness,
    c: usize,
) -> Result<AdmissibleReport> {
    let mut axes = w.axes.clone();
    let mut condition1 = true;
    let mut condition2 = true;
    let mut condition3 = true;
    let mut max_proj = 0;
    for i in w.indices() {
        let s = w.slot(i);
        let p = w.p(i);
        let q = w.q(i);
        let len = p.len().saturating_sub(1);
        condition1 &= is_geodesic_vertex_path(model, p)
            && len >= w.d
            && axes[s].contains_growing(model, &p[0])
            && axes[s].contains_growing(model, &p[len]);
        if q.is_empty() || !is_geodesic_vertex_path(model, q) {
            condition2 = false;
        } else {
            for x in [s, s + 1] {
                let d = projection_diameter_growing(model, q, &mut axes[x]);
                max_proj = max_proj.max(d);
                condition2 &= d <= w.tau;
            }
        }
        let gi = model.pow(&w.g, i);
        let shift =
            |v: &[Element]| -> Vec<Element> { v.iter().map(|x| model.mul(&gi, x)).collect() };
        condition3 &= p == shift(w.p(0)).as_slice() && q == shift(w.q(0)).as_slice();
        condition3 &= p.last() == q.first();
        if i < w.window as i64 {
            condition3 &= q.last() == w.p(i + 1).first();
        }
    }

    let line = AxisLine::of(model, &w.g)?;
    let tau_g = line.period();
    let (len_p0, len_q0) = (w.len_p0(), w.len_q0());
    let (x0, x1) = (&axes[w.slot(0)], &axes[w.slot(0) + 1]);
    let degenerate = x0
        .template
        .contains(model, &model.mul(&model.inv(&x0.translate), &x1.translate));
    let epsilon_measured = if degenerate {
        None
    } else {
        measure_entry_exit(model, w, &line, &mut axes, c)
    };
    Ok(AdmissibleReport {
        degenerate,
        condition1,
        condition2,
        condition3,
        max_connector_projection: max_proj,
        valid: condition1 && condition2 && condition3,
        tau_g,
        len_p0,
        len_q0,
        r_measured: tau_g.abs_diff(len_p0 + len_q0),
        epsilon_measured,
    })
}

fn measure_entry_exit(
    model: &GroupModel,
    w: &AdmissiblePathWitness,
    line: &AxisLine,
    axes: &mut [AxisSet],
    c: usize,
) -> Option<usize> {
    let tau = line.period() as i64;
    let span = (w.window as i64 + 2) * tau + (w.len_p0() + w.len_q0()) as i64;
    let verts: Vec<Element> = (-span..=span).map(|j| line.vertex(model, j)).collect();
    let mut eps = 0;
    for i in w.indices() {
        let s = w.slot(i);
        let (first, last) = (w.p(i).first()?, w.p(i).last()?);
        let near: Vec<&Element> = verts
            .iter()
            .filter(|v| axes[s].distance_growing(model, v) <= c)
            .collect();
        let (entry, exit) = (near.first()?, near.last()?);
        eps = eps
            .max(model.distance(entry, first))
            .max(model.distance(exit, last));
    }
    Some(eps)
}

/// Single-condition corruptions of a valid witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mutation {
    /// `D = len(p_0) + 1`; breaks (1).
    RaiseD,
    /// A backtrack `x → x·s → x` at the start of `q_0`; breaks (2).
    Backtrack,
    /// `p_1` translated by a generator; breaks (3).
    BreakPeriodicity,
    /// Every `q_i` extended along `X_{i+1}` past `tau` and `p_i` shortened to
    /// match; breaks (2) while keeping the path periodic.
    AbsorbAxis,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [
        Mutation::RaiseD,
        Mutation::Backtrack,
        Mutation::BreakPeriodicity,
        Mutation::AbsorbAxis,
    ];
}

/// Applies `mutation`, or returns `None` when the witness is too short for it.
pub fn mutate_witness(
    model: &GroupModel,
    w: &AdmissiblePathWitness,
    mutation: Mutation,
) -> Option<AdmissiblePathWitness> {
    let mut out = w.clone();
    match mutation {
        Mutation::RaiseD => out.d = w.len_p0() + 1,
        Mutation::Backtrack => {
            let s = w.slot(0);
            let x = w.q[s][0].clone();
            let next = w.q[s].get(1);
            let y = model
                .alphabet()
                .map(|l| model.mul(&x, &model.generator(l)))
                .find(|y| Some(y) != next)?;
            out.q[s].splice(1..1, [y, x]);
        }
        Mutation::BreakPeriodicity => {
            let s = w.slot(1);
            let gen = model.generator(model.alphabet().next()?);
            out.p[s] = w.p[s].iter().map(|v| model.mul(&gen, v)).collect();
        }
        Mutation::AbsorbAxis => {
            let spacing = w.axes[0].template.spacing.max(1);
            let k = (w.tau / spacing + 1) * spacing;
            if k > w.len_p0() {
                return None;
            }
            // p_i loses its first k edges and q_{i-1} gains them, so the
            // connector runs k steps along X_i.
            for i in w.indices() {
                let s = w.slot(i);
                out.p[s] = w.p[s][k..].to_vec();
                let next = model.pow(&w.g, i + 1);
                let tail = w.p(0)[1..=k].iter().map(|v| model.mul(&next, v));
                out.q[s] = w.q[s].iter().cloned().chain(tail).collect();
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    fn build(
        m: &GroupModel,
        t1: &str,
        f: &str,
        k: usize,
        t2: &str,
    ) -> Result<AdmissiblePathWitness> {
        build_admissible_witness(
            m,
            &m.parse(t1).unwrap(),
            &m.parse(f).unwrap(),
            k,
            &m.parse(t2).unwrap(),
            &AdmissibleParams::default(),
            &ShardPlan::default(),
        )
    }

    #[test]
    fn power_of_f_spans_one_period() {
        let m = f2();
        let w = build(&m, "e", "a b", 4, "e").unwrap();
        assert_eq!(w.len_p0(), 8);
        assert_eq!(w.len_q0(), 0);
        let r = validate_admissible(&m, &w, 0).unwrap();
        assert!(r.valid, "{r:?}");
        assert_eq!((r.tau_g, r.r_measured), (8, 0));
        assert!(r.degenerate && r.epsilon_measured.is_none());
    }

    #[test]
    fn conjugated_power() {
        let m = f2();
        let w = build(&m, "a", "a b", 5, "a'").unwrap();
        let r = validate_admissible(&m, &w, 0).unwrap();
        assert!(r.valid, "{r:?}");
        assert_eq!((r.tau_g, r.r_measured), (10, 0));
    }

    #[test]
    fn connectors_have_bounded_projections() {
        let m = f2();
        let w = build(&m, "a", "a b", 5, "b'").unwrap();
        assert!(w.len_q0() > 0);
        let r = validate_admissible(&m, &w, 0).unwrap();
        assert!(r.condition2 && r.max_connector_projection <= w.tau, "{r:?}");
        assert!(r.valid);
        assert_eq!(r.r_measured, 0);
        assert_eq!(r.epsilon_measured, Some(0));
    }

    #[test]
    fn m_zero_is_rejected() {
        let m = f2();
        assert!(matches!(
            build(&m, "e", "a b", 0, "b"),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn each_mutation_fails() {
        let m = f2();
        let w = build(&m, "b", "a b", 5, "a a").unwrap();
        assert!(validate_admissible(&m, &w, 0).unwrap().valid);
        for mutation in Mutation::ALL {
            let bad = mutate_witness(&m, &w, mutation).unwrap();
            let r = validate_admissible(&m, &bad, 0).unwrap();
            assert!(!r.valid, "{mutation:?} {r:?}");
            match mutation {
                Mutation::RaiseD => assert!(!r.condition1),
                Mutation::Backtrack | Mutation::AbsorbAxis => assert!(!r.condition2),
                Mutation::BreakPeriodicity => assert!(!r.condition3),
            }
        }
    }

    #[test]
    fn free_product_witness() {
        let p = GroupModel::free_product(&[2, 3]).unwrap();
        let w = build(&p, "b", "a b", 4, "a").unwrap();
        let r = validate_admissible(&p, &w, 0).unwrap();
        assert!(r.valid, "{r:?}");
        assert_eq!(r.r_measured, 0);
    }
}
