//! Orbit axes `t·Ax(f) = {t·h·o : h ∈ E(f)}` and exact nearest-point
//! projections onto their materialized parts.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::ShardPlan;
use crate::group::{Element, GroupModel};

/// `E(f)` written as `{r^k·y : k ∈ Z, y ∈ Y}` for the primitive root `r`
/// and a finite transversal `Y` of `⟨r⟩` in `E(f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisTemplate {
    pub base: Element,
    pub root: Element,
    /// Kernel elements, then kernel elements times the flip if one exists.
    pub transversal: Vec<Element>,
    /// `τ[r]`, the spacing of consecutive orbit points along the axis.
    pub spacing: usize,
}

impl AxisTemplate {
    /// Free groups have `E(f) = ⟨r⟩`. Free products search `E(f)` in the
    /// ball of radius `|f| + 2`.
    pub fn new(model: &GroupModel, f: &Element, plan: &ShardPlan) -> Result<Self> {
        let (root, _) = model.primitive_root(f)?;
        let transversal = if model.is_free() {
            vec![model.identity()]
        } else {
            let report = model.elementary_subgroup(f, f.len() + 2, plan)?;
            let mut y = report.kernel_elements.clone();
            if let Some(flip) = &report.flip {
                y.extend(report.kernel_elements.iter().map(|k| model.mul(k, flip)));
            }
            y
        };
        Ok(AxisTemplate {
            base: f.clone(),
            spacing: model.stable_length(&root),
            root,
            transversal,
        })
    }

    /// Membership `h ∈ E(f)`.
    pub fn contains(&self, model: &GroupModel, h: &Element) -> bool {
        // Within E(f), h·r^n·h⁻¹ = r^{±n} once n is a multiple of the
        // kernel's exponent; |Y|! is such a multiple.
        let n: i64 = (1..=self.transversal.len() as i64).product();
        let p = model.pow(&self.root, n);
        let c = model.conjugate(h, &p);
        c == p || c == model.inv(&p)
    }

    pub fn materialize(
        self: &Arc<Self>,
        model: &GroupModel,
        t: &Element,
        radius: usize,
    ) -> AxisSet {
        let mut points = Vec::new();
        let tau = self.spacing.max(1) as i64;
        for y in &self.transversal {
            let reach = ((radius + t.len() + y.len() + 1) as i64) / tau + 1;
            for k in -reach..=reach {
                let p = model.mul(&model.mul(t, &model.pow(&self.root, k)), y);
                if p.len() <= radius {
                    points.push(p);
                }
            }
        }
        points.sort();
        points.dedup();
        AxisSet {
            template: Arc::clone(self),
            translate: t.clone(),
            radius,
            points,
        }
    }
}

/// `t·Ax(f)` restricted to the ball of radius `radius`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisSet {
    pub template: Arc<AxisTemplate>,
    pub translate: Element,
    pub radius: usize,
    /// Sorted orbit points with `|p| <= radius`.
    pub points: Vec<Element>,
}

/// Nearest-point set and distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub points: Vec<Element>,
    pub distance: usize,
}

impl AxisSet {
    pub fn new(
        model: &GroupModel,
        f: &Element,
        t: &Element,
        radius: usize,
        plan: &ShardPlan,
    ) -> Result<Self> {
        let template = Arc::new(AxisTemplate::new(model, f, plan)?);
        Ok(template.materialize(model, t, radius))
    }

    /// Whether `x` is an axis point. Needs `|x| <= radius`.
    pub fn contains(&self, x: &Element) -> Result<bool> {
        if x.len() > self.radius {
            return Err(Error::InsufficientRadius {
                have: self.radius,
                need: x.len(),
            });
        }
        Ok(self.points.binary_search(x).is_ok())
    }

    /// Exact projection. Unmaterialized points lie farther than
    /// `radius - |x|`, so the answer is exact once `|x| + d <= radius`.
    pub fn project(&self, model: &GroupModel, x: &Element) -> Result<Projection> {
        let mut best = usize::MAX;
        let mut points = Vec::new();
        for p in &self.points {
            let d = model.distance(x, p);
            if d < best {
                best = d;
                points.clear();
            }
            if d == best {
                points.push(p.clone());
            }
        }
        let need = if points.is_empty() {
            x.len() + model.distance(x, &self.translate)
        } else {
            x.len() + best
        };
        if need > self.radius {
            return Err(Error::InsufficientRadius {
                have: self.radius,
                need,
            });
        }
        Ok(Projection {
            points,
            distance: best,
        })
    }

    /// Rematerializes at a larger radius when needed.
    pub fn grow_to(&mut self, model: &GroupModel, radius: usize) {
        if radius > self.radius {
            *self = self.template.materialize(model, &self.translate, radius);
        }
    }

    /// `project`, growing the materialized radius on demand.
    pub fn project_growing(&mut self, model: &GroupModel, x: &Element) -> Projection {
        loop {
            match self.project(model, x) {
                Ok(p) => return p,
                Err(Error::InsufficientRadius { need, .. }) => self.grow_to(model, need),
                Err(e) => unreachable!("projection only fails on radius: {e}"),
            }
        }
    }

    pub fn contains_growing(&mut self, model: &GroupModel, x: &Element) -> bool {
        self.grow_to(model, x.len());
        self.points.binary_search(x).is_ok()
    }

    /// `d(x, X)`.
    pub fn distance_growing(&mut self, model: &GroupModel, x: &Element) -> usize {
        self.project_growing(model, x).distance
    }
}

fn diameter(model: &GroupModel, points: &[Element]) -> usize {
    let mut d = 0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(model.distance(p, q));
        }
    }
    d
}

/// `diam π_X(A)`.
pub fn projection_diameter(model: &GroupModel, a: &[Element], x: &AxisSet) -> Result<usize> {
    let mut all = Vec::new();
    for y in a {
        all.extend(x.project(model, y)?.points);
    }
    all.sort();
    all.dedup();
    Ok(diameter(model, &all))
}

/// `diam π_X(A)`, growing the materialized radius on demand.
pub fn projection_diameter_growing(model: &GroupModel, a: &[Element], x: &mut AxisSet) -> usize {
    let mut all = Vec::new();
    for y in a {
        all.extend(x.project_growing(model, y).points);
    }
    all.sort();
    all.dedup();
    diameter(model, &all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    fn axis(m: &GroupModel, f: &str, t: &str, r: usize) -> AxisSet {
        AxisSet::new(
            m,
            &m.parse(f).unwrap(),
            &m.parse(t).unwrap(),
            r,
            &ShardPlan::default(),
        )
        .unwrap()
    }

    #[test]
    fn projection_examples() {
        let m = f2();
        let x = axis(&m, "a", "e", 12);
        let p = x.project(&m, &m.parse("b a a").unwrap()).unwrap();
        assert_eq!((p.points, p.distance), (vec![m.identity()], 3));
        let p = x.project(&m, &m.parse("a a a b").unwrap()).unwrap();
        assert_eq!((p.points, p.distance), (vec![m.parse("a a a").unwrap()], 1));
        let on = m.parse("a' a'").unwrap();
        assert_eq!(x.project(&m, &on).unwrap().points, vec![on]);
        assert_eq!(x.points.len(), 25);
    }

    #[test]
    fn insufficient_radius_is_reported() {
        let m = f2();
        let x = axis(&m, "a", "e", 3);
        let far = m.parse("b b a a").unwrap();
        assert_eq!(
            x.project(&m, &far),
            Err(Error::InsufficientRadius { have: 3, need: 8 })
        );
        let mut x = x;
        assert_eq!(x.project_growing(&m, &far).distance, 4);
        assert!(x.radius >= 8);
    }

    #[test]
    fn diameter_examples() {
        let m = f2();
        let x = axis(&m, "a", "e", 16);
        let a5 = m.parse("a a a a a").unwrap();
        assert_eq!(projection_diameter(&m, &[m.identity(), a5], &x).unwrap(), 5);
        let path: Vec<Element> = (0..=5)
            .map(|k| m.mul(&m.parse("b").unwrap(), &m.pow(&m.parse("a").unwrap(), k)))
            .collect();
        assert_eq!(projection_diameter(&m, &path, &x).unwrap(), 0);
        // Ax(ab) ∩ ball(6) onto b·Ax(ab) lands on a bounded set.
        let ab = axis(&m, "a b", "e", 6);
        let shifted = axis(&m, "a b", "b", 40);
        let d = projection_diameter(&m, &ab.points, &shifted).unwrap();
        assert!(d <= 2, "{d}");
    }

    #[test]
    fn orbit_points_and_membership() {
        let m = f2();
        let x = axis(&m, "a b a b", "e", 6);
        let expect: Vec<Element> = (-3..=3)
            .map(|k| m.pow(&m.parse("a b").unwrap(), k))
            .collect();
        let mut expect = expect;
        expect.sort();
        assert_eq!(x.points, expect);
        assert!(x.template.contains(&m, &m.parse("b' a'").unwrap()));
        assert!(!x.template.contains(&m, &m.parse("a").unwrap()));
        let p = GroupModel::free_product(&[2, 3]).unwrap();
        let y = axis(&p, "a b a b^2", "e", 8);
        assert!(y.template.transversal.len() == 2);
        assert!(y.contains(&y.template.transversal[1]).unwrap());
    }

    proptest! {
        #[test]
        fn projection_triangle_inequality(
            seeds in proptest::collection::vec(proptest::collection::vec(0u8..4, 0..6), 3),
            f in prop_oneof![Just("a b"), Just("a"), Just("a b'"), Just("a a b")],
        ) {
            let m = f2();
            let x = axis(&m, f, "b", 30);
            let pts: Vec<Element> = seeds
                .iter()
                .map(|w| m.normalize(&w.iter().map(|&i| crate::group::Letter(i)).collect::<Vec<_>>()).unwrap())
                .collect();
            let d = |u: &Element, v: &Element| projection_diameter(&m, &[u.clone(), v.clone()], &x).unwrap();
            prop_assert!(d(&pts[0], &pts[2]) <= d(&pts[0], &pts[1]) + d(&pts[1], &pts[2]));
        }
    }
}
