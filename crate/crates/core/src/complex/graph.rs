//! Finite windows of the projection complex over translates of one axis.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::enumeration::enumerate_ball;
use crate::error::{Error, Result};
use crate::exec::ShardPlan;
use crate::geometry::{AxisSet, AxisTemplate};
use crate::group::{Element, GroupModel};

/// Extra radius, beyond the farthest translate, at which each vertex axis is
/// truncated before projecting it.
fn default_truncation(window_radius: usize, template: &AxisTemplate) -> usize {
    window_radius + 2 * template.root.len() + 2
}

/// Vertex axes and the pairwise projections `π_X(V)` between them.
#[derive(Debug, Clone)]
pub struct ProjectionTable {
    pub template: Arc<AxisTemplate>,
    /// Coset representatives, shortlex-least first.
    pub translates: Vec<Element>,
    pub truncation: usize,
    /// `proj[x][v]`: the nearest points of vertex `x` to the truncated axis
    /// of vertex `v`; empty on the diagonal.
    proj: Vec<Vec<Vec<Element>>>,
}

impl ProjectionTable {
    pub fn len(&self) -> usize {
        self.translates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.translates.is_empty()
    }

    /// `π_X(V, W) = diam π_X(V ∪ W)` for `X ∉ {V, W}`.
    pub fn pair_projection(&self, model: &GroupModel, x: usize, v: usize, w: usize) -> usize {
        let a = &self.proj[x][v];
        let b = &self.proj[x][w];
        let mut d = 0;
        let all: Vec<&Element> = a.iter().chain(b).collect();
        for (i, p) in all.iter().enumerate() {
            for q in &all[i + 1..] {
                d = d.max(model.distance(p, q));
            }
        }
        d
    }

    /// Index of the vertex `t·Ax(f)`, if it is in the table.
    pub fn find(&self, model: &GroupModel, t: &Element) -> Option<usize> {
        self.translates
            .iter()
            .position(|s| self.template.contains(model, &model.mul(&model.inv(s), t)))
    }
}

/// Coset representatives of `t·E(f)` among `candidates`, keeping the first
/// member of each coset.
pub fn distinct_translates(
    model: &GroupModel,
    template: &AxisTemplate,
    candidates: &[Element],
) -> Vec<Element> {
    let mut reps: Vec<Element> = Vec::new();
    for t in candidates {
        let t_inv = model.inv(t);
        if !reps
            .iter()
            .any(|s| template.contains(model, &model.mul(&t_inv, s)))
        {
            reps.push(t.clone());
        }
    }
    reps
}

/// Projects every truncated vertex axis onto every other vertex axis.
pub fn projection_table(
    model: &GroupModel,
    template: Arc<AxisTemplate>,
    translates: Vec<Element>,
    truncation: usize,
    plan: &ShardPlan,
) -> ProjectionTable {
    let truncated: Vec<Vec<Element>> = translates
        .iter()
        .map(|t| {
            template
                .materialize(model, t, t.len() + truncation)
                .points
                .into_iter()
                .filter(|p| model.distance(p, t) <= truncation)
                .collect()
        })
        .collect();
    let n = translates.len();
    let proj = plan.map((0..n).collect(), |x| {
        let mut axis =
            template.materialize(model, &translates[x], translates[x].len() + truncation);
        (0..n)
            .map(|v| {
                if v == x {
                    return Vec::new();
                }
                let mut pts: Vec<Element> = truncated[v]
                    .iter()
                    .flat_map(|y| axis.project_growing(model, y).points)
                    .collect();
                pts.sort();
                pts.dedup();
                pts
            })
            .collect()
    });
    ProjectionTable {
        template,
        translates,
        truncation,
        proj,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionComplexGraph {
    pub k: usize,
    pub window_radius: usize,
    pub f: String,
    pub vertices: Vec<String>,
    pub adjacency: Vec<Vec<usize>>,
    /// `distances[i][j]`; `None` when disconnected.
    pub distances: Vec<Vec<Option<usize>>>,
}

impl ProjectionComplexGraph {
    pub fn is_connected(&self) -> bool {
        self.distances.iter().flatten().all(Option::is_some)
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// One line per vertex: `index translate: neighbours`.
    pub fn to_adjacency_text(&self) -> String {
        let mut s = String::new();
        for (i, (v, nbrs)) in self.vertices.iter().zip(&self.adjacency).enumerate() {
            let list: Vec<String> = nbrs.iter().map(usize::to_string).collect();
            s.push_str(&format!("{i} {v}: {}\n", list.join(" ")));
        }
        s
    }

    /// True iff the distance table is symmetric and satisfies the triangle
    /// inequality.
    pub fn distances_consistent(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            for j in 0..n {
                if self.distances[i][j] != self.distances[j][i] {
                    return false;
                }
                for k in 0..n {
                    if let (Some(a), Some(b), Some(c)) = (
                        self.distances[i][j],
                        self.distances[j][k],
                        self.distances[i][k],
                    ) {
                        if c > a + b {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// `X_K(V, W)`: vertices `X ∉ {V, W}` with `π_X(V, W) >= K`.
pub fn interval_set(
    model: &GroupModel,
    table: &ProjectionTable,
    v: usize,
    w: usize,
    k: usize,
) -> Result<Vec<usize>> {
    if v == w {
        return Err(Error::Input(
            "interval set needs two distinct vertices".into(),
        ));
    }
    Ok((0..table.len())
        .filter(|&x| x != v && x != w && table.pair_projection(model, x, v, w) >= k)
        .collect())
}

/// Largest `π_X(V, W)` over all triples; every `K` above it gives a complete
/// graph.
pub fn max_pair_projection(model: &GroupModel, table: &ProjectionTable) -> usize {
    let n = table.len();
    let mut best = 0;
    for v in 0..n {
        for w in v + 1..n {
            for x in 0..n {
                if x != v && x != w {
                    best = best.max(table.pair_projection(model, x, v, w));
                }
            }
        }
    }
    best
}

fn bfs_all(adjacency: &[Vec<usize>]) -> Vec<Vec<Option<usize>>> {
    let n = adjacency.len();
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let du = dist[u].unwrap_or(0);
                for &v in &adjacency[u] {
                    if dist[v].is_none() {
                        dist[v] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect()
}

/// The graph on all table vertices with the `K` adjacency rule.
pub fn complex_from_table(
    model: &GroupModel,
    table: &ProjectionTable,
    k: usize,
    window_radius: usize,
    plan: &ShardPlan,
) -> Result<ProjectionComplexGraph> {
    if k == 0 {
        return Err(Error::Input("K must be positive".into()));
    }
    let n = table.len();
    let rows = plan.map((0..n).collect(), |v| {
        (0..n)
            .filter(|&w| {
                w != v
                    && (0..n).all(|x| x == v || x == w || table.pair_projection(model, x, v, w) < k)
            })
            .collect::<Vec<usize>>()
    });
    let distances = bfs_all(&rows);
    Ok(ProjectionComplexGraph {
        k,
        window_radius,
        f: model.format(&table.template.base),
        vertices: table.translates.iter().map(|t| model.format(t)).collect(),
        adjacency: rows,
        distances,
    })
}

/// Translates `t·Ax(f)`, `|t| <= window_radius`, one per coset, with their
/// projection table.
pub fn window_table(
    model: &GroupModel,
    f: &Element,
    window_radius: usize,
    plan: &ShardPlan,
) -> Result<ProjectionTable> {
    let template = Arc::new(AxisTemplate::new(model, f, plan)?);
    let ball = enumerate_ball(model, window_radius, plan)?;
    let translates = distinct_translates(model, &template, &ball);
    let trunc = default_truncation(window_radius, &template);
    Ok(projection_table(model, template, translates, trunc, plan))
}

/// `P_K` restricted to the translates in `ball(window_radius)`.
pub fn build_complex(
    model: &GroupModel,
    f: &Element,
    k: usize,
    window_radius: usize,
    plan: &ShardPlan,
) -> Result<ProjectionComplexGraph> {
    if k == 0 {
        return Err(Error::Input("K must be positive".into()));
    }
    let table = window_table(model, f, window_radius, plan)?;
    complex_from_table(model, &table, k, window_radius, plan)
}

/// Smallest `K` whose window graph is connected.
pub fn smallest_connecting_k(
    model: &GroupModel,
    table: &ProjectionTable,
    window_radius: usize,
    plan: &ShardPlan,
) -> Result<usize> {
    let top = max_pair_projection(model, table) + 1;
    for k in 1..=top {
        if complex_from_table(model, table, k, window_radius, plan)?.is_connected() {
            return Ok(k);
        }
    }
    Ok(top)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowStability {
    pub k: usize,
    pub inner_radius: usize,
    /// Inner pairs whose adjacency changed when the window grew by one.
    pub changed_pairs: Vec<(String, String)>,
    pub stable: bool,
}

/// Compares adjacency of inner-window pairs against the window one larger.
pub fn window_stability(
    model: &GroupModel,
    f: &Element,
    k: usize,
    window_radius: usize,
    plan: &ShardPlan,
) -> Result<WindowStability> {
    let inner = build_complex(model, f, k, window_radius, plan)?;
    let outer_table = window_table(model, f, window_radius + 1, plan)?;
    let outer = complex_from_table(model, &outer_table, k, window_radius + 1, plan)?;
    // Coset representatives are shortlex-first, so inner vertices keep their
    // indices in the outer window.
    let mut changed = Vec::new();
    for i in 0..inner.vertices.len() {
        for j in i + 1..inner.vertices.len() {
            if inner.adjacent(i, j) != outer.adjacent(i, j) {
                changed.push((inner.vertices[i].clone(), inner.vertices[j].clone()));
            }
        }
    }
    Ok(WindowStability {
        k,
        inner_radius: window_radius,
        stable: changed.is_empty(),
        changed_pairs: changed,
    })
}

/// Materialized axis of a table vertex, for callers that need raw points.
pub fn vertex_axis(
    model: &GroupModel,
    table: &ProjectionTable,
    i: usize,
    radius: usize,
) -> AxisSet {
    table
        .template
        .materialize(model, &table.translates[i], radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::projection_diameter_growing;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    #[test]
    fn translates_are_cosets() {
        let m = f2();
        let t = window_table(&m, &m.parse("a").unwrap(), 2, &ShardPlan::default()).unwrap();
        // Cosets t⟨a⟩ meeting ball(2): e, b, b', a b, a b', a' b, a' b',
        // b b, b' b'; b a lies in b⟨a⟩.
        assert_eq!(t.len(), 9);
        assert_eq!(t.find(&m, &m.parse("a a a b").unwrap()), None);
        assert_eq!(
            t.find(&m, &m.parse("a b a a a").unwrap()),
            t.find(&m, &m.parse("a b").unwrap())
        );
        let single = window_table(&m, &m.parse("a").unwrap(), 0, &ShardPlan::default()).unwrap();
        let g = complex_from_table(&m, &single, 3, 0, &ShardPlan::default()).unwrap();
        assert_eq!((g.vertices.len(), g.edge_count()), (1, 0));
    }

    #[test]
    fn pair_projection_matches_direct_projection() {
        let m = f2();
        let plan = ShardPlan::default();
        let t = window_table(&m, &m.parse("a b").unwrap(), 2, &plan).unwrap();
        for x in 0..t.len() {
            for v in 0..t.len() {
                for w in 0..t.len() {
                    if x == v || x == w || v == w {
                        continue;
                    }
                    let pts = |i: usize| -> Vec<Element> {
                        let c = &t.translates[i];
                        vertex_axis(&m, &t, i, c.len() + t.truncation)
                            .points
                            .into_iter()
                            .filter(|p| m.distance(p, c) <= t.truncation)
                            .collect()
                    };
                    let mut union = pts(v);
                    union.extend(pts(w));
                    let mut axis = vertex_axis(&m, &t, x, 4);
                    assert_eq!(
                        t.pair_projection(&m, x, v, w),
                        projection_diameter_growing(&m, &union, &mut axis)
                    );
                }
            }
        }
    }

    #[test]
    fn adjacency_matches_interval_sets_and_k_monotone() {
        let m = f2();
        let plan = ShardPlan::default();
        let t = window_table(&m, &m.parse("a b").unwrap(), 3, &plan).unwrap();
        let top = max_pair_projection(&m, &t);
        for k in 1..=top + 1 {
            let g = complex_from_table(&m, &t, k, 3, &plan).unwrap();
            assert!(g.distances_consistent());
            for v in 0..t.len() {
                for w in v + 1..t.len() {
                    let here = interval_set(&m, &t, v, w, k).unwrap();
                    assert_eq!(g.adjacent(v, w), here.is_empty());
                    assert_eq!(here, interval_set(&m, &t, w, v, k).unwrap());
                    let next = interval_set(&m, &t, v, w, k + 1).unwrap();
                    assert!(next.iter().all(|x| here.contains(x)));
                }
            }
        }
        assert_eq!(
            complex_from_table(&m, &t, top + 1, 3, &plan)
                .unwrap()
                .edge_count(),
            t.len() * (t.len() - 1) / 2
        );
        assert!(interval_set(&m, &t, 0, 0, 1).is_err());
    }

    #[test]
    fn axis_of_a_and_its_b_translate() {
        let m = f2();
        let plan = ShardPlan::default();
        let g = build_complex(&m, &m.parse("a").unwrap(), 1, 3, &plan).unwrap();
        let t = window_table(&m, &m.parse("a").unwrap(), 3, &plan).unwrap();
        let (x, y) = (
            t.find(&m, &m.identity()).unwrap(),
            t.find(&m, &m.parse("b").unwrap()).unwrap(),
        );
        // Every third axis sees Ax(a) and b·Ax(a) through one point.
        assert!(g.adjacent(x, y));
    }

    #[test]
    fn large_k_connects_window() {
        let m = f2();
        let g = build_complex(&m, &m.parse("a b").unwrap(), 10, 4, &ShardPlan::default()).unwrap();
        assert!(g.is_connected());
        assert!(g.to_adjacency_text().lines().count() == g.vertices.len());
    }

    #[test]
    fn window_growth_keeps_inner_adjacency() {
        let m = f2();
        let plan = ShardPlan::default();
        let f = m.parse("a b").unwrap();
        let t = window_table(&m, &f, 2, &plan).unwrap();
        let k = smallest_connecting_k(&m, &t, 2, &plan).unwrap();
        let s = window_stability(&m, &f, k, 2, &plan).unwrap();
        // Larger windows can only remove edges; report whatever changed.
        assert_eq!(s.stable, s.changed_pairs.is_empty());
    }
}
