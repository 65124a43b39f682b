//! Loxodromic, acylindricity and kernel-size probes on finite complexes.

use std::sync::Arc;

use serde::Serialize;

use super::graph::{
    complex_from_table, distinct_translates, projection_table, window_table, ProjectionComplexGraph,
};
use crate::enumeration::enumerate_ball;
use crate::error::{Error, Result};
use crate::exec::ShardPlan;
use crate::geometry::AxisTemplate;
use crate::group::{Element, GroupModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoxodromicReport {
    pub g: String,
    pub k: usize,
    pub k_prime: usize,
    /// `d_P(g^{-N}X, g^N X)` for `N = 0..=n_max`; `None` if disconnected.
    pub distances: Vec<Option<usize>>,
    /// Some `N` has `d_P(g^{-N}X, g^N X) > K'`.
    pub loxodromic_evidence: bool,
}

/// Distances `d_P(g^{-N}X, g^N X)` in the complex on
/// `{g^i·t·Ax(f) : |i| <= n_max, |t| <= window_radius}`, with `X = Ax(f)`.
#[allow(clippy::too_many_arguments)]
pub fn loxodromic_test(
    model: &GroupModel,
    f: &Element,
    g: &Element,
    k: usize,
    k_prime: usize,
    n_max: usize,
    window_radius: usize,
    plan: &ShardPlan,
) -> Result<LoxodromicReport> {
    let template = Arc::new(AxisTemplate::new(model, f, plan)?);
    let ball = enumerate_ball(model, window_radius, plan)?;
    let mut candidates = ball.clone();
    for i in 1..=n_max as i64 {
        for s in [i, -i] {
            let gi = model.pow(g, s);
            candidates.extend(ball.iter().map(|t| model.mul(&gi, t)));
        }
    }
    let translates = distinct_translates(model, &template, &candidates);
    let reach = translates.iter().map(Element::len).max().unwrap_or(0);
    let trunc = reach + 2 * template.root.len() + 2;
    let table = projection_table(model, template, translates, trunc, plan);
    let graph = complex_from_table(model, &table, k, window_radius, plan)?;
    let missing = || Error::InsufficientRadius {
        have: window_radius,
        need: window_radius + 1,
    };
    table.find(model, &model.identity()).ok_or_else(missing)?;
    let mut distances = vec![Some(0)];
    for n in 1..=n_max as i64 {
        let a = table.find(model, &model.pow(g, -n)).ok_or_else(missing)?;
        let b = table.find(model, &model.pow(g, n)).ok_or_else(missing)?;
        distances.push(graph.distances[a][b]);
    }
    Ok(LoxodromicReport {
        g: model.format(g),
        k,
        k_prime,
        loxodromic_evidence: distances.iter().any(|d| d.is_some_and(|d| d > k_prime)),
        distances,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AcylindricityRow {
    pub r: usize,
    pub pairs: usize,
    /// Largest `#{h : d(x, hx) <= D, d(y, hy) <= D}` over sampled pairs at
    /// distance `> R`.
    pub max_movers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AcylindricityReport {
    pub d: usize,
    pub mover_radius: usize,
    pub rows: Vec<AcylindricityRow>,
    /// Movers sending a sampled vertex outside the window; they are counted
    /// as moving it farther than `D`.
    pub boundary_hits: usize,
}

impl AcylindricityReport {
    pub fn nonincreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].max_movers <= w[0].max_movers)
    }
}

/// For each `R` in `r_values`, samples up to `sample_size` vertex pairs at
/// distance `> R` (in index order) and counts movers `h ∈ ball(mover_radius)`
/// displacing both by at most `D`.
#[allow(clippy::too_many_arguments)]
pub fn acylindricity_probe(
    model: &GroupModel,
    f: &Element,
    k: usize,
    window_radius: usize,
    d: usize,
    r_values: &[usize],
    mover_radius: usize,
    sample_size: usize,
    plan: &ShardPlan,
) -> Result<AcylindricityReport> {
    if r_values.contains(&0) {
        return Err(Error::Input("R must be positive".into()));
    }
    let table = window_table(model, f, window_radius, plan)?;
    let graph = complex_from_table(model, &table, k, window_radius, plan)?;
    let movers = enumerate_ball(model, mover_radius, plan)?;
    let n = table.len();
    // image[h][x]: vertex index of h·X_x, if in the window.
    let image: Vec<Vec<Option<usize>>> = plan.map(movers, |h| {
        table
            .translates
            .iter()
            .map(|t| table.find(model, &model.mul(&h, t)))
            .collect()
    });
    let boundary_hits = image.iter().flatten().filter(|i| i.is_none()).count();
    let moves_within = |h: &[Option<usize>], x: usize| -> bool {
        h[x].and_then(|y| graph.distances[x][y])
            .is_some_and(|dist| dist <= d)
    };
    let rows = r_values
        .iter()
        .map(|&r| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
                .filter(|&(x, y)| graph.distances[x][y].is_some_and(|dist| dist > r))
                .take(sample_size)
                .collect();
            let max_movers = pairs
                .iter()
                .map(|&(x, y)| {
                    image
                        .iter()
                        .filter(|h| moves_within(h, x) && moves_within(h, y))
                        .count()
                })
                .max()
                .unwrap_or(0);
            AcylindricityRow {
                r,
                pairs: pairs.len(),
                max_movers,
            }
        })
        .collect();
    Ok(AcylindricityReport {
        d,
        mover_radius,
        rows,
        boundary_hits,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelBoundReport {
    pub search_radius: usize,
    pub sampled: usize,
    pub max_kernel: usize,
    pub worst: Option<String>,
}

/// Largest finite kernel `F` of `E⁺(g) → Z` over the nontorsion samples.
pub fn kernel_bound_probe(
    model: &GroupModel,
    samples: &[Element],
    search_radius: usize,
    plan: &ShardPlan,
) -> Result<KernelBoundReport> {
    let mut max_kernel = 0;
    let mut worst = None;
    let mut sampled = 0;
    for g in samples {
        if g.is_empty() || model.is_torsion(g) {
            continue;
        }
        sampled += 1;
        let report = model.elementary_subgroup(g, search_radius, plan)?;
        if report.kernel_elements.len() > max_kernel {
            max_kernel = report.kernel_elements.len();
            worst = Some(model.format(g));
        }
    }
    Ok(KernelBoundReport {
        search_radius,
        sampled,
        max_kernel,
        worst,
    })
}

/// Complex on the cosets of `Ax(f)` meeting `ball(window_radius)`.
pub fn complex_with_k(
    model: &GroupModel,
    f: &Element,
    k: usize,
    window_radius: usize,
    plan: &ShardPlan,
) -> Result<ProjectionComplexGraph> {
    let table = window_table(model, f, window_radius, plan)?;
    complex_from_table(model, &table, k, window_radius, plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    #[test]
    fn fixed_vertex_has_zero_distance() {
        let m = f2();
        let ab = m.parse("a b").unwrap();
        let r = loxodromic_test(&m, &ab, &ab, 3, 1, 2, 1, &ShardPlan::default()).unwrap();
        assert_eq!(r.distances, vec![Some(0); 3]);
        assert!(!r.loxodromic_evidence);
    }

    #[test]
    fn barrier_crossing_element_moves_far() {
        let m = f2();
        let f = m.parse("a").unwrap();
        // The axis of a³b³ runs three steps along each translate g^i·Ax(a).
        let g = m.parse("a a a b b b").unwrap();
        let r = loxodromic_test(&m, &f, &g, 3, 1, 3, 0, &ShardPlan::default()).unwrap();
        assert_eq!(r.distances[0], Some(0));
        let d: Vec<usize> = r.distances.iter().map(|d| d.unwrap()).collect();
        assert!(d.windows(2).all(|w| w[0] <= w[1]), "{d:?}");
        assert!(d[3] >= 3, "{d:?}");
        assert!(r.loxodromic_evidence);
    }

    /// Independent count: movers found by direct coset membership.
    fn brute_movers(
        m: &GroupModel,
        f: &Element,
        k: usize,
        w: usize,
        d: usize,
        x: usize,
        y: usize,
    ) -> usize {
        let plan = ShardPlan::default();
        let table = window_table(m, f, w, &plan).unwrap();
        let graph = complex_from_table(m, &table, k, w, &plan).unwrap();
        let template = AxisTemplate::new(m, f, &plan).unwrap();
        enumerate_ball(m, 2, &plan)
            .unwrap()
            .iter()
            .filter(|h| {
                [x, y].iter().all(|&v| {
                    let img = m.mul(h, &table.translates[v]);
                    (0..table.len()).any(|u| {
                        template.contains(m, &m.mul(&m.inv(&table.translates[u]), &img))
                            && graph.distances[v][u].is_some_and(|dd| dd <= d)
                    })
                })
            })
            .count()
    }

    #[test]
    fn acylindricity_counts() {
        let m = f2();
        let f = m.parse("a b").unwrap();
        let plan = ShardPlan::default();
        let r = acylindricity_probe(&m, &f, 2, 2, 1, &[1, 2, 3], 2, 50, &plan).unwrap();
        assert!(r.nonincreasing(), "{r:?}");
        let table = window_table(&m, &f, 2, &plan).unwrap();
        let graph = complex_from_table(&m, &table, 2, 2, &plan).unwrap();
        let n = table.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .filter(|&(x, y)| graph.distances[x][y].is_some_and(|dd| dd > 1))
            .take(50)
            .collect();
        let brute = pairs
            .iter()
            .map(|&(x, y)| brute_movers(&m, &f, 2, 2, 1, x, y))
            .max()
            .unwrap_or(0);
        assert_eq!(r.rows[0].max_movers, brute);
        assert!(acylindricity_probe(&m, &f, 2, 2, 1, &[0], 2, 50, &plan).is_err());
    }

    #[test]
    fn kernels_are_trivial() {
        let plan = ShardPlan::default();
        let m = f2();
        let samples: Vec<Element> = ["a", "a b", "a b' a b", "a a b"]
            .iter()
            .map(|s| m.parse(s).unwrap())
            .collect();
        let r = kernel_bound_probe(&m, &samples, 4, &plan).unwrap();
        assert_eq!((r.max_kernel, r.sampled), (1, 4));
        let p = GroupModel::free_product(&[2, 3]).unwrap();
        let samples: Vec<Element> = ["a b", "a b^2", "a b a b^2", "a"]
            .iter()
            .map(|s| p.parse(s).unwrap())
            .collect();
        let r = kernel_bound_probe(&p, &samples, 6, &plan).unwrap();
        assert_eq!((r.max_kernel, r.sampled), (1, 3));
    }
}
