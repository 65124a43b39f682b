//! Finite-radius estimator for statistical convex-cocompactness of a subgroup
//! `H ≤ F_k` acting on the ambient Cayley graph.

use std::collections::HashMap;

use serde::Serialize;

use super::growth::{growth_exponent_of, GrowthFit};
use super::sphere::normal_words;
use super::subgroup::SubgroupAutomaton;
use crate::error::{Error, Result};
use crate::exec::{BudgetMeter, ShardPlan};
use crate::group::{Element, GroupModel, Letter};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SccReport {
    pub m1: usize,
    pub m2: usize,
    pub max_radius: usize,
    /// `#{h ∈ H : d(o, ho) = n}`.
    pub orbit_spheres: Vec<u64>,
    /// `#{h ∈ O_{M1,M2} : d(o, ho) = n}`.
    pub escaping_spheres: Vec<u64>,
    pub delta_orbit: GrowthFit,
    pub delta_escaping: GrowthFit,
    /// `delta_orbit - delta_escaping`.
    pub gap: f64,
    /// Combined regression error of the two slopes.
    pub gap_stderr: f64,
    pub orbit_total: u64,
    pub escaping_total: u64,
}

struct Classifier<'a> {
    model: &'a GroupModel,
    aut: &'a SubgroupAutomaton,
    offsets: &'a [Vec<Letter>],
    near: HashMap<Vec<Letter>, bool>,
}

impl Classifier<'_> {
    /// `d(v, H·o) <= M1`, by scanning the ambient ball of radius M1.
    fn near_orbit(&mut self, v: &[Letter]) -> bool {
        if let Some(&b) = self.near.get(v) {
            return b;
        }
        let b = self
            .offsets
            .iter()
            .any(|w| self.aut.contains_word(&self.model.mul_words(v, w)));
        self.near.insert(v.to_vec(), b);
        b
    }

    /// The interior vertices of `[o, ho]` all lie outside `N_{M1}(H·o)`.
    /// Geodesics without interior vertices do not escape.
    fn escapes(&mut self, h: &[Letter]) -> bool {
        h.len() >= 2 && (1..h.len()).all(|i| !self.near_orbit(&h[..i]))
    }
}

fn orbit_walk(
    aut: &SubgroupAutomaton,
    model: &GroupModel,
    word: &mut Vec<Letter>,
    state: u32,
    max: usize,
    meter: &BudgetMeter,
    found: &mut Vec<Vec<Letter>>,
) -> Result<()> {
    meter.charge(1)?;
    if state == 0 {
        found.push(word.clone());
    }
    if word.len() == max {
        return Ok(());
    }
    for &x in model.successors(word.last().copied()) {
        if let Some(next) = aut.step(state, x) {
            word.push(x);
            let r = orbit_walk(aut, model, word, next, max, meter, found);
            word.pop();
            r?;
        }
    }
    Ok(())
}

/// Enumerates `h ∈ H` with `d(o, ho) <= max_radius`, classifies each into
/// `O_{M1,M2}` by testing the interior vertices of the unique geodesic
/// `[o, ho]` against `N_{M1}(H·o)`, and fits both growth exponents.
///
/// The geodesic is pinned at `o` and `ho`: in these unique-geodesic trees the
/// endpoint slack `M2` does not change which interior vertices are tested,
/// so it is only recorded.
pub fn scc_estimate(
    model: &GroupModel,
    generators: &[Element],
    m1: usize,
    m2: usize,
    max_radius: usize,
    plan: &ShardPlan,
) -> Result<SccReport> {
    if !model.is_free() {
        return Err(Error::Unsupported(
            "the SCC estimator needs a free-group model".into(),
        ));
    }
    if m1 == 0 || m2 < m1 {
        return Err(Error::Input("need 0 < M1 <= M2".into()));
    }
    let aut = SubgroupAutomaton::build(model, generators)?;
    let meter = BudgetMeter::new(plan.budget);
    let mut members = Vec::new();
    orbit_walk(
        &aut,
        model,
        &mut Vec::new(),
        0,
        max_radius,
        &meter,
        &mut members,
    )?;
    let offsets: Vec<Vec<Letter>> = (0..=m1).flat_map(|d| normal_words(model, d)).collect();
    meter.charge((members.len() * offsets.len()) as u64)?;

    let chunk = members.len().div_ceil(plan.shards.max(1)).max(1);
    let chunks: Vec<Vec<Vec<Letter>>> = members.chunks(chunk).map(|c| c.to_vec()).collect();
    let flags: Vec<Vec<(usize, bool)>> = plan.map(chunks, |chunk| {
        let mut cls = Classifier {
            model,
            aut: &aut,
            offsets: &offsets,
            near: HashMap::new(),
        };
        chunk.iter().map(|h| (h.len(), cls.escapes(h))).collect()
    });

    let mut orbit_spheres = vec![0u64; max_radius + 1];
    let mut escaping_spheres = vec![0u64; max_radius + 1];
    for (len, esc) in flags.into_iter().flatten() {
        orbit_spheres[len] += 1;
        if esc {
            escaping_spheres[len] += 1;
        }
    }
    let radii: Vec<usize> = (0..=max_radius).collect();
    let cumulative = |s: &[u64]| {
        s.iter()
            .scan(0u64, |a, &x| {
                *a += x;
                Some(*a)
            })
            .collect::<Vec<_>>()
    };
    let delta_orbit = growth_exponent_of(&radii, &cumulative(&orbit_spheres))?;
    let delta_escaping = growth_exponent_of(&radii, &cumulative(&escaping_spheres))?;
    Ok(SccReport {
        m1,
        m2,
        max_radius,
        orbit_total: orbit_spheres.iter().sum(),
        escaping_total: escaping_spheres.iter().sum(),
        gap: delta_orbit.delta_hat - delta_escaping.delta_hat,
        gap_stderr: delta_orbit.slope_stderr.hypot(delta_escaping.slope_stderr),
        orbit_spheres,
        escaping_spheres,
        delta_orbit,
        delta_escaping,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    #[test]
    fn cyclic_subgroup_never_escapes() {
        let m = f2();
        let r = scc_estimate(&m, &[m.parse("a").unwrap()], 1, 1, 8, &ShardPlan::default()).unwrap();
        assert_eq!(r.escaping_total, 0);
        assert_eq!(r.orbit_total, 17);
        assert!(r.delta_escaping.degenerate);
    }

    #[test]
    fn whole_group_is_cocompact() {
        let m = f2();
        let gens = [m.parse("a").unwrap(), m.parse("b").unwrap()];
        let r = scc_estimate(&m, &gens, 1, 1, 6, &ShardPlan::default()).unwrap();
        assert_eq!(r.escaping_total, 0);
        assert_eq!(r.orbit_total, 2 * 3u64.pow(6) - 1);
        assert!((r.delta_orbit.delta_hat - 3f64.ln()).abs() < 0.05);
    }

    #[test]
    fn conjugated_generator_is_not_escaping() {
        let m = f2();
        let gens = [m.parse("a").unwrap(), m.parse("b a b'").unwrap()];
        let aut = SubgroupAutomaton::build(&m, &gens).unwrap();
        let offsets: Vec<Vec<Letter>> = (0..=2).flat_map(|d| normal_words(&m, d)).collect();
        let mut cls = Classifier {
            model: &m,
            aut: &aut,
            offsets: &offsets,
            near: HashMap::new(),
        };
        let h = m.parse("b a b'").unwrap();
        assert!(cls.near_orbit(&h.word()[..1]));
        assert!(cls.near_orbit(&h.word()[..2]));
        assert!(!cls.escapes(h.word()));
        assert!(scc_estimate(&m, &gens, 2, 2, 7, &ShardPlan::default()).is_ok());
    }

    #[test]
    fn free_products_are_unsupported() {
        let p = GroupModel::free_product(&[2, 3]).unwrap();
        assert!(matches!(
            scc_estimate(&p, &[], 1, 1, 4, &ShardPlan::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
