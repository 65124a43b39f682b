//! Envelope, primitivity and multiplicity statistics over conjugacy censuses.

use std::collections::HashMap;

use serde::Serialize;

use super::necklace::ConjugacyCensus;
use crate::enumeration::fold_range;
use crate::error::{Error, Result};
use crate::exec::ShardPlan;
use crate::fit::{envelope_stats, log_slope, EnvelopeStats, LineFit};
use crate::group::{least_rotation, rotate, rotation_period, Element, GroupModel, Letter};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusEnvelopes {
    pub pointed: EnvelopeStats,
    pub stable_capped: EnvelopeStats,
    pub primitive_pointed: EnvelopeStats,
    pub primitive_stable_capped: EnvelopeStats,
}

/// `e(n) = n·count(n)/exp(delta·n)` for the four cumulative count arrays
/// over the window `lo..=hi`.
pub fn envelope_check(
    census: &ConjugacyCensus,
    delta: f64,
    lo: usize,
    hi: usize,
) -> Result<CensusEnvelopes> {
    let env = |c: &[u64]| {
        let c: Vec<f64> = c.iter().map(|&x| x as f64).collect();
        envelope_stats(&c, delta, lo, hi)
    };
    Ok(CensusEnvelopes {
        pointed: env(&census.counts_pointed)?,
        stable_capped: env(&census.counts_stable_capped)?,
        primitive_pointed: env(&census.primitive_pointed)?,
        primitive_stable_capped: env(&census.primitive_stable_capped)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveRatioCurve {
    /// `#C'(o,n) / #C(o,n)`.
    pub pointed: Vec<f64>,
    /// `#C'(n)∩C(o,n) / #C(n)∩C(o,n)`; `None` while the denominator is 0.
    pub stable: Vec<Option<f64>>,
    /// Log-linear fit of `1 - pointed` against `n` for `n >= 1`.
    pub decay: Option<LineFit>,
    /// `exp(decay.slope)`: the per-step contraction of `1 - pointed`.
    pub decay_rate: Option<f64>,
}

impl PrimitiveRatioCurve {
    /// Least `c` with `1 - pointed(n) <= c·n·exp(-delta·n/2)` on `lo..=hi`.
    pub fn bound_constant(&self, delta: f64, lo: usize, hi: usize) -> Result<f64> {
        let lo = lo.max(1);
        if lo > hi || hi >= self.pointed.len() {
            return Err(Error::Window(format!(
                "window {lo}..={hi} outside the curve"
            )));
        }
        Ok((lo..=hi)
            .map(|n| {
                let n_f = n as f64;
                (1.0 - self.pointed[n]) / (n_f * (-delta * n_f / 2.0).exp())
            })
            .fold(0.0, f64::max))
    }
}

pub fn primitive_ratio_curve(census: &ConjugacyCensus) -> PrimitiveRatioCurve {
    let pointed: Vec<f64> = census
        .primitive_pointed
        .iter()
        .zip(&census.counts_pointed)
        .map(|(&p, &c)| p as f64 / c as f64)
        .collect();
    let stable = census
        .primitive_stable_capped
        .iter()
        .zip(&census.counts_stable_capped)
        .map(|(&p, &c)| (c > 0).then(|| p as f64 / c as f64))
        .collect();
    let points: Vec<(usize, f64)> = pointed
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, r)| (n, 1.0 - r))
        .collect();
    let decay = log_slope(&points);
    PrimitiveRatioCurve {
        pointed,
        stable,
        decay_rate: decay.as_ref().map(|f| f.slope.exp()),
        decay,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RotationCheck {
    /// All rotations are pairwise distinct elements.
    pub distinct: bool,
    /// First coinciding pair of rotation offsets.
    pub witness: Option<(usize, usize)>,
}

/// Compares the cyclic rotations of a cyclically reduced `g`.
pub fn rotation_distinctness(model: &GroupModel, g: &Element) -> Result<RotationCheck> {
    let w = g.word();
    let (core, _) = model.cyclic_reduce_word(w);
    if core.as_slice() != w {
        return Err(Error::Input(format!(
            "{} is not cyclically reduced",
            model.format(g)
        )));
    }
    let p = rotation_period(w);
    Ok(if p < w.len() {
        RotationCheck {
            distinct: false,
            witness: Some((0, p)),
        }
    } else {
        RotationCheck {
            distinct: true,
            witness: None,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusMultiplicity {
    pub n: usize,
    pub delta: usize,
    /// Members of each sampled class in `A(o, n, Δ)`, in sample order.
    pub counts: Vec<u64>,
    pub max: u64,
    /// `max / n`, the empirical multiplicity constant.
    pub max_over_n: f64,
}

/// Counts the members of each sampled class with length in `[n-Δ, n+Δ]`, in
/// one pass over the annulus.
pub fn class_annulus_multiplicity(
    model: &GroupModel,
    n: usize,
    delta: usize,
    sample: &[Element],
    plan: &ShardPlan,
) -> Result<AnnulusMultiplicity> {
    if n == 0 {
        return Err(Error::Input("annulus radius must be positive".into()));
    }
    let canonical = |w: &[Letter]| {
        let (core, _) = model.cyclic_reduce_word(w);
        let r = least_rotation(&core);
        rotate(&core, r)
    };
    let mut slots: HashMap<Vec<Letter>, usize> = HashMap::new();
    let owner: Vec<usize> = sample
        .iter()
        .map(|g| {
            let next = slots.len();
            *slots.entry(canonical(g.word())).or_insert(next)
        })
        .collect();
    let k = slots.len();
    let parts = fold_range(
        model,
        n.saturating_sub(delta),
        n + delta,
        plan,
        || vec![0u64; k],
        |acc, w| {
            if let Some(&i) = slots.get(&canonical(w)) {
                acc[i] += 1;
            }
        },
    )?;
    let mut per_class = vec![0u64; k];
    for p in parts {
        for (a, b) in per_class.iter_mut().zip(p) {
            *a += b;
        }
    }
    let counts: Vec<u64> = owner.iter().map(|&i| per_class[i]).collect();
    let max = counts.iter().copied().max().unwrap_or(0);
    Ok(AnnulusMultiplicity {
        n,
        delta,
        counts,
        max,
        max_over_n: max as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    #[test]
    fn rotation_examples() {
        let m = f2();
        let r = rotation_distinctness(&m, &m.parse("a b a b").unwrap()).unwrap();
        assert_eq!(
            r,
            RotationCheck {
                distinct: false,
                witness: Some((0, 2))
            }
        );
        assert!(
            rotation_distinctness(&m, &m.parse("a b").unwrap())
                .unwrap()
                .distinct
        );
        assert!(rotation_distinctness(&m, &m.parse("a b a'").unwrap()).is_err());
    }

    #[test]
    fn annulus_multiplicity_examples() {
        let m = f2();
        let plan = ShardPlan::default();
        let sample = [
            m.parse("a b").unwrap(),
            m.parse("a a").unwrap(),
            m.parse("b a").unwrap(),
        ];
        let r = class_annulus_multiplicity(&m, 2, 0, &sample, &plan).unwrap();
        assert_eq!(r.counts, vec![2, 1, 2]);
        assert_eq!(r.max_over_n, 1.0);
        // Lengths 2..=4: ab, ba, then x·ab·x⁻¹ for x ∈ {a, b'} and x·ba·x⁻¹
        // for x ∈ {b, a'}.
        let r = class_annulus_multiplicity(&m, 3, 1, &sample[..1], &plan).unwrap();
        assert_eq!(r.counts, vec![6]);
    }

    #[test]
    fn ratio_curve_small_radii() {
        let m = f2();
        let c = ConjugacyCensus::build(&m, 12, &ShardPlan::default()).unwrap();
        let curve = primitive_ratio_curve(&c);
        assert_eq!(curve.pointed[2], 8.0 / 13.0);
        assert_eq!(curve.stable[1], Some(1.0));
        assert_eq!(curve.stable[2], Some(8.0 / 12.0));
        assert!(1.0 - curve.pointed[12] <= 0.01);
        assert!(curve.decay_rate.unwrap() < 1.0);
        assert!(envelope_check(&c, 3f64.ln(), 6, 12).is_ok());
        assert!(envelope_check(&c, 3f64.ln(), 6, 13).is_err());
    }
}
