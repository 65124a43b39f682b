//! Growth and conjugacy-growth series: exact coefficients, envelope fits
//! against `exp(δn)/n`, and probes for short linear recurrences.

mod recurrence;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::census::ConjugacyCensus;
use crate::enumeration::sphere_counts;
use crate::error::{Error, Result};
use crate::exec::ShardPlan;
use crate::fit::{envelope_stats, least_squares, EnvelopeStats};
use crate::group::GroupModel;

pub use recurrence::{rationality_probe, rationality_probe_rational, RationalityProbe, Recurrence};

/// Which counting function the coefficients `c_n` record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    /// Elements with `|g| = n`.
    Sphere,
    /// Elements with `|g| <= n`.
    Ball,
    /// Conjugacy classes with `ℓ_o[g] = n`.
    ConjugacyPointed,
    /// Primitive classes with `ℓ_o[g] = n`.
    ConjugacyPrimitive,
    /// Loxodromic classes with `τ[g] = n` and `ℓ_o[g] <= n`.
    ConjugacyStableCapped,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 5] = [
        SeriesKind::Sphere,
        SeriesKind::Ball,
        SeriesKind::ConjugacyPointed,
        SeriesKind::ConjugacyPrimitive,
        SeriesKind::ConjugacyStableCapped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::Sphere => "sphere",
            SeriesKind::Ball => "ball",
            SeriesKind::ConjugacyPointed => "conjugacy-pointed",
            SeriesKind::ConjugacyPrimitive => "conjugacy-primitive",
            SeriesKind::ConjugacyStableCapped => "conjugacy-stable-capped",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeriesKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown series kind {s:?}")))
    }
}

/// `c_0, ..., c_max_n`. Every kind has `c_0 = 1`: the identity class opens
/// each series, including the primitive and stable-capped ones.
pub fn series_coefficients(
    model: &GroupModel,
    kind: SeriesKind,
    max_n: usize,
    plan: &ShardPlan,
) -> Result<Vec<BigInt>> {
    let raw: Vec<u64> = match kind {
        SeriesKind::Sphere => sphere_counts(model, max_n, plan)?,
        SeriesKind::Ball => sphere_counts(model, max_n, plan)?
            .into_iter()
            .scan(0u64, |s, x| {
                *s += x;
                Some(*s)
            })
            .collect(),
        SeriesKind::ConjugacyPointed => {
            ConjugacyCensus::build_with_index_cap(model, max_n, 0, plan)?.classes_exact
        }
        SeriesKind::ConjugacyPrimitive => {
            let mut v =
                ConjugacyCensus::build_with_index_cap(model, max_n, 0, plan)?.primitive_exact;
            v[0] = 1;
            v
        }
        SeriesKind::ConjugacyStableCapped => {
            let mut v =
                ConjugacyCensus::build_with_index_cap(model, max_n, 0, plan)?.loxodromic_exact();
            v[0] = 1;
            v
        }
    };
    Ok(raw.into_iter().map(BigInt::from).collect())
}

/// Sums `c_k` over `|k - n| <= width` for each `n` whose annulus lies inside
/// the data.
pub fn annulus_aggregate(coefficients: &[BigInt], width: usize) -> Vec<BigInt> {
    let len = coefficients.len();
    (0..len.saturating_sub(width))
        .map(|n| {
            coefficients[n.saturating_sub(width)..=n + width]
                .iter()
                .sum()
        })
        .collect()
}

/// `n·c_n·exp(-delta_hat·n)` over `lo..=hi`. The only floating-point step in
/// the series pipeline.
pub fn envelope_fit(
    coefficients: &[BigInt],
    delta_hat: f64,
    lo: usize,
    hi: usize,
) -> Result<EnvelopeStats> {
    let values: Vec<f64> = coefficients
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
        .collect();
    envelope_stats(&values, delta_hat, lo, hi)
}

/// Slope of `ln(n·c_n)` over `lo..=hi`, the `δ` for which `n·c_n·e^{-δn}`
/// is flattest there.
pub fn envelope_exponent(coefficients: &[BigInt], lo: usize, hi: usize) -> Result<f64> {
    let lo = lo.max(1);
    if hi >= coefficients.len() || hi < lo + 1 {
        return Err(Error::Window(format!(
            "window {lo}..={hi} too short or outside the data"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, c) in coefficients.iter().enumerate().take(hi + 1).skip(lo) {
        let c = c.to_f64().unwrap_or(f64::INFINITY);
        if c > 0.0 {
            xs.push(n as f64);
            ys.push((n as f64 * c).ln());
        }
    }
    least_squares(&xs, &ys).map(|f| f.slope).ok_or_else(|| {
        Error::InsufficientData("fewer than two positive coefficients in the window".into())
    })
}

fn big_strings<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

fn opt_big_strings<S: Serializer>(
    v: &Option<Vec<BigInt>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => big_strings(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    #[serde(serialize_with = "big_strings")]
    pub coefficients: Vec<BigInt>,
    pub probe: RationalityProbe,
    pub verdict: String,
    pub delta_hat: f64,
    pub envelope: EnvelopeStats,
    pub annulus_width: Option<usize>,
    #[serde(serialize_with = "opt_big_strings")]
    pub annulus_coefficients: Option<Vec<BigInt>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesOptions {
    pub max_n: usize,
    pub max_order: usize,
    /// Envelope exponent; fitted from the window when absent.
    pub delta_hat: Option<f64>,
    pub window: (usize, usize),
    pub annulus_width: Option<usize>,
}

/// Coefficients, rationality probe and envelope of one series.
pub fn series_report(
    model: &GroupModel,
    kind: SeriesKind,
    options: &SeriesOptions,
    plan: &ShardPlan,
) -> Result<SeriesReport> {
    let (lo, hi) = options.window;
    if hi > options.max_n {
        return Err(Error::Window(format!(
            "window end {hi} beyond max_n = {}",
            options.max_n
        )));
    }
    let coefficients = series_coefficients(model, kind, options.max_n, plan)?;
    let probe = rationality_probe(&coefficients, options.max_order)?;
    let delta_hat = match options.delta_hat {
        Some(d) => d,
        None => envelope_exponent(&coefficients, lo, hi)?,
    };
    let envelope = envelope_fit(&coefficients, delta_hat, lo, hi)?;
    Ok(SeriesReport {
        kind,
        verdict: probe.verdict(),
        probe,
        delta_hat,
        envelope,
        annulus_width: options.annulus_width,
        annulus_coefficients: options
            .annulus_width
            .map(|w| annulus_aggregate(&coefficients, w)),
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    fn ints(v: &[u64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn coefficient_examples() {
        let m = f2();
        let plan = ShardPlan::default();
        assert_eq!(
            series_coefficients(&m, SeriesKind::Sphere, 5, &plan).unwrap(),
            ints(&[1, 4, 12, 36, 108, 324])
        );
        assert_eq!(
            series_coefficients(&m, SeriesKind::ConjugacyPointed, 2, &plan).unwrap(),
            ints(&[1, 4, 8])
        );
        let p = GroupModel::free_product(&[2, 3]).unwrap();
        for model in [&m, &p] {
            for kind in SeriesKind::ALL {
                assert_eq!(
                    series_coefficients(model, kind, 3, &plan).unwrap()[0],
                    BigInt::from(1),
                    "{kind}"
                );
            }
        }
        // Primitive necklaces of length 2 over F_2: a b, a b', a' b, a' b'.
        assert_eq!(
            series_coefficients(&m, SeriesKind::ConjugacyPrimitive, 2, &plan).unwrap(),
            ints(&[1, 4, 4])
        );
        // Z/2*Z/3 stable-capped: the three single letters are torsion.
        assert_eq!(
            series_coefficients(&p, SeriesKind::ConjugacyStableCapped, 1, &plan).unwrap(),
            ints(&[1, 0])
        );
        assert_eq!(
            series_coefficients(&m, SeriesKind::Ball, 2, &plan).unwrap(),
            ints(&[1, 5, 17])
        );
    }

    #[test]
    fn kinds_round_trip_through_names() {
        for k in SeriesKind::ALL {
            assert_eq!(k.name().parse::<SeriesKind>().unwrap(), k);
        }
        assert!("annulus".parse::<SeriesKind>().is_err());
    }

    #[test]
    fn primitive_envelope_is_flat() {
        let m = f2();
        let c = series_coefficients(
            &m,
            SeriesKind::ConjugacyPrimitive,
            14,
            &ShardPlan::default(),
        )
        .unwrap();
        let e = envelope_fit(&c, 3f64.ln(), 6, 14).unwrap();
        assert!(e.min > 0.8 && e.max < 1.1, "{e:?}");
    }

    #[test]
    fn geometric_control_envelope_is_n() {
        let c: Vec<BigInt> = (0..10u32).map(|n| BigInt::from(3u64.pow(n))).collect();
        let e = envelope_fit(&c, 3f64.ln(), 1, 9).unwrap();
        for n in 1..=9 {
            assert!((e.values[n] - n as f64).abs() < 1e-9);
        }
        let single = envelope_fit(&c, 3f64.ln(), 4, 4).unwrap();
        assert_eq!(single.min, single.max);
        assert!(envelope_fit(&c, 1.0, 5, 4).is_err());
    }

    #[test]
    fn annuli_sum_neighbours() {
        let c = ints(&[1, 4, 12, 36, 108]);
        assert_eq!(annulus_aggregate(&c, 1), ints(&[5, 17, 52, 156]));
        assert_eq!(annulus_aggregate(&c, 0), c);
    }

    #[test]
    fn report_for_sphere_series() {
        let m = f2();
        let options = SeriesOptions {
            max_n: 8,
            max_order: 3,
            delta_hat: None,
            window: (3, 8),
            annulus_width: Some(1),
        };
        let r = series_report(&m, SeriesKind::Sphere, &options, &ShardPlan::default()).unwrap();
        assert_eq!(r.probe.recurrence.as_ref().unwrap().order, 2);
        // n·3^n has log-slope log 3 plus the log n drift.
        assert!(r.delta_hat > 3f64.ln());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["kind"], "sphere");
        assert_eq!(json["coefficients"][8], "8748");
    }

    proptest! {
        #[test]
        fn envelope_scales_with_coefficients(
            v in prop::collection::vec(1u64..1_000_000, 6),
            k in 1u64..1000,
            delta in 0.0f64..2.0,
        ) {
            let c = ints(&v);
            let scaled: Vec<BigInt> = c.iter().map(|x| x * k).collect();
            let a = envelope_fit(&c, delta, 1, 5).unwrap();
            let b = envelope_fit(&scaled, delta, 1, 5).unwrap();
            for n in 1..=5 {
                let expect = a.values[n] * k as f64;
                prop_assert!((b.values[n] - expect).abs() <= 1e-9 * expect.abs().max(1.0));
            }
        }
    }
}
