//! Linear-drift census: how often a sphere element is long in stable length,
//! has its axis near the basepoint, and carries a barrier along that axis.

use serde::Serialize;

use super::barrier::{BarrierProbe, BarrierSpec, FractionCensus};
use super::path::AxisLine;
use crate::enumeration::fold_range;
use crate::error::{Error, Result};
use crate::exec::ShardPlan;
use crate::fit::{log_slope, LineFit};
use crate::group::{ClassKind, GroupModel, Letter};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftSpec {
    /// Barrier element `f^m`, built from `f` and `m`.
    pub barrier: BarrierSpec,
    pub theta1: f64,
    pub theta2: f64,
}

impl DriftSpec {
    pub fn new(
        model: &GroupModel,
        f: &crate::group::Element,
        m: usize,
        epsilon: usize,
        theta1: f64,
        theta2: f64,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::Input("the barrier power m must be positive".into()));
        }
        for (name, v) in [("theta1", theta1), ("theta2", theta2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Input(format!("{name} = {v} outside [0, 1]")));
            }
        }
        let fm = model.pow(f, m as i64);
        Ok(DriftSpec {
            barrier: BarrierSpec::new(model, epsilon, &fm)?,
            theta1,
            theta2,
        })
    }
}

/// Clause outcomes for one element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DriftClauses {
    pub long_axis: bool,
    pub near_axis: bool,
    pub axis_barrier: bool,
}

impl DriftClauses {
    pub fn all(&self) -> bool {
        self.long_axis && self.near_axis && self.axis_barrier
    }
}

/// `min |ℓ(j)|` over two periods either side of `ℓ(0)`: the distance from
/// `o` to the axis line.
pub fn axis_distance(model: &GroupModel, line: &AxisLine) -> usize {
    let t = 2 * line.period() as i64;
    (-t..=t)
        .map(|j| line.vertex(model, j).len())
        .min()
        .unwrap_or(0)
}

fn classify(
    model: &GroupModel,
    spec: &DriftSpec,
    scan: &BarrierProbe<'_>,
    w: &[Letter],
) -> DriftClauses {
    let n = w.len() as f64;
    let (core, conjugator) = model.cyclic_reduce_word(w);
    if model.core_kind(&core) != ClassKind::Loxodromic {
        return DriftClauses::default();
    }
    let line = AxisLine { conjugator, core };
    let tau = line.period();
    let reach = spec.barrier.f.len() + 2 * spec.barrier.epsilon;
    let k = reach.div_ceil(tau) as i64 + 1;
    let span = k * tau as i64;
    let segment = line.segment(model, -span, span);
    DriftClauses {
        long_axis: tau as f64 >= (1.0 - spec.theta1) * n,
        near_axis: axis_distance(model, &line) as f64 <= spec.theta2 * n,
        axis_barrier: scan.has_barrier(&segment.word),
    }
}

/// Clause outcomes of a single element.
pub fn drift_clauses(
    model: &GroupModel,
    spec: &DriftSpec,
    g: &crate::group::Element,
) -> DriftClauses {
    let probe = BarrierProbe::new(model, &spec.barrier);
    classify(model, spec, &probe, g.word())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftCensus {
    pub long_axis: FractionCensus,
    pub near_axis: FractionCensus,
    pub axis_barrier: FractionCensus,
    pub all: FractionCensus,
}

impl DriftCensus {
    /// Log-linear fit of `1 - fraction(all)` on `lo..=hi`; `exp(slope)` is
    /// the rate at which the conjunction approaches 1.
    pub fn approach_rate(&self, lo: usize, hi: usize) -> Result<LineFit> {
        if lo >= hi || hi >= self.all.fractions.len() {
            return Err(Error::Window(format!(
                "window {lo}..={hi} outside the census"
            )));
        }
        let points: Vec<(usize, f64)> = (lo..=hi)
            .map(|n| (n, 1.0 - self.all.fractions[n]))
            .collect();
        log_slope(&points).ok_or_else(|| Error::InsufficientData("no failures left to fit".into()))
    }
}

/// Per-sphere fractions of each clause and of their conjunction.
pub fn linear_drift_census(
    model: &GroupModel,
    spec: &DriftSpec,
    max_radius: usize,
    plan: &ShardPlan,
) -> Result<DriftCensus> {
    let probe = BarrierProbe::new(model, &spec.barrier);
    let width = max_radius + 1;
    let parts = fold_range(
        model,
        0,
        max_radius,
        plan,
        || vec![0u64; 5 * width],
        |acc: &mut Vec<u64>, w| {
            let n = w.len();
            let c = classify(model, spec, &probe, w);
            acc[n] += 1;
            for (i, hit) in [c.long_axis, c.near_axis, c.axis_barrier, c.all()]
                .into_iter()
                .enumerate()
            {
                acc[(i + 1) * width + n] += u64::from(hit);
            }
        },
    )?;
    let mut acc = vec![0u64; 5 * width];
    for p in parts {
        for (a, b) in acc.iter_mut().zip(p) {
            *a += b;
        }
    }
    let totals = acc[..width].to_vec();
    let census = |i: usize| {
        FractionCensus::from_counts(acc[i * width..(i + 1) * width].to_vec(), totals.clone())
    };
    Ok(DriftCensus {
        long_axis: census(1),
        near_axis: census(2),
        axis_barrier: census(3),
        all: census(4),
    })
}
