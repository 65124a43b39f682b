use serde::Serialize;

use super::sphere::sphere_counts;
use crate::error::{Error, Result};
use crate::exec::ShardPlan;
use crate::group::GroupModel;

/// Exact per-radius counts of spheres, balls `N(o,n)` and annuli
/// `A(o,n,Δ) = {g : |d(o,go) - n| <= Δ}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusTable {
    pub radii: Vec<usize>,
    pub sphere_counts: Vec<u64>,
    pub ball_counts: Vec<u64>,
    pub annulus_width: usize,
    pub annulus_counts: Vec<u64>,
}

impl CensusTable {
    /// Builds the table from sphere sizes for radii `0..spheres.len() - Δ`.
    /// The extra `Δ` spheres are needed to close the outer annuli.
    pub fn from_sphere_counts(spheres: &[u64], annulus_width: usize) -> Result<Self> {
        if spheres.len() <= annulus_width {
            return Err(Error::InsufficientData(format!(
                "{} sphere sizes cannot close annuli of width {annulus_width}",
                spheres.len()
            )));
        }
        let max = spheres.len() - 1 - annulus_width;
        let radii: Vec<usize> = (0..=max).collect();
        let mut ball_counts = Vec::with_capacity(max + 1);
        let mut acc = 0u64;
        for &s in &spheres[..=max] {
            acc += s;
            ball_counts.push(acc);
        }
        let annulus_counts = radii
            .iter()
            .map(|&n| {
                let lo = n.saturating_sub(annulus_width);
                spheres[lo..=n + annulus_width].iter().sum()
            })
            .collect();
        Ok(CensusTable {
            radii,
            sphere_counts: spheres[..=max].to_vec(),
            ball_counts,
            annulus_width,
            annulus_counts,
        })
    }

    pub fn max_radius(&self) -> usize {
        *self.radii.last().unwrap_or(&0)
    }

    /// CSV with header `n,sphere,ball,annulus`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,sphere,ball,annulus\n");
        for (i, n) in self.radii.iter().enumerate() {
            s.push_str(&format!(
                "{n},{},{},{}\n",
                self.sphere_counts[i], self.ball_counts[i], self.annulus_counts[i]
            ));
        }
        s
    }
}

/// Exact census by exhaustive enumeration out to `max_radius + Δ`.
pub fn build_census(
    model: &GroupModel,
    max_radius: usize,
    annulus_width: usize,
    plan: &ShardPlan,
) -> Result<CensusTable> {
    let spheres = sphere_counts(model, max_radius + annulus_width, plan)?;
    CensusTable::from_sphere_counts(&spheres, annulus_width)
}
