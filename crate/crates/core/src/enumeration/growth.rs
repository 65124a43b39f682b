use serde::Serialize;

use super::census::CensusTable;
use crate::error::{Error, Result};
use crate::fit::least_squares;

/// Growth-exponent estimate: the slope of `ln N(o,n)` against `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    pub delta_hat: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub radii_used: Vec<usize>,
    /// Log residuals at `radii_used`.
    pub residuals: Vec<f64>,
    /// Counts were constant (or zero) over the fitted radii.
    pub degenerate: bool,
}

/// Least-squares slope of `ln counts[n]` over the larger half of the radii.
pub fn growth_exponent_of(radii: &[usize], counts: &[u64]) -> Result<GrowthFit> {
    if radii.len() < 4 || radii.len() != counts.len() {
        return Err(Error::InsufficientData(
            "growth fit needs at least four radii".into(),
        ));
    }
    let start = radii.len() / 2;
    let used: Vec<usize> = radii[start..].to_vec();
    let tail = &counts[start..];
    let degenerate = tail.iter().all(|&c| c == tail[0]) || tail.contains(&0);
    if degenerate {
        return Ok(GrowthFit {
            delta_hat: 0.0,
            intercept: (tail[0].max(1) as f64).ln(),
            slope_stderr: 0.0,
            residuals: vec![0.0; used.len()],
            radii_used: used,
            degenerate: true,
        });
    }
    let xs: Vec<f64> = used.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|&c| (c as f64).ln()).collect();
    let fit = least_squares(&xs, &ys).expect("distinct radii");
    Ok(GrowthFit {
        delta_hat: fit.slope,
        intercept: fit.intercept,
        slope_stderr: fit.slope_stderr,
        residuals: fit.residuals,
        radii_used: used,
        degenerate: false,
    })
}

/// Critical exponent estimate from a census' ball counts.
pub fn growth_exponent(census: &CensusTable) -> Result<GrowthFit> {
    growth_exponent_of(&census.radii, &census.ball_counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequences_are_exact() {
        let radii: Vec<usize> = (0..12).collect();
        let counts: Vec<u64> = radii.iter().map(|&n| 7 * 5u64.pow(n as u32)).collect();
        let f = growth_exponent_of(&radii, &counts).unwrap();
        assert!((f.delta_hat - 5f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn linear_growth_is_near_zero() {
        // Z on {a, a⁻¹}: balls of size 2n + 1.
        let spheres: Vec<u64> = (0..=400).map(|n| if n == 0 { 1 } else { 2 }).collect();
        let c = CensusTable::from_sphere_counts(&spheres, 0).unwrap();
        let f = growth_exponent(&c).unwrap();
        assert!(f.delta_hat < 0.01 && !f.degenerate);
    }

    #[test]
    fn constant_counts_are_flagged() {
        let f = growth_exponent_of(&[0, 1, 2, 3], &[1, 1, 1, 1]).unwrap();
        assert!(f.degenerate);
        assert_eq!(f.delta_hat, 0.0);
        assert!(growth_exponent_of(&[0, 1, 2], &[1, 2, 3]).is_err());
    }
}
