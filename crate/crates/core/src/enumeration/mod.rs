//! Sphere, ball and annulus enumeration, growth fits, subgroup automata and
//! the statistical convex-cocompactness estimator.

mod census;
mod growth;
mod scc;
mod sphere;
mod subgroup;

pub use census::{build_census, CensusTable};
pub use growth::{growth_exponent, growth_exponent_of, GrowthFit};
pub use scc::{scc_estimate, SccReport};
pub(crate) use sphere::normal_words;
pub use sphere::{enumerate_ball, enumerate_sphere, fold_range, sphere_counts};
pub use subgroup::SubgroupAutomaton;
