//! Projections to orbit axes, contraction audits, barriers and admissible
//! paths in the Cayley graph.

mod admissible;
mod axis;
mod barrier;
mod contraction;
mod drift;
mod path;

pub use admissible::{
    build_admissible_witness, mutate_witness, validate_admissible, AdmissibleParams,
    AdmissiblePathWitness, AdmissibleReport, Mutation, DEFAULT_D, DEFAULT_WINDOW,
};
pub use axis::{
    projection_diameter, projection_diameter_growing, AxisSet, AxisTemplate, Projection,
};
pub use barrier::{
    barrier_free_census, find_barrier, fractional_barrier_census, is_fractionally_barrier_free,
    BarrierHit, BarrierSpec, FractionCensus,
};
pub use contraction::{
    axis_samples, bounded_intersection_audit, contraction_audit, stable_axis_audit,
    BoundedIntersectionReport, ContractionReport, StableAxisReport, StableAxisSample,
};
pub use drift::{
    axis_distance, drift_clauses, linear_drift_census, DriftCensus, DriftClauses, DriftSpec,
};
pub use path::{is_geodesic_vertex_path, AxisLine, GeodesicPath};
