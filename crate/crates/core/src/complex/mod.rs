//! Finite windows of the projection complex built from translates of an
//! axis, with probes for loxodromic and acylindrical behaviour.

mod graph;
mod probes;

pub use graph::{
    build_complex, complex_from_table, distinct_translates, interval_set, max_pair_projection,
    projection_table, smallest_connecting_k, vertex_axis, window_stability, window_table,
    ProjectionComplexGraph, ProjectionTable, WindowStability,
};
pub use probes::{
    acylindricity_probe, complex_with_k, kernel_bound_probe, loxodromic_test, AcylindricityReport,
    AcylindricityRow, KernelBoundReport, LoxodromicReport,
};
