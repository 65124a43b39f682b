//! Conjugacy growth of free groups and free products of finite cyclic groups
//! acting on their Cayley graphs.
//!
//! The crate enumerates balls, spheres and conjugacy classes exactly, fits
//! growth exponents, and audits the contracting-geometry constructions that
//! control conjugacy growth: projections to axes, barriers, periodic
//! admissible paths and projection complexes. Growth series can be probed for
//! short linear recurrences with exact rational arithmetic.

pub mod census;
pub mod complex;
pub mod enumeration;
pub mod error;
pub mod exec;
pub mod fit;
pub mod geometry;
pub mod group;
pub mod series;

pub use error::{Error, Result};
pub use exec::{Execution, ShardPlan};
pub use group::{Element, GroupModel, Letter};
