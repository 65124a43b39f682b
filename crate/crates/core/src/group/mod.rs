//! Exact algebra and metric geometry of the supported models.

mod conjugacy;
mod elementary;
mod model;

pub(crate) use conjugacy::rotate;
pub use conjugacy::{least_rotation, rotation_period, ClassKind, ConjugacyRecord};
pub use elementary::ElementaryGroupReport;
pub use model::{Combine, Element, GroupModel, Letter, ModelKind};
