//! Conjugacy classes counted by pointed and stable length, with the
//! envelope, primitivity and multiplicity statistics built on those counts.

mod necklace;
mod stats;

pub use necklace::{ConjugacyCensus, DEFAULT_INDEX_CAP};
pub use stats::{
    class_annulus_multiplicity, envelope_check, primitive_ratio_curve, rotation_distinctness,
    AnnulusMultiplicity, CensusEnvelopes, PrimitiveRatioCurve, RotationCheck,
};
