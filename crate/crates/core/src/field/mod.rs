//! Ring-mode carrier fields, their far-field form and wave-equation residuals.

mod bessel;
mod sonon;
mod wave;

pub use bessel::{cylindrical_bessel, spherical_bessel, MAX_ORDER};
pub use sonon::{
    carrier, chi_far_field, far_field_amplitude, far_field_deviation, ring_integral, sonon_field,
    ComplexFieldValue, FarFieldSample, FieldPoint, SononMode, DEFAULT_QUAD_NODES, MIN_QUAD_NODES,
};
pub use wave::{kg_dispersion_residual, kg_frequency, wave_residual};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("spherical Bessel order {0} is not supported (m must be 0..=3)")]
    UnsupportedOrder(u32),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("evaluation point lies on the source ring (distance {distance:e})")]
    SingularGeometry { distance: f64 },
}
