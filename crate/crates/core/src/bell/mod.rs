//! Light-cone audit of Bell-test geometries, CHSH Monte Carlo and the
//! Bremermann rate. SI units throughout.

mod audit;
mod chsh;
mod models;

pub use audit::{audit_experiment, format_duration, format_length, AuditReport, ExperimentGeometry, LoopholeClass, WindowComparison};
pub use chsh::{
    all_strategies, brute_force_lhv_max, brute_force_lhv_max_filtered, chsh, deterministic_s, ChshResult, Correlation, Settings,
    TrialRecord, MIN_TRIALS_PER_PAIR, PAIR_LABELS, PAIR_SIGNS,
};
pub use models::{
    quantum_correlation, simulate_local_model, LocalModelKind, LocalModelSpec, CORRELATION_CONVENTION, NONLOCAL_REFUSAL,
};

/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant (J·s), exact.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// `h/c²` (kg·s): the mass whose Bremermann rate is 1/s.
pub const MASS_PER_HERTZ: f64 = PLANCK / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);

/// Bremermann limit `m c²/h` in operations per second for a mass in kg.
pub fn bremermann_limit(mass_kg: f64) -> Result<f64, BellError> {
    if !(mass_kg > 0.0 && mass_kg.is_finite()) {
        return Err(BellError::InvalidParameter(format!("mass must be positive, got {mass_kg}")));
    }
    Ok(mass_kg / MASS_PER_HERTZ)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BellError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid trial record: {0}")]
    InvalidRecord(String),
    #[error("setting pair {pair} has {trials} trials, need at least {required}")]
    InsufficientTrials { pair: &'static str, trials: usize, required: usize },
    #[error("{0}")]
    Contract(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bremermann_values() {
        assert_eq!(bremermann_limit(MASS_PER_HERTZ).unwrap(), 1.0);
        // c²/h in 40-digit arithmetic.
        let one_kg = bremermann_limit(1.0).unwrap();
        assert!((one_kg / 1.356_392_489_652_132_101_3e50 - 1.0).abs() < 1e-12);
        let m0 = 3.7e-20;
        assert_eq!(bremermann_limit(2.0 * m0).unwrap(), 2.0 * bremermann_limit(m0).unwrap());
        assert!(bremermann_limit(0.0).is_err());
    }
}
