//! Networks of phase oscillators with geometry-dependent coupling and the
//! triangle/tetrahedron locking experiments.

mod clusters;
mod experiments;
mod network;

pub use clusters::{detect_clusters, ClusterOptions, CoherenceReport};
pub use experiments::{
    default_angles, equivalent_square_side, geometric_effect, lock_threshold, pair_locks, run_trials,
    square_positions, tetrahedron_positions, tetrahedron_run, triangle_angles, triangle_positions, triangle_sweep,
    GeometricEffect, GeometryConfig, GeometryStats, TetrahedronReport, ThresholdEstimate, TrialOutcome, TriangleSweep,
};
pub use network::{
    distance, mean_pairwise_distance, order_parameter, safe_step, simulate, Kernel, OscillatorNetwork, PhaseHistory,
    MAX_PHASE_STEP,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SyncError {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step too large: dt = {dt} with max |dθ/dt| = {max_rate} exceeds the 0.1 rad guard")]
    StepTooLarge { dt: f64, max_rate: f64 },
    #[error("insufficient history: {0}")]
    InsufficientHistory(String),
}
