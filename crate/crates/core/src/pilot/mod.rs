//! Split-step wave propagation and de Broglie–Bohm trajectories in one and
//! two dimensions.

mod ensemble;
mod grid;
mod guidance;
mod propagate;
mod scenario;
mod trajectory;

pub use ensemble::{
    run_ensemble, run_ensemble_with, sample_initial_position, transmission_report, tunneling_transmission, EnsembleOptions, EnsembleResult,
    HistogramBin, KsCheckpoint, TransmissionReport, MAX_ABORT_FRACTION, MIN_TRAJECTORIES,
};
pub use grid::{free_gaussian, free_gaussian_width, gaussian_packet, Axis, Point, WavefunctionGrid, MIN_SAMPLES};
pub use guidance::{guidance_velocity, AnalyticPsi, PsiProvider, VelocityFault, WaveHistory, NODE_FRACTION};
pub use propagate::{propagate, Propagation, Propagator, SampledPotential, ABSORBING_FRACTION, MAX_NORM_DRIFT};
pub use scenario::{packet_barrier_transmission, rectangular_barrier_transmission, ScenarioKind, ScenarioSpec};
pub use trajectory::{
    integrate_trajectory, rk4_advance, IntegratorOptions, StepFailure, Trajectory, TrajectoryStatus, MAX_HALVINGS,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PilotError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time step too large: {0}")]
    StepTooLarge(String),
    #[error("propagation unstable: norm drift {drift:e}")]
    Unstable { drift: f64 },
    #[error("guidance velocity undefined near a node at {position:?}")]
    NodeProximity { position: Point },
    #[error("position {position:?} lies outside the grid")]
    OutsideGrid { position: Point },
    #[error("trajectory aborted at t = {time} after step underflow near a node")]
    TrajectoryAbort { time: f64, partial: Box<Trajectory> },
    #[error("{aborted} of {total} trajectories aborted (limit 1%)")]
    EnsembleQuality { aborted: usize, total: usize },
}
