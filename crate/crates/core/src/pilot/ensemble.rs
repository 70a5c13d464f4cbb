//! |ψ|²-distributed trajectory ensembles integrated in lockstep with the
//! propagated wavefunction.
//!
//! Each nominal step `[t, t + dt]` propagates ψ by two half steps and guides
//! every live trajectory with the three resulting snapshots. Only one window
//! of snapshots is alive at a time, so memory does not grow with the run
//! length. Trajectories are independent given the (immutable) window and run
//! in parallel; per-trajectory random streams make the result independent of
//! scheduling.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::WavefunctionGrid;
use super::guidance::WaveHistory;
use super::propagate::Propagator;
use super::scenario::{packet_barrier_transmission, rectangular_barrier_transmission, ScenarioKind, ScenarioSpec};
use super::trajectory::{rk4_advance, IntegratorOptions, StepFailure, Trajectory, TrajectoryStatus};
use super::PilotError;
use crate::rng::stream_rng;
use crate::stats::{ks_distance, GridCdf};

pub const MIN_TRAJECTORIES: usize = 100;

/// Largest tolerated fraction of aborted trajectories.
pub const MAX_ABORT_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleOptions {
    /// Store every `record_every`-th nominal step of each path (the final
    /// step is always stored).
    pub record_every: usize,
    pub bins: usize,
    /// Nominal-step travel limit in grid cells before the step is split.
    pub max_travel_cells: f64,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self { record_every: 10, bins: 120, max_travel_cells: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub center: f64,
    pub count: usize,
    /// Bin-averaged `|ψ(T)|²`, normalized to the probability left on the grid.
    pub psi2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsCheckpoint {
    pub time: f64,
    pub ks: f64,
    pub live: usize,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub scenario: ScenarioSpec,
    pub seed: u64,
    pub trajectories: Vec<Trajectory>,
    pub histogram: Vec<HistogramBin>,
    /// KS distance between live positions and `|ψ(t)|²` at every recorded step.
    pub ks_trace: Vec<KsCheckpoint>,
    pub aborted: usize,
    pub exited: usize,
    pub absorbed: f64,
    pub final_grid: WavefunctionGrid,
}

impl EnsembleResult {
    pub fn final_ks(&self) -> f64 {
        self.ks_trace.last().map_or(f64::NAN, |c| c.ks)
    }

    /// Final positions of trajectories that were not aborted.
    pub fn final_positions(&self) -> Vec<f64> {
        self.trajectories
            .iter()
            .filter(|t| t.status != TrajectoryStatus::Aborted)
            .map(|t| t.last_position()[0])
            .collect()
    }
}

struct Walker {
    x: f64,
    status: TrajectoryStatus,
    path: Trajectory,
}

/// Inverse-CDF sample of the grid density (piecewise-linear CDF).
pub fn sample_initial_position(cdf_nodes: &[f64], origin: f64, spacing: f64, u: f64) -> f64 {
    let i = cdf_nodes.partition_point(|&c| c <= u).clamp(1, cdf_nodes.len() - 1) - 1;
    let (c0, c1) = (cdf_nodes[i], cdf_nodes[i + 1]);
    let frac = if c1 > c0 { ((u - c0) / (c1 - c0)).clamp(0.0, 1.0) } else { 0.5 };
    origin + (i as f64 + frac) * spacing
}

fn cumulative(density: &[f64], spacing: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(density.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in density.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * spacing;
        out.push(acc);
    }
    out.iter_mut().for_each(|c| *c /= acc);
    out
}

fn ks_against(grid: &WavefunctionGrid, positions: &[f64]) -> f64 {
    let ax = grid.axes()[0];
    let cdf = GridCdf::from_density(ax.min, ax.spacing(), &grid.density());
    ks_distance(positions, |x| cdf.eval(x))
}

pub fn run_ensemble(scenario: &ScenarioSpec, n_traj: usize, seed: u64) -> Result<EnsembleResult, PilotError> {
    run_ensemble_with(scenario, n_traj, seed, &EnsembleOptions::default())
}

pub fn run_ensemble_with(
    scenario: &ScenarioSpec,
    n_traj: usize,
    seed: u64,
    options: &EnsembleOptions,
) -> Result<EnsembleResult, PilotError> {
    if n_traj < MIN_TRAJECTORIES {
        return Err(PilotError::InvalidParameter(format!("ensemble needs at least {MIN_TRAJECTORIES} trajectories, got {n_traj}")));
    }
    if options.record_every == 0 || options.bins == 0 {
        return Err(PilotError::InvalidParameter("record_every and bins must be positive".into()));
    }
    let mut grid = scenario.initial_grid()?;
    let potential = scenario.potential(&grid);
    let steps = (scenario.t_final / scenario.dt - 1e-9).ceil() as usize;
    let dt = scenario.t_final / steps as f64;
    let mut propagator = Propagator::new(&grid, &potential, 0.5 * dt, scenario.absorbing)?;
    let axis = scenario.grid;
    let integrator = IntegratorOptions::for_grid(axis.spacing(), dt, options.max_travel_cells);

    let cdf0 = cumulative(&grid.density(), axis.spacing());
    let mut walkers: Vec<Walker> = (0..n_traj)
        .map(|i| {
            let u: f64 = stream_rng(seed, i as u64).random();
            let x = sample_initial_position(&cdf0, axis.min, axis.spacing(), u);
            Walker { x, status: TrajectoryStatus::Complete, path: Trajectory::start(1, 0.0, [x, 0.0]) }
        })
        .collect();

    let mut ks_trace = vec![KsCheckpoint { time: 0.0, ks: ks_against(&grid, &live_positions(&walkers)), live: n_traj }];

    let mut current = Arc::new(grid.clone());
    for step in 0..steps {
        let t = step as f64 * dt;
        let mut next = (*current).clone();
        propagator.step(&mut next)?;
        let mid = Arc::new(next.clone());
        propagator.step(&mut next)?;
        let end = Arc::new(next);
        let window = WaveHistory::new(t, 0.5 * dt, vec![current.clone(), mid, end.clone()])?;

        let t_next = (step + 1) as f64 * dt;
        let record = (step + 1) % options.record_every == 0 || step + 1 == steps;
        walkers.par_iter_mut().filter(|w| w.status == TrajectoryStatus::Complete).for_each(|w| {
            match rk4_advance(&window, t, [w.x, 0.0], dt, &integrator) {
                Ok(p) => w.x = p[0],
                Err(StepFailure::Exited) => w.status = TrajectoryStatus::Exited,
                Err(StepFailure::Underflow) => w.status = TrajectoryStatus::Aborted,
            }
            if record || w.status != TrajectoryStatus::Complete {
                w.path.push(t_next, [w.x, 0.0]);
            }
        });
        current = end;
        if record {
            let live = live_positions(&walkers);
            ks_trace.push(KsCheckpoint { time: t_next, ks: ks_against(&current, &live), live: live.len() });
        }
    }
    grid = (*current).clone();

    let aborted = walkers.iter().filter(|w| w.status == TrajectoryStatus::Aborted).count();
    let exited = walkers.iter().filter(|w| w.status == TrajectoryStatus::Exited).count();
    if aborted as f64 > MAX_ABORT_FRACTION * n_traj as f64 {
        return Err(PilotError::EnsembleQuality { aborted, total: n_traj });
    }

    let final_positions: Vec<f64> = walkers.iter().filter(|w| w.status != TrajectoryStatus::Aborted).map(|w| w.x).collect();
    let histogram = histogram(&grid, &final_positions, options.bins);
    let trajectories = walkers
        .into_iter()
        .map(|w| {
            let mut path = w.path;
            path.status = w.status;
            path
        })
        .collect();

    Ok(EnsembleResult {
        scenario: scenario.clone(),
        seed,
        trajectories,
        histogram,
        ks_trace,
        aborted,
        exited,
        absorbed: propagator.absorbed(),
        final_grid: grid,
    })
}

fn live_positions(walkers: &[Walker]) -> Vec<f64> {
    walkers.iter().filter(|w| w.status == TrajectoryStatus::Complete).map(|w| w.x).collect()
}

fn histogram(grid: &WavefunctionGrid, positions: &[f64], bins: usize) -> Vec<HistogramBin> {
    let ax = grid.axes()[0];
    let width = ax.length() / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in positions {
        let b = ((x - ax.min) / width).floor();
        if b >= 0.0 && (b as usize) < bins {
            counts[b as usize] += 1;
        }
    }
    let density = grid.density();
    let norm = grid.norm_sq();
    let mut sums = vec![0.0; bins];
    let mut nodes = vec![0usize; bins];
    for (j, p) in density.iter().enumerate() {
        let b = (((ax.coord(j) - ax.min) / width).floor() as usize).min(bins - 1);
        sums[b] += p;
        nodes[b] += 1;
    }
    (0..bins)
        .map(|b| HistogramBin {
            center: ax.min + (b as f64 + 0.5) * width,
            count: counts[b],
            psi2: if nodes[b] > 0 { sums[b] / nodes[b] as f64 / norm } else { 0.0 },
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmissionReport {
    pub n_traj: usize,
    /// Fraction of non-aborted trajectories ending beyond the barrier.
    pub trajectory_fraction: f64,
    pub mc_std_error: f64,
    /// `∫_{x > barrier end} |ψ(T)|²`.
    pub wave_transmission: f64,
    pub agree_within_3_sigma: bool,
    /// Plane-wave transmission at the packet's mean energy.
    pub plane_wave_transmission: f64,
    /// Plane-wave transmission averaged over the packet's momentum spread.
    pub packet_transmission: f64,
    pub aborted: usize,
    /// Probability removed by the absorbing layer (should be negligible).
    pub absorbed: f64,
}

/// Trajectory- and wave-based transmission through the barrier scenario.
pub fn tunneling_transmission(scenario: &ScenarioSpec, n_traj: usize, seed: u64) -> Result<TransmissionReport, PilotError> {
    barrier_energy(scenario)?;
    let result = run_ensemble(scenario, n_traj, seed)?;
    transmission_report(&result)
}

/// Transmission statistics of a finished barrier ensemble.
pub fn transmission_report(result: &EnsembleResult) -> Result<TransmissionReport, PilotError> {
    let scenario = &result.scenario;
    let energy = barrier_energy(scenario)?;
    let ScenarioKind::Barrier { sigma0, k0, height, width, .. } = scenario.kind else {
        unreachable!("checked by barrier_energy");
    };
    let (hbar, mass) = (scenario.hbar, scenario.mass);
    let end = scenario.barrier_end().expect("barrier scenario");
    let finals = result.final_positions();
    let n = finals.len();
    let beyond = finals.iter().filter(|&&x| x > end).count();
    let p = beyond as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt().max(0.5 / n as f64);
    let wave = result.final_grid.probability_beyond(0, end);
    Ok(TransmissionReport {
        n_traj: result.trajectories.len(),
        trajectory_fraction: p,
        mc_std_error: se,
        wave_transmission: wave,
        agree_within_3_sigma: (p - wave).abs() <= 3.0 * se,
        plane_wave_transmission: rectangular_barrier_transmission(energy, height, width, hbar, mass),
        packet_transmission: packet_barrier_transmission(k0, sigma0, height, width, hbar, mass),
        aborted: result.aborted,
        absorbed: result.absorbed,
    })
}

/// Mean packet energy, which must lie below a non-zero barrier.
fn barrier_energy(scenario: &ScenarioSpec) -> Result<f64, PilotError> {
    let ScenarioKind::Barrier { k0, height, .. } = scenario.kind else {
        return Err(PilotError::InvalidParameter("transmission needs a barrier scenario".into()));
    };
    let energy = scenario.hbar * scenario.hbar * k0 * k0 / (2.0 * scenario.mass);
    if height > 0.0 && energy >= height {
        return Err(PilotError::InvalidParameter(format!(
            "packet energy {energy} must lie below the barrier height {height}"
        )));
    }
    Ok(energy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_hits_nodes() {
        let cdf = [0.0, 0.25, 0.5, 1.0];
        assert_eq!(sample_initial_position(&cdf, 0.0, 1.0, 0.0), 0.0);
        assert_eq!(sample_initial_position(&cdf, 0.0, 1.0, 0.25), 1.0);
        assert!((sample_initial_position(&cdf, 0.0, 1.0, 0.75) - 2.5).abs() < 1e-15);
        assert!((sample_initial_position(&cdf, 0.0, 1.0, 0.999_999) - 3.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_small_ensembles() {
        assert!(run_ensemble(&ScenarioSpec::gaussian_free(), 10, 0).is_err());
    }

    #[test]
    fn plane_wave_ensemble_moves_rigidly() {
        let s = ScenarioSpec::plane_wave();
        let r = run_ensemble(&s, 200, 3).unwrap();
        let displacements: Vec<f64> = r
            .trajectories
            .iter()
            .filter(|t| t.status == TrajectoryStatus::Complete)
            .map(|t| t.last_position()[0] - t.positions[0][0])
            .collect();
        assert!(displacements.len() > 150);
        let first = displacements[0];
        assert!(displacements.iter().all(|d| (d - first).abs() < 1e-6));
        let k = s.effective_wavenumber().unwrap();
        assert!((first / (k * s.t_final) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn same_seed_same_histogram() {
        let s = ScenarioSpec { t_final: 2.0, ..ScenarioSpec::double_slit() };
        let a = run_ensemble(&s, 300, 11).unwrap();
        let b = run_ensemble(&s, 300, 11).unwrap();
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(a.trajectories, b.trajectories);
        let c = run_ensemble(&s, 300, 12).unwrap();
        assert_ne!(a.trajectories, c.trajectories);
    }
}
