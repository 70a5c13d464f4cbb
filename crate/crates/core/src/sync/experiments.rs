//! Geometry experiments: triangle-angle sweep, tetrahedron vs coplanar square,
//! and the two-oscillator lock threshold.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clusters::{detect_clusters, ClusterOptions};
use super::network::{mean_pairwise_distance, safe_step, simulate, Kernel, OscillatorNetwork};
use super::SyncError;
use crate::rng::{stream_id, stream_rng};
use crate::stats::{pooled_std_error, Summary};

/// Fraction of [`super::MAX_PHASE_STEP`] used by the automatic step size.
const STEP_SAFETY: f64 = 0.5;
const RECORD_EVERY: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Coupling strength `K`.
    pub coupling: f64,
    pub kernel: Kernel,
    /// Common natural frequency.
    pub omega0: f64,
    /// Gaussian frequency jitter `σ_ω`; `None` means `0.05·K/⟨r_ij⟩`.
    pub jitter: Option<f64>,
    /// Fixed per-oscillator frequency offsets added before jitter; empty means
    /// none. Must match the oscillator count of the geometry when given.
    pub detuning: Vec<f64>,
    pub trials: usize,
    /// Triangle perimeter, held fixed across the angle sweep.
    pub perimeter: f64,
    /// Lock detection settings; `None` means [`ClusterOptions::for_coupling`].
    pub clusters: Option<ClusterOptions>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            coupling: 1.0,
            kernel: Kernel::InverseR,
            omega0: 1.0,
            jitter: None,
            detuning: Vec::new(),
            trials: 200,
            perimeter: 3.0,
            clusters: None,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<(), SyncError> {
        let bad = |key: &str, msg: String| Err(SyncError::InvalidParameter(format!("{key}: {msg}")));
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return bad("coupling", format!("must be non-negative, got {}", self.coupling));
        }
        if !self.omega0.is_finite() {
            return bad("omega0", "must be finite".into());
        }
        if let Some(j) = self.jitter {
            if !(j >= 0.0 && j.is_finite()) {
                return bad("jitter", format!("must be non-negative, got {j}"));
            }
        }
        if self.detuning.iter().any(|d| !d.is_finite()) {
            return bad("detuning", "must be finite".into());
        }
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        if !(self.perimeter > 0.0 && self.perimeter.is_finite()) {
            return bad("perimeter", format!("must be positive, got {}", self.perimeter));
        }
        self.kernel.validate()
    }

    pub fn cluster_options(&self) -> ClusterOptions {
        self.clusters.unwrap_or_else(|| ClusterOptions::for_coupling(self.coupling))
    }

    fn jitter_for(&self, positions: &[[f64; 3]]) -> f64 {
        self.jitter.unwrap_or_else(|| 0.05 * self.coupling / mean_pairwise_distance(positions))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    /// Largest triangle angle in degrees, or the geometry index for other runs.
    pub geometry: f64,
    pub trial: usize,
    /// Order parameter averaged over the lock window.
    pub final_r: f64,
    pub cluster_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryStats {
    pub geometry: f64,
    pub trials: usize,
    pub r: Summary,
    /// `p_k` for `k = 1..=N` (index `k − 1`).
    pub cluster_distribution: Vec<f64>,
}

impl GeometryStats {
    pub fn from_outcomes(geometry: f64, oscillators: usize, outcomes: &[TrialOutcome]) -> Self {
        let rs: Vec<f64> = outcomes.iter().map(|o| o.final_r).collect();
        let mut counts = vec![0usize; oscillators];
        for o in outcomes {
            counts[o.cluster_count - 1] += 1;
        }
        let total = outcomes.len() as f64;
        Self {
            geometry,
            trials: outcomes.len(),
            r: Summary::of(&rs),
            cluster_distribution: counts.into_iter().map(|c| c as f64 / total).collect(),
        }
    }
}

/// Vertices of the isosceles triangle with apex angle `angle_deg` (the largest
/// angle for `angle_deg ≥ 60°`) and the given perimeter, in the `z = 0` plane.
pub fn triangle_positions(angle_deg: f64, perimeter: f64) -> [[f64; 3]; 3] {
    let half = 0.5 * angle_deg.to_radians();
    let (s, c) = half.sin_cos();
    let leg = perimeter / (2.0 * (1.0 + s));
    [[0.0, 0.0, 0.0], [-leg * s, -leg * c, 0.0], [leg * s, -leg * c, 0.0]]
}

/// Regular tetrahedron with the given edge, centred on the origin.
pub fn tetrahedron_positions(edge: f64) -> [[f64; 3]; 4] {
    let a = edge / (2.0 * 2.0_f64.sqrt());
    [[a, a, a], [a, -a, -a], [-a, a, -a], [-a, -a, a]]
}

/// Side of the square whose mean pairwise distance equals that of a regular
/// tetrahedron of edge `edge` (which is `edge`).
pub fn equivalent_square_side(edge: f64) -> f64 {
    6.0 * edge / (4.0 + 2.0 * 2.0_f64.sqrt())
}

pub fn square_positions(side: f64) -> [[f64; 3]; 4] {
    let h = 0.5 * side;
    [[h, h, 0.0], [-h, h, 0.0], [-h, -h, 0.0], [h, -h, 0.0]]
}

/// Runs `config.trials` trials on one geometry. Trial `t` draws its initial
/// phases and jitter from stream `(group, t)` of `seed`.
pub fn run_trials(positions: &[[f64; 3]], config: &GeometryConfig, seed: u64, group: u64, label: f64) -> Result<Vec<TrialOutcome>, SyncError> {
    config.validate()?;
    let n = positions.len();
    if !config.detuning.is_empty() && config.detuning.len() != n {
        return Err(SyncError::InvalidParameter(format!(
            "detuning: has {} entries for {n} oscillators",
            config.detuning.len()
        )));
    }
    let sigma = config.jitter_for(positions);
    let jitter = Normal::new(0.0, sigma).map_err(|e| SyncError::InvalidParameter(format!("jitter: {e}")))?;
    let options = config.cluster_options();
    (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, stream_id(group, trial as u64));
            let phases: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
            let freqs: Vec<f64> = (0..n)
                .map(|i| config.omega0 + config.detuning.get(i).copied().unwrap_or(0.0) + jitter.sample(&mut rng))
                .collect();
            let mut net = OscillatorNetwork::new(positions.to_vec(), freqs, phases, config.coupling, config.kernel.clone())?;
            let dt = safe_step(&net, STEP_SAFETY);
            let history = simulate(&mut net, dt, options.span(), RECORD_EVERY)?;
            let report = detect_clusters(&history, &options)?;
            Ok(TrialOutcome { geometry: label, trial, final_r: report.window_mean_r, cluster_count: report.cluster_count })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricEffect {
    /// `mean_r(b) − mean_r(a)`.
    pub difference: f64,
    pub pooled_std_error: f64,
    pub detected: bool,
    pub verdict: String,
}

/// Flags a difference in mean order parameter larger than two pooled standard
/// errors, in either direction.
pub fn geometric_effect(a: &GeometryStats, b: &GeometryStats) -> GeometricEffect {
    let difference = b.r.mean - a.r.mean;
    let se = pooled_std_error(&a.r, &b.r);
    let detected = difference.abs() > 2.0 * se;
    let verdict = if detected {
        format!(
            "mean r differs by {difference:.3e} ({:.1} pooled standard errors) between {} and {}",
            difference.abs() / se,
            a.geometry,
            b.geometry
        )
    } else {
        "no geometric effect detected".to_string()
    };
    GeometricEffect { difference, pooled_std_error: se, detected, verdict }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleSweep {
    pub normalization: &'static str,
    pub angles_deg: Vec<f64>,
    pub outcomes: Vec<TrialOutcome>,
    pub stats: Vec<GeometryStats>,
    /// Comparison of 90° against 180° when both are in the sweep.
    pub effect_90_vs_180: Option<GeometricEffect>,
}

/// The angle grid 90°, 100°, …, 180°.
pub fn default_angles() -> Vec<f64> {
    (0..10).map(|i| 90.0 + 10.0 * i as f64).collect()
}

pub fn triangle_sweep(config: &GeometryConfig, angles_deg: &[f64], seed: u64) -> Result<TriangleSweep, SyncError> {
    if angles_deg.is_empty() {
        return Err(SyncError::InvalidParameter("angles: must not be empty".into()));
    }
    if let Some(a) = angles_deg.iter().find(|a| !(60.0..=180.0).contains(*a)) {
        return Err(SyncError::InvalidParameter(format!("angles: {a}° is outside [60°, 180°]")));
    }
    let mut outcomes = Vec::with_capacity(angles_deg.len() * config.trials);
    let mut stats = Vec::with_capacity(angles_deg.len());
    for (g, &angle) in angles_deg.iter().enumerate() {
        let positions = triangle_positions(angle, config.perimeter);
        let run = run_trials(&positions, config, seed, g as u64, angle)?;
        stats.push(GeometryStats::from_outcomes(angle, 3, &run));
        outcomes.extend(run);
    }
    let find = |a: f64| stats.iter().find(|s| s.geometry == a);
    let effect_90_vs_180 = match (find(90.0), find(180.0)) {
        (Some(a), Some(b)) => Some(geometric_effect(a, b)),
        _ => None,
    };
    Ok(TriangleSweep { normalization: "constant perimeter", angles_deg: angles_deg.to_vec(), outcomes, stats, effect_90_vs_180 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TetrahedronReport {
    pub edge: f64,
    pub square_side: f64,
    pub regular: GeometryStats,
    pub square: GeometryStats,
    pub outcomes: Vec<TrialOutcome>,
    /// `square − regular`.
    pub effect: GeometricEffect,
}

/// Regular tetrahedron (geometry 0) vs coplanar square at equal mean pairwise
/// distance (geometry 1).
pub fn tetrahedron_run(config: &GeometryConfig, edge: f64, seed: u64) -> Result<TetrahedronReport, SyncError> {
    if !(edge > 0.0 && edge.is_finite()) {
        return Err(SyncError::InvalidParameter(format!("edge: must be positive, got {edge}")));
    }
    let side = equivalent_square_side(edge);
    let regular_runs = run_trials(&tetrahedron_positions(edge), config, seed, 0, 0.0)?;
    let square_runs = run_trials(&square_positions(side), config, seed, 1, 1.0)?;
    let regular = GeometryStats::from_outcomes(0.0, 4, &regular_runs);
    let square = GeometryStats::from_outcomes(1.0, 4, &square_runs);
    let effect = geometric_effect(&regular, &square);
    let mut outcomes = regular_runs;
    outcomes.extend(square_runs);
    Ok(TetrahedronReport { edge, square_side: side, regular, square, outcomes, effect })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    /// `K·kernel(r)`.
    pub effective_coupling: f64,
    /// Bisected lock boundary in `|Δω|`.
    pub delta_omega: f64,
    /// `|Δω| / (2 k_e)`; 1 for the exact boundary.
    pub ratio: f64,
}

/// Whether a pair with detuning `delta_omega` frequency-locks. The pair starts
/// in phase and is observed over `60/k_e` after a `100/k_e` transient.
pub fn pair_locks(coupling: f64, kernel: &Kernel, distance: f64, delta_omega: f64) -> Result<bool, SyncError> {
    let mut net = OscillatorNetwork::new(
        vec![[0.0; 3], [distance, 0.0, 0.0]],
        vec![0.5 * delta_omega, -0.5 * delta_omega],
        vec![0.0, 0.0],
        coupling,
        kernel.clone(),
    )?;
    let k_e = net.weight(0, 1).abs();
    if k_e == 0.0 {
        return Ok(delta_omega == 0.0);
    }
    let options = ClusterOptions { tol: 0.1, window: 60.0 / k_e, transient: 100.0 / k_e };
    let dt = safe_step(&net, STEP_SAFETY);
    let history = simulate(&mut net, dt, options.span(), RECORD_EVERY)?;
    Ok(detect_clusters(&history, &options)?.locked)
}

/// Bisects the two-oscillator lock boundary in `|Δω|` to relative width `rel_tol`.
pub fn lock_threshold(coupling: f64, kernel: &Kernel, distance: f64, rel_tol: f64) -> Result<ThresholdEstimate, SyncError> {
    if !(coupling > 0.0) || !(distance > 0.0) {
        return Err(SyncError::InvalidParameter("coupling and distance must be positive".into()));
    }
    let k_e = (coupling * kernel.eval(distance)).abs();
    if !(k_e > 0.0) {
        return Err(SyncError::InvalidParameter("effective coupling vanishes at this distance".into()));
    }
    let (mut lo, mut hi) = (0.0, 4.0 * k_e);
    if pair_locks(coupling, kernel, distance, hi)? {
        return Err(SyncError::InvalidParameter("pair still locks at |Δω| = 4k_e".into()));
    }
    while hi - lo > rel_tol * k_e {
        let mid = 0.5 * (lo + hi);
        if pair_locks(coupling, kernel, distance, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta_omega = 0.5 * (lo + hi);
    Ok(ThresholdEstimate { effective_coupling: k_e, delta_omega, ratio: delta_omega / (2.0 * k_e) })
}

/// Interior angles in degrees, largest first.
pub fn triangle_angles(p: &[[f64; 3]; 3]) -> [f64; 3] {
    let angle = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| {
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let nu = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        let nv = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        (dot / (nu * nv)).clamp(-1.0, 1.0).acos() * 180.0 / PI
    };
    let mut out = [angle(p[0], p[1], p[2]), angle(p[1], p[2], p[0]), angle(p[2], p[0], p[1])];
    out.sort_by(|a, b| b.total_cmp(a));
    out
}
