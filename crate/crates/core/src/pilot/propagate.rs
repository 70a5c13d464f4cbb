//! Strang split-step Fourier propagation of the Schrödinger equation
//! `iħ ∂ψ/∂t = −ħ²/(2m) ∇²ψ + V ψ` on a periodic grid, with an optional
//! cosine-taper absorbing layer.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{Axis, Point, WavefunctionGrid};
use super::PilotError;

/// Fraction of each axis, at either end, covered by the absorbing taper.
pub const ABSORBING_FRACTION: f64 = 0.1;

/// Relative norm drift (after accounting for absorbed probability) treated as
/// numerical instability.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

/// Potential sampled on the grid nodes (storage order of the grid).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential(pub Vec<f64>);

impl SampledPotential {
    pub fn sample<V: Fn(Point) -> f64>(grid: &WavefunctionGrid, potential: V) -> Self {
        Self((0..grid.values().len()).map(|i| potential(grid.node(i))).collect())
    }

    pub fn zero(grid: &WavefunctionGrid) -> Self {
        Self(vec![0.0; grid.values().len()])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

pub struct Propagator {
    axes: Vec<Axis>,
    dt: f64,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    mask: Option<Vec<f64>>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    reference_norm: f64,
    absorbed: f64,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator")
            .field("axes", &self.axes)
            .field("dt", &self.dt)
            .field("absorbing", &self.mask.is_some())
            .field("absorbed", &self.absorbed)
            .finish()
    }
}

impl Propagator {
    /// Builds a propagator for `grid`'s geometry. The potential phase per step
    /// must stay below π (`dt·max|V|/ħ ≤ π`) so it is not aliased.
    pub fn new(grid: &WavefunctionGrid, potential: &SampledPotential, dt: f64, absorbing: bool) -> Result<Self, PilotError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(PilotError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        if potential.0.len() != grid.values().len() || potential.0.iter().any(|v| !v.is_finite()) {
            return Err(PilotError::InvalidParameter("potential must be finite and match the grid".into()));
        }
        let hbar = grid.hbar();
        let mass = grid.mass();
        let max_phase = dt * potential.max_abs() / hbar;
        if max_phase > std::f64::consts::PI {
            return Err(PilotError::StepTooLarge(format!(
                "potential phase per step {max_phase:.3} exceeds π; reduce dt"
            )));
        }
        let axes = grid.axes().to_vec();
        let half_potential = potential.0.iter().map(|v| Complex64::from_polar(1.0, -0.5 * v * dt / hbar)).collect();

        let kinetic = match axes.as_slice() {
            [ax] => (0..ax.samples).map(|j| kinetic_phase(ax.wavenumber(j).powi(2), dt, hbar, mass)).collect(),
            [ax, ay] => (0..ax.samples)
                .flat_map(|i| (0..ay.samples).map(move |j| ax.wavenumber(i).powi(2) + ay.wavenumber(j).powi(2)))
                .map(|k2| kinetic_phase(k2, dt, hbar, mass))
                .collect(),
            _ => unreachable!("grid validated"),
        };

        let mask = absorbing.then(|| absorbing_mask(&axes));

        let mut planner = FftPlanner::new();
        let forward = axes.iter().map(|a| planner.plan_fft_forward(a.samples)).collect();
        let inverse = axes.iter().map(|a| planner.plan_fft_inverse(a.samples)).collect();

        Ok(Self {
            axes,
            dt,
            half_potential,
            kinetic,
            mask,
            forward,
            inverse,
            reference_norm: grid.norm_sq(),
            absorbed: 0.0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Total probability removed by the absorbing layer so far.
    pub fn absorbed(&self) -> f64 {
        self.absorbed
    }

    /// Advances `grid` by one step.
    pub fn step(&mut self, grid: &mut WavefunctionGrid) -> Result<(), PilotError> {
        let mut psi = grid.values().to_vec();
        for (z, p) in psi.iter_mut().zip(&self.half_potential) {
            *z *= p;
        }
        self.transform(&mut psi, true);
        for (z, k) in psi.iter_mut().zip(&self.kinetic) {
            *z *= k;
        }
        self.transform(&mut psi, false);
        let scale = 1.0 / psi.len() as f64;
        for (z, p) in psi.iter_mut().zip(&self.half_potential) {
            *z *= p * scale;
        }
        let vol = grid.cell_volume();
        if let Some(mask) = &self.mask {
            let before: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * vol;
            for (z, m) in psi.iter_mut().zip(mask) {
                *z *= m;
            }
            let after: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * vol;
            self.absorbed += before - after;
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * vol;
        let drift = (norm + self.absorbed - self.reference_norm).abs() / self.reference_norm;
        if !norm.is_finite() || drift > MAX_NORM_DRIFT {
            return Err(PilotError::Unstable { drift });
        }
        grid.set_values(psi);
        Ok(())
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        let plans = if forward { &self.forward } else { &self.inverse };
        match self.axes.as_slice() {
            [_] => plans[0].process(data),
            [ax, ay] => {
                let (nx, ny) = (ax.samples, ay.samples);
                // Rows (contiguous along y).
                for row in data.chunks_exact_mut(ny) {
                    plans[1].process(row);
                }
                // Columns via gather/scatter.
                let mut column = vec![Complex64::new(0.0, 0.0); nx];
                for j in 0..ny {
                    for i in 0..nx {
                        column[i] = data[i * ny + j];
                    }
                    plans[0].process(&mut column);
                    for i in 0..nx {
                        data[i * ny + j] = column[i];
                    }
                }
            }
            _ => unreachable!(),
        }
    }
}

fn kinetic_phase(k2: f64, dt: f64, hbar: f64, mass: f64) -> Complex64 {
    Complex64::from_polar(1.0, -hbar * k2 * dt / (2.0 * mass))
}

/// Per-node multiplier: 1 in the interior, `cos(π/2 · s)^{1/8}` across the
/// outer layer, where `s` runs from 0 at the inner edge to 1 at the boundary.
fn absorbing_mask(axes: &[Axis]) -> Vec<f64> {
    let profile = |a: &Axis| -> Vec<f64> {
        let n = a.samples;
        let width = (ABSORBING_FRACTION * n as f64).max(1.0);
        (0..n)
            .map(|j| {
                let edge_dist = j.min(n - 1 - j) as f64;
                if edge_dist >= width {
                    1.0
                } else {
                    let s = (width - edge_dist) / width;
                    (0.5 * std::f64::consts::PI * s).cos().max(0.0).powf(0.125)
                }
            })
            .collect()
    };
    match axes {
        [ax] => profile(ax),
        [ax, ay] => {
            let (px, py) = (profile(ax), profile(ay));
            px.iter().flat_map(|a| py.iter().map(move |b| a * b)).collect()
        }
        _ => unreachable!(),
    }
}

/// Result of [`propagate`]: every intermediate state including the initial one.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub dt: f64,
    pub snapshots: Vec<WavefunctionGrid>,
    /// Cumulative absorbed probability at each snapshot.
    pub absorbed: Vec<f64>,
}

/// Propagates `grid` for `steps` steps of `dt`, returning all snapshots.
pub fn propagate<V: Fn(Point) -> f64>(
    grid: &WavefunctionGrid,
    potential: V,
    dt: f64,
    steps: usize,
    absorbing: bool,
) -> Result<Propagation, PilotError> {
    let sampled = SampledPotential::sample(grid, potential);
    let mut prop = Propagator::new(grid, &sampled, dt, absorbing)?;
    let mut snapshots = Vec::with_capacity(steps + 1);
    let mut absorbed = Vec::with_capacity(steps + 1);
    let mut current = grid.clone();
    snapshots.push(current.clone());
    absorbed.push(0.0);
    for _ in 0..steps {
        prop.step(&mut current)?;
        snapshots.push(current.clone());
        absorbed.push(prop.absorbed());
    }
    Ok(Propagation { dt, snapshots, absorbed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pilot::grid::{free_gaussian_width, gaussian_packet};

    fn packet_1d(samples: usize, sigma: f64, k0: f64) -> WavefunctionGrid {
        let ax = Axis::new(-60.0, 60.0, samples).unwrap();
        WavefunctionGrid::from_fn(vec![ax], 1.0, 1.0, |p| gaussian_packet(p[0], 0.0, sigma, k0)).unwrap()
    }

    #[test]
    fn zero_steps_is_identity() {
        let g = packet_1d(256, 1.0, 0.5);
        let out = propagate(&g, |_| 0.0, 0.01, 0, true).unwrap();
        assert_eq!(out.snapshots.len(), 1);
        assert_eq!(out.snapshots[0], g);
    }

    #[test]
    fn free_packet_width_matches_closed_form() {
        let g = packet_1d(2048, 1.0, 0.0);
        let out = propagate(&g, |_| 0.0, 0.02, 100, true).unwrap();
        for (step, snap) in out.snapshots.iter().enumerate().step_by(10) {
            let t = step as f64 * 0.02;
            let (_, width) = snap.moments(0);
            let want = free_gaussian_width(t, 1.0, 1.0, 1.0);
            assert!((width / want - 1.0).abs() < 1e-6, "t={t}: {width} vs {want}");
        }
    }

    #[test]
    fn norm_is_conserved() {
        let g = packet_1d(1024, 1.5, 1.0);
        let potential = |p: Point| 0.02 * p[0] * p[0];
        let out = propagate(&g, potential, 0.01, 1000, false).unwrap();
        let drift = (out.snapshots.last().unwrap().norm_sq() - g.norm_sq()).abs();
        assert!(drift < 1e-10, "drift {drift:e}");
    }

    #[test]
    fn constant_potential_is_a_global_phase() {
        let g = packet_1d(512, 1.0, 0.8);
        let v0 = 0.7;
        let (dt, steps) = (0.05, 40);
        let free = propagate(&g, |_| 0.0, dt, steps, false).unwrap();
        let shifted = propagate(&g, |_| v0, dt, steps, false).unwrap();
        let phase = Complex64::from_polar(1.0, -v0 * dt * steps as f64);
        let (a, b) = (free.snapshots.last().unwrap(), shifted.snapshots.last().unwrap());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x.norm() - y.norm()).abs() < 1e-10);
            assert!((x * phase - y).norm() < 1e-10);
        }
    }

    #[test]
    fn absorbed_probability_is_tracked() {
        // Fast packet runs into the layer.
        let g = packet_1d(1024, 2.0, 3.0);
        let out = propagate(&g, |_| 0.0, 0.05, 400, true).unwrap();
        let last = out.snapshots.last().unwrap();
        let absorbed = *out.absorbed.last().unwrap();
        assert!(absorbed > 0.5, "absorbed {absorbed}");
        assert!((last.norm_sq() + absorbed - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_aliased_potential_phase() {
        let g = packet_1d(256, 1.0, 0.0);
        assert!(matches!(propagate(&g, |_| 100.0, 0.1, 1, false), Err(PilotError::StepTooLarge(_))));
    }

    #[test]
    fn two_dimensional_free_spreading() {
        let ax = Axis::new(-20.0, 20.0, 128).unwrap();
        let ay = Axis::new(-24.0, 24.0, 128).unwrap();
        let g = WavefunctionGrid::from_fn(vec![ax, ay], 1.0, 1.0, |p| {
            gaussian_packet(p[0], 0.0, 1.0, 0.0) * gaussian_packet(p[1], 0.0, 1.5, 0.0)
        })
        .unwrap();
        let out = propagate(&g, |_| 0.0, 0.05, 40, true).unwrap();
        let last = out.snapshots.last().unwrap();
        let t = 2.0;
        assert!((last.moments(0).1 / free_gaussian_width(t, 1.0, 1.0, 1.0) - 1.0).abs() < 1e-6);
        assert!((last.moments(1).1 / free_gaussian_width(t, 1.5, 1.0, 1.0) - 1.0).abs() < 1e-6);
        assert!((last.norm_sq() - 1.0).abs() < 1e-10);
    }
}
