use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{gaussian_packet, Axis, Point, WavefunctionGrid};
use super::propagate::SampledPotential;
use super::PilotError;

/// Initial state and potential of a 1D ensemble experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioKind {
    /// `e^{ikx}`; `wavenumber` is snapped to the nearest value periodic on the grid.
    PlaneWave { wavenumber: f64 },
    GaussianFree { sigma0: f64, k0: f64, x0: f64 },
    /// Two equal-phase Gaussian packets of width `sigma0` centred at `±separation/2`.
    DoubleSlit { sigma0: f64, separation: f64, k0: f64 },
    /// Gaussian packet incident on the rectangular barrier `[position, position + width]`.
    Barrier { sigma0: f64, k0: f64, x0: f64, height: f64, width: f64, position: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub grid: Axis,
    pub hbar: f64,
    pub mass: f64,
    pub dt: f64,
    pub t_final: f64,
    pub absorbing: bool,
}

impl ScenarioSpec {
    pub fn double_slit() -> Self {
        Self {
            kind: ScenarioKind::DoubleSlit { sigma0: 1.0, separation: 6.0, k0: 0.0 },
            grid: Axis { min: -60.0, max: 60.0, samples: 2048 },
            hbar: 1.0,
            mass: 1.0,
            dt: 0.05,
            t_final: 10.0,
            absorbing: true,
        }
    }

    pub fn gaussian_free() -> Self {
        Self {
            kind: ScenarioKind::GaussianFree { sigma0: 1.0, k0: 1.0, x0: -10.0 },
            grid: Axis { min: -60.0, max: 60.0, samples: 2048 },
            hbar: 1.0,
            mass: 1.0,
            dt: 0.05,
            t_final: 10.0,
            absorbing: true,
        }
    }

    pub fn plane_wave() -> Self {
        Self {
            kind: ScenarioKind::PlaneWave { wavenumber: 1.0 },
            grid: Axis { min: -20.0, max: 20.0, samples: 4096 },
            hbar: 1.0,
            mass: 1.0,
            dt: 0.05,
            t_final: 5.0,
            absorbing: false,
        }
    }

    /// Packet at `E = k₀²/2 = V₀/2` on a barrier with `κa = 1`.
    pub fn barrier() -> Self {
        Self {
            kind: ScenarioKind::Barrier { sigma0: 10.0, k0: 1.0, x0: -50.0, height: 1.0, width: 1.0, position: 0.0 },
            grid: Axis { min: -230.0, max: 179.6, samples: 8192 },
            hbar: 1.0,
            mass: 1.0,
            dt: 0.02,
            t_final: 100.0,
            absorbing: true,
        }
    }

    pub fn validate(&self) -> Result<(), PilotError> {
        Axis::new(self.grid.min, self.grid.max, self.grid.samples)?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(PilotError::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("hbar", self.hbar)?;
        positive("mass", self.mass)?;
        positive("dt", self.dt)?;
        positive("t_final", self.t_final)?;
        match self.kind {
            ScenarioKind::PlaneWave { wavenumber } => {
                if !wavenumber.is_finite() {
                    return Err(PilotError::InvalidParameter("wavenumber must be finite".into()));
                }
            }
            ScenarioKind::GaussianFree { sigma0, .. } => positive("sigma0", sigma0)?,
            ScenarioKind::DoubleSlit { sigma0, separation, .. } => {
                positive("sigma0", sigma0)?;
                positive("separation", separation)?;
            }
            ScenarioKind::Barrier { sigma0, height, width, position, .. } => {
                positive("sigma0", sigma0)?;
                if !(height >= 0.0 && height.is_finite()) {
                    return Err(PilotError::InvalidParameter(format!("barrier height must be non-negative, got {height}")));
                }
                positive("width", width)?;
                let span = self.grid.max - self.grid.min;
                let inner = (self.grid.min + 0.1 * span, self.grid.max - 0.1 * span);
                if position < inner.0 || position + width > inner.1 {
                    return Err(PilotError::InvalidParameter("barrier must lie in the grid interior".into()));
                }
            }
        }
        Ok(())
    }

    /// Plane-wave wavenumber actually used (periodic on the grid).
    pub fn effective_wavenumber(&self) -> Option<f64> {
        match self.kind {
            ScenarioKind::PlaneWave { wavenumber } => {
                let unit = std::f64::consts::TAU / (self.grid.max - self.grid.min);
                Some((wavenumber / unit).round() * unit)
            }
            _ => None,
        }
    }

    pub fn initial_grid(&self) -> Result<WavefunctionGrid, PilotError> {
        self.validate()?;
        let axes = vec![self.grid];
        let mut grid = match self.kind {
            ScenarioKind::PlaneWave { .. } => {
                let k = self.effective_wavenumber().unwrap_or_default();
                WavefunctionGrid::from_fn(axes, self.mass, self.hbar, |p| Complex64::from_polar(1.0, k * p[0]))?
            }
            ScenarioKind::GaussianFree { sigma0, k0, x0 } => {
                WavefunctionGrid::from_fn(axes, self.mass, self.hbar, |p| gaussian_packet(p[0], x0, sigma0, k0))?
            }
            ScenarioKind::DoubleSlit { sigma0, separation, k0 } => {
                let half = 0.5 * separation;
                WavefunctionGrid::from_fn(axes, self.mass, self.hbar, |p| {
                    gaussian_packet(p[0], half, sigma0, k0) + gaussian_packet(p[0], -half, sigma0, k0)
                })?
            }
            ScenarioKind::Barrier { sigma0, k0, x0, .. } => {
                WavefunctionGrid::from_fn(axes, self.mass, self.hbar, |p| gaussian_packet(p[0], x0, sigma0, k0))?
            }
        };
        grid.normalize();
        Ok(grid)
    }

    /// Potential on the grid. Barrier edges are cell-averaged so the sampled
    /// barrier carries exactly `height × width`.
    pub fn potential(&self, grid: &WavefunctionGrid) -> SampledPotential {
        match self.kind {
            ScenarioKind::Barrier { height, width, position, .. } => {
                let h = self.grid.spacing();
                SampledPotential::sample(grid, |p: Point| {
                    let (lo, hi) = (p[0] - 0.5 * h, p[0] + 0.5 * h);
                    let overlap = (hi.min(position + width) - lo.max(position)).max(0.0);
                    height * overlap / h
                })
            }
            _ => SampledPotential::zero(grid),
        }
    }

    /// Position beyond which a particle counts as transmitted.
    pub fn barrier_end(&self) -> Option<f64> {
        match self.kind {
            ScenarioKind::Barrier { width, position, .. } => Some(position + width),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            ScenarioKind::PlaneWave { .. } => "plane_wave",
            ScenarioKind::GaussianFree { .. } => "gaussian_free",
            ScenarioKind::DoubleSlit { .. } => "double_slit",
            ScenarioKind::Barrier { .. } => "barrier",
        }
    }
}

/// Plane-wave transmission through a rectangular barrier of height `v0` and
/// width `a` at energy `e`.
pub fn rectangular_barrier_transmission(e: f64, v0: f64, a: f64, hbar: f64, mass: f64) -> f64 {
    if v0 == 0.0 {
        return 1.0;
    }
    let diff = v0 - e;
    if diff.abs() < 1e-12 * v0 {
        // E = V₀ limit.
        return 1.0 / (1.0 + mass * a * a * v0 / (2.0 * hbar * hbar));
    }
    let q = (2.0 * mass * diff.abs()).sqrt() / hbar;
    let s = if diff > 0.0 { (q * a).sinh() } else { (q * a).sin() };
    1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * diff.abs()))
}

/// Transmission averaged over the momentum distribution of a Gaussian packet
/// with `|ψ|²` width `sigma_x` and mean wavenumber `k0` (positive `k` only).
pub fn packet_barrier_transmission(k0: f64, sigma_x: f64, v0: f64, a: f64, hbar: f64, mass: f64) -> f64 {
    let sigma_k = 1.0 / (2.0 * sigma_x);
    let (lo, hi) = ((k0 - 8.0 * sigma_k).max(1e-9), k0 + 8.0 * sigma_k);
    let n = 4000;
    let step = (hi - lo) / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=n {
        let k = lo + i as f64 * step;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let weight = w * (-(k - k0).powi(2) / (2.0 * sigma_k * sigma_k)).exp();
        let energy = hbar * hbar * k * k / (2.0 * mass);
        num += weight * rectangular_barrier_transmission(energy, v0, a, hbar, mass);
        den += weight;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_scenarios_validate() {
        for s in [ScenarioSpec::double_slit(), ScenarioSpec::gaussian_free(), ScenarioSpec::plane_wave(), ScenarioSpec::barrier()] {
            s.validate().unwrap();
            let g = s.initial_grid().unwrap();
            assert!((g.norm_sq() - 1.0).abs() < 1e-12, "{}", s.label());
        }
    }

    #[test]
    fn barrier_potential_has_exact_area() {
        let s = ScenarioSpec::barrier();
        let g = s.initial_grid().unwrap();
        let v = s.potential(&g);
        let area: f64 = v.0.iter().sum::<f64>() * s.grid.spacing();
        assert!((area - 1.0).abs() < 1e-9, "{area}");
    }

    #[test]
    fn plane_wave_is_periodic() {
        let s = ScenarioSpec { kind: ScenarioKind::PlaneWave { wavenumber: 1.03 }, ..ScenarioSpec::plane_wave() };
        let k = s.effective_wavenumber().unwrap();
        let periods = k * 40.0 / std::f64::consts::TAU;
        assert!((periods - periods.round()).abs() < 1e-12);
        assert!((k - 1.03).abs() < 0.08);
    }

    #[test]
    fn closed_form_transmission() {
        // E = V₀/2 and κa = 1 gives T = 1/cosh²(1).
        let t = rectangular_barrier_transmission(0.5, 1.0, 1.0, 1.0, 1.0);
        assert!((t - 0.419_974_341_614_026_069_39).abs() < 1e-14);
        assert_eq!(rectangular_barrier_transmission(0.5, 0.0, 1.0, 1.0, 1.0), 1.0);
        // Continuous through E = V₀.
        let below = rectangular_barrier_transmission(1.0 - 1e-7, 1.0, 1.0, 1.0, 1.0);
        let at = rectangular_barrier_transmission(1.0, 1.0, 1.0, 1.0, 1.0);
        let above = rectangular_barrier_transmission(1.0 + 1e-7, 1.0, 1.0, 1.0, 1.0);
        assert!((below - at).abs() < 1e-6 && (above - at).abs() < 1e-6);
    }

    #[test]
    fn narrow_bandwidth_packet_approaches_plane_wave() {
        let plane = rectangular_barrier_transmission(0.5, 1.0, 1.0, 1.0, 1.0);
        let wide = (packet_barrier_transmission(1.0, 2.0, 1.0, 1.0, 1.0, 1.0) - plane).abs();
        let narrow = (packet_barrier_transmission(1.0, 20.0, 1.0, 1.0, 1.0, 1.0) - plane).abs();
        assert!(narrow < wide / 50.0, "{narrow:e} vs {wide:e}");
    }
}
