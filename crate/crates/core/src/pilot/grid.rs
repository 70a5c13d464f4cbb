use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PilotError;

/// Position in one or two dimensions; the second component is unused (and
/// kept at zero) on 1D grids.
pub type Point = [f64; 2];

pub const MIN_SAMPLES: usize = 64;

/// Uniform periodic axis: nodes `min + j·h`, `j = 0..samples`, `h = (max − min)/samples`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, samples: usize) -> Result<Self, PilotError> {
        if samples < MIN_SAMPLES {
            return Err(PilotError::InvalidGrid(format!("need at least {MIN_SAMPLES} samples per axis, got {samples}")));
        }
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(PilotError::InvalidGrid(format!("axis extent [{min}, {max}] is empty or not finite")));
        }
        Ok(Self { min, max, samples })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / self.samples as f64
    }

    pub fn coord(&self, j: usize) -> f64 {
        self.min + j as f64 * self.spacing()
    }

    pub fn length(&self) -> f64 {
        self.max - self.min
    }

    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples).map(move |j| self.coord(j))
    }

    /// Angular wavenumber of FFT bin `j` in standard FFT ordering.
    pub(crate) fn wavenumber(&self, j: usize) -> f64 {
        let n = self.samples as i64;
        let j = j as i64;
        let signed = if j <= n / 2 { j } else { j - n };
        std::f64::consts::TAU * signed as f64 / self.length()
    }
}

/// Complex wavefunction sampled on a uniform 1D or 2D grid at one instant.
///
/// 2D values are stored x-major: index `ix * ny + iy`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    axes: Vec<Axis>,
    values: Vec<Complex64>,
    mass: f64,
    hbar: f64,
    max_abs: f64,
}

impl WavefunctionGrid {
    pub fn new(axes: Vec<Axis>, values: Vec<Complex64>, mass: f64, hbar: f64) -> Result<Self, PilotError> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(PilotError::InvalidGrid(format!("grid must be 1D or 2D, got {} axes", axes.len())));
        }
        for a in &axes {
            Axis::new(a.min, a.max, a.samples)?;
        }
        let expected: usize = axes.iter().map(|a| a.samples).product();
        if values.len() != expected {
            return Err(PilotError::InvalidGrid(format!("expected {expected} values, got {}", values.len())));
        }
        if !(mass > 0.0) || !(hbar > 0.0) {
            return Err(PilotError::InvalidGrid("mass and hbar must be positive".into()));
        }
        let mut grid = Self { axes, values, mass, hbar, max_abs: 0.0 };
        let norm = grid.norm_sq();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(PilotError::InvalidGrid(format!("wavefunction norm must be finite and positive, got {norm}")));
        }
        grid.refresh();
        Ok(grid)
    }

    /// Samples `f` at every grid node.
    pub fn from_fn<F: Fn(Point) -> Complex64>(axes: Vec<Axis>, mass: f64, hbar: f64, f: F) -> Result<Self, PilotError> {
        let values = match axes.as_slice() {
            [ax] => ax.coords().map(|x| f([x, 0.0])).collect(),
            [ax, ay] => ax.coords().flat_map(|x| ay.coords().map(move |y| [x, y])).map(&f).collect(),
            _ => return Err(PilotError::InvalidGrid(format!("grid must be 1D or 2D, got {} axes", axes.len()))),
        };
        Self::new(axes, values, mass, hbar)
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub(crate) fn set_values(&mut self, values: Vec<Complex64>) {
        debug_assert_eq!(values.len(), self.values.len());
        self.values = values;
        self.refresh();
    }

    pub(crate) fn values_mut_then_refresh<F: FnOnce(&mut [Complex64])>(&mut self, f: F) {
        f(&mut self.values);
        self.refresh();
    }

    fn refresh(&mut self) {
        self.max_abs = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// `∫|ψ|²` by the rectangle rule (exact for band-limited periodic data).
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_volume()
    }

    pub fn normalize(&mut self) {
        let scale = 1.0 / self.norm_sq().sqrt();
        self.values_mut_then_refresh(|v| v.iter_mut().for_each(|z| *z *= scale));
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Node coordinates in storage order.
    pub fn node(&self, index: usize) -> Point {
        match self.axes.as_slice() {
            [ax] => [ax.coord(index), 0.0],
            [ax, ay] => [ax.coord(index / ay.samples), ay.coord(index % ay.samples)],
            _ => unreachable!(),
        }
    }

    pub fn contains(&self, x: Point) -> bool {
        self.axes.iter().enumerate().all(|(d, a)| x[d] >= a.min && x[d] <= a.max)
    }

    /// First and second moments `(⟨x⟩, std x)` of `|ψ|²` along `axis`.
    pub fn moments(&self, axis: usize) -> (f64, f64) {
        let density = self.density();
        let total: f64 = density.iter().sum();
        let (mut m1, mut m2) = (0.0, 0.0);
        for (i, p) in density.iter().enumerate() {
            let x = self.node(i)[axis];
            m1 += p * x;
            m2 += p * x * x;
        }
        m1 /= total;
        m2 /= total;
        (m1, (m2 - m1 * m1).max(0.0).sqrt())
    }

    /// `∫_{x_axis > threshold} |ψ|²`, counting the node at `threshold` half.
    pub fn probability_beyond(&self, axis: usize, threshold: f64) -> f64 {
        let vol = self.cell_volume();
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let x = self.node(i)[axis];
                let w = if x > threshold {
                    1.0
                } else if x == threshold {
                    0.5
                } else {
                    0.0
                };
                w * v.norm_sqr()
            })
            .sum::<f64>()
            * vol
    }
}

/// Normalized Gaussian packet with `|ψ|²` standard deviation `sigma`, centre
/// `x0` and mean wavenumber `k0`.
pub fn gaussian_packet(x: f64, x0: f64, sigma: f64, k0: f64) -> Complex64 {
    let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
    let d = x - x0;
    Complex64::from_polar(norm * (-d * d / (4.0 * sigma * sigma)).exp(), k0 * x)
}

/// Analytic free evolution of [`gaussian_packet`] with `x0 = 0`, returning
/// `(ψ, ∂ψ/∂x)`. With the complex width `s_t = σ₀ + iħt/(2mσ₀)`:
/// `ψ = (2π)^{-1/4} s_t^{-1/2} exp(−(x − vt)²/(4σ₀s_t) + i(k₀x − ħk₀²t/2m))`.
pub fn free_gaussian(x: f64, t: f64, sigma0: f64, k0: f64, hbar: f64, mass: f64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let st = Complex64::new(sigma0, hbar * t / (2.0 * mass * sigma0));
    let pref = (2.0 * std::f64::consts::PI).powf(-0.25) / st.sqrt();
    // Centre moves with group velocity ħk₀/m.
    let v = hbar * k0 / mass;
    let d = x - v * t;
    let phase = i * (k0 * x - hbar * k0 * k0 * t / (2.0 * mass));
    let psi = pref * (-(d * d) / (4.0 * sigma0 * st) + phase).exp();
    let dpsi = psi * (-d / (2.0 * sigma0 * st) + i * k0);
    (psi, dpsi)
}

/// Analytic `|ψ|²` width of a free Gaussian packet.
pub fn free_gaussian_width(t: f64, sigma0: f64, hbar: f64, mass: f64) -> f64 {
    sigma0 * (1.0 + (hbar * t / (2.0 * mass * sigma0 * sigma0)).powi(2)).sqrt()
}
