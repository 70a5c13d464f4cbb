//! Guidance law `v = (ħ/m) Im(∇ψ/ψ)` on sampled wavefunctions.
//!
//! `∇ψ` is taken by second-order central differences at the grid nodes; both
//! `ψ` and `∇ψ` are then interpolated (linearly in 1D, bilinearly in 2D) to
//! the query point.

use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{Axis, Point, WavefunctionGrid};
use super::PilotError;

/// `|ψ|` below `NODE_FRACTION · max|ψ|` counts as a node.
pub const NODE_FRACTION: f64 = 1e-12;

/// Why a velocity could not be produced at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityFault {
    /// `|ψ|` at the point is below the node threshold.
    Node,
    /// The point is outside the region where the stencil fits on the grid.
    Outside,
}

/// Anything that can evaluate the guidance velocity at `(t, x)`.
pub trait PsiProvider: Sync {
    fn dims(&self) -> usize;
    fn velocity(&self, t: f64, x: Point) -> Result<Point, VelocityFault>;
}

/// Guidance velocity on a single grid snapshot.
pub fn guidance_velocity(grid: &WavefunctionGrid, x: Point) -> Result<Point, PilotError> {
    if !grid.contains(x) {
        return Err(PilotError::OutsideGrid { position: x });
    }
    let eps = NODE_FRACTION * grid.max_abs();
    let values = grid.values();
    stencil_velocity(grid.axes(), grid.hbar() / grid.mass(), eps, |i| values[i], x).map_err(|f| match f {
        VelocityFault::Node => PilotError::NodeProximity { position: x },
        VelocityFault::Outside => PilotError::OutsideGrid { position: x },
    })
}

/// A static snapshot guides with its own (time-independent) velocity field.
impl PsiProvider for WavefunctionGrid {
    fn dims(&self) -> usize {
        WavefunctionGrid::dims(self)
    }

    fn velocity(&self, _t: f64, x: Point) -> Result<Point, VelocityFault> {
        let values = self.values();
        stencil_velocity(self.axes(), self.hbar() / self.mass(), NODE_FRACTION * self.max_abs(), |i| values[i], x)
    }
}

/// Core evaluation against an arbitrary node-value source.
pub(crate) fn stencil_velocity<F: Fn(usize) -> Complex64>(
    axes: &[Axis],
    hbar_over_m: f64,
    eps: f64,
    value: F,
    x: Point,
) -> Result<Point, VelocityFault> {
    match axes {
        [ax] => {
            let (i, f) = locate(ax, x[0])?;
            let h2 = 2.0 * ax.spacing();
            let psi = value(i) * (1.0 - f) + value(i + 1) * f;
            let g0 = (value(i + 1) - value(i - 1)) / h2;
            let g1 = (value(i + 2) - value(i)) / h2;
            let grad = g0 * (1.0 - f) + g1 * f;
            if psi.norm() <= eps {
                return Err(VelocityFault::Node);
            }
            Ok([hbar_over_m * (grad / psi).im, 0.0])
        }
        [ax, ay] => {
            let (i, fx) = locate(ax, x[0])?;
            let (j, fy) = locate(ay, x[1])?;
            let ny = ay.samples;
            let at = |a: usize, b: usize| value(a * ny + b);
            let (hx2, hy2) = (2.0 * ax.spacing(), 2.0 * ay.spacing());
            let mut psi = Complex64::new(0.0, 0.0);
            let mut gx = Complex64::new(0.0, 0.0);
            let mut gy = Complex64::new(0.0, 0.0);
            for (a, wa) in [(i, 1.0 - fx), (i + 1, fx)] {
                for (b, wb) in [(j, 1.0 - fy), (j + 1, fy)] {
                    let w = wa * wb;
                    psi += at(a, b) * w;
                    gx += (at(a + 1, b) - at(a - 1, b)) / hx2 * w;
                    gy += (at(a, b + 1) - at(a, b - 1)) / hy2 * w;
                }
            }
            if psi.norm() <= eps {
                return Err(VelocityFault::Node);
            }
            Ok([hbar_over_m * (gx / psi).im, hbar_over_m * (gy / psi).im])
        }
        _ => unreachable!("grids are 1D or 2D"),
    }
}

/// Cell index and fractional offset, requiring one spare node on each side
/// for the central-difference stencil.
fn locate(axis: &Axis, x: f64) -> Result<(usize, f64), VelocityFault> {
    let s = (x - axis.min) / axis.spacing();
    if !(s >= 1.0 && s <= (axis.samples - 3) as f64) {
        return Err(VelocityFault::Outside);
    }
    let i = (s.floor() as usize).min(axis.samples - 3);
    Ok((i, s - i as f64))
}

/// Snapshots at uniform times `t0 + k·dt` sharing one geometry. Between
/// snapshots `ψ` is interpolated with a three-point Lagrange polynomial in time.
#[derive(Debug, Clone)]
pub struct WaveHistory {
    t0: f64,
    dt: f64,
    snapshots: Vec<Arc<WavefunctionGrid>>,
    eps: f64,
}

impl WaveHistory {
    pub fn new(t0: f64, dt: f64, snapshots: Vec<Arc<WavefunctionGrid>>) -> Result<Self, PilotError> {
        if snapshots.is_empty() {
            return Err(PilotError::InvalidParameter("history needs at least one snapshot".into()));
        }
        if snapshots.len() > 1 && !(dt > 0.0) {
            return Err(PilotError::InvalidParameter(format!("snapshot spacing must be positive, got {dt}")));
        }
        let axes = snapshots[0].axes();
        if snapshots.iter().any(|s| s.axes() != axes) {
            return Err(PilotError::InvalidParameter("snapshots must share one grid".into()));
        }
        let eps = NODE_FRACTION * snapshots.iter().map(|s| s.max_abs()).fold(0.0, f64::max);
        Ok(Self { t0, dt, snapshots, eps })
    }

    pub fn from_propagation(t0: f64, propagation: &super::Propagation) -> Result<Self, PilotError> {
        Self::new(t0, propagation.dt, propagation.snapshots.iter().cloned().map(Arc::new).collect())
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.dt * (self.snapshots.len() - 1) as f64
    }

    pub fn snapshots(&self) -> &[Arc<WavefunctionGrid>] {
        &self.snapshots
    }

    /// Lagrange weights for the (up to) three snapshots nearest `t`.
    fn weights(&self, t: f64) -> ([usize; 3], [f64; 3], usize) {
        let n = self.snapshots.len();
        if n == 1 {
            return ([0; 3], [1.0, 0.0, 0.0], 1);
        }
        let s = ((t - self.t0) / self.dt).clamp(0.0, (n - 1) as f64);
        let nearest = s.round();
        if (s - nearest).abs() < 1e-9 {
            return ([nearest as usize, 0, 0], [1.0, 0.0, 0.0], 1);
        }
        if n == 2 {
            return ([0, 1, 0], [1.0 - s, s, 0.0], 2);
        }
        let k = (s.floor() as usize).min(n - 3);
        let u = s - k as f64;
        // Nodes at u = 0, 1, 2.
        let w = [0.5 * (u - 1.0) * (u - 2.0), -u * (u - 2.0), 0.5 * u * (u - 1.0)];
        ([k, k + 1, k + 2], w, 3)
    }
}

impl PsiProvider for WaveHistory {
    fn dims(&self) -> usize {
        self.snapshots[0].dims()
    }

    fn velocity(&self, t: f64, x: Point) -> Result<Point, VelocityFault> {
        let first = &self.snapshots[0];
        let hbar_over_m = first.hbar() / first.mass();
        let (idx, w, count) = self.weights(t);
        match count {
            1 => {
                let v = self.snapshots[idx[0]].values();
                stencil_velocity(first.axes(), hbar_over_m, self.eps, |i| v[i], x)
            }
            2 => {
                let (a, b) = (self.snapshots[idx[0]].values(), self.snapshots[idx[1]].values());
                stencil_velocity(first.axes(), hbar_over_m, self.eps, |i| a[i] * w[0] + b[i] * w[1], x)
            }
            _ => {
                let (a, b, c) = (
                    self.snapshots[idx[0]].values(),
                    self.snapshots[idx[1]].values(),
                    self.snapshots[idx[2]].values(),
                );
                stencil_velocity(first.axes(), hbar_over_m, self.eps, |i| a[i] * w[0] + b[i] * w[1] + c[i] * w[2], x)
            }
        }
    }
}

/// Closed-form wavefunction given as `(ψ, ∇ψ)` at `(t, x)`.
pub struct AnalyticPsi<F> {
    dims: usize,
    hbar_over_m: f64,
    eval: F,
}

impl<F> AnalyticPsi<F>
where
    F: Fn(f64, Point) -> (Complex64, [Complex64; 2]) + Sync,
{
    pub fn new(dims: usize, hbar_over_m: f64, eval: F) -> Self {
        Self { dims, hbar_over_m, eval }
    }
}

impl<F> PsiProvider for AnalyticPsi<F>
where
    F: Fn(f64, Point) -> (Complex64, [Complex64; 2]) + Sync,
{
    fn dims(&self) -> usize {
        self.dims
    }

    fn velocity(&self, t: f64, x: Point) -> Result<Point, VelocityFault> {
        let (psi, grad) = (self.eval)(t, x);
        if psi.norm() == 0.0 || !psi.is_finite() {
            return Err(VelocityFault::Node);
        }
        Ok([self.hbar_over_m * (grad[0] / psi).im, self.hbar_over_m * (grad[1] / psi).im])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pilot::grid::gaussian_packet;

    fn plane_wave(k: f64, samples: usize, hbar: f64, mass: f64) -> WavefunctionGrid {
        let ax = Axis::new(-1.0, 11.0, samples).unwrap();
        WavefunctionGrid::from_fn(vec![ax], mass, hbar, |p| Complex64::from_polar(1.0, k * p[0])).unwrap()
    }

    #[test]
    fn plane_wave_velocity() {
        // Central differences give sin(kh)/h, so the grid must resolve kh ≪ 1.
        let (k, hbar, mass) = (1.3, 1.0, 2.0);
        let g = plane_wave(k, 1 << 17, hbar, mass);
        for x in [0.0, 0.123_456, 3.7, 9.99] {
            let v = guidance_velocity(&g, [x, 0.0]).unwrap();
            assert!((v[0] / (hbar * k / mass) - 1.0).abs() < 1e-8, "{v:?}");
        }
    }

    #[test]
    fn real_wavefunction_has_zero_velocity() {
        let ax = Axis::new(-10.0, 10.0, 512).unwrap();
        let g = WavefunctionGrid::from_fn(vec![ax], 1.0, 1.0, |p| gaussian_packet(p[0], 0.5, 1.3, 0.0)).unwrap();
        for x in [-3.0, 0.0, 0.77, 4.2] {
            assert!(guidance_velocity(&g, [x, 0.0]).unwrap()[0].abs() < 1e-10);
        }
    }

    #[test]
    fn node_of_two_slit_superposition() {
        // ψ = g(x − s) − g(x + s) vanishes at x = 0 (a node at a grid point).
        let ax = Axis::new(-16.0, 16.0, 512).unwrap();
        let g = WavefunctionGrid::from_fn(vec![ax], 1.0, 1.0, |p| {
            gaussian_packet(p[0], 3.0, 1.0, 0.0) - gaussian_packet(p[0], -3.0, 1.0, 0.0)
        })
        .unwrap();
        assert!(matches!(guidance_velocity(&g, [0.0, 0.0]), Err(PilotError::NodeProximity { .. })));
        assert!(guidance_velocity(&g, [0.5, 0.0]).is_ok());
    }

    #[test]
    fn outside_grid_is_reported() {
        let g = plane_wave(1.0, 256, 1.0, 1.0);
        assert!(matches!(guidance_velocity(&g, [20.0, 0.0]), Err(PilotError::OutsideGrid { .. })));
        // Too close to the edge for the stencil.
        assert_eq!(PsiProvider::velocity(&g, 0.0, [-0.999, 0.0]), Err(VelocityFault::Outside));
    }

    #[test]
    fn gradient_error_is_second_order() {
        let k = 2.0;
        let err = |samples: usize| {
            let g = plane_wave(k, samples, 1.0, 1.0);
            (guidance_velocity(&g, [2.0, 0.0]).unwrap()[0] - k).abs()
        };
        let ratio = err(1024) / err(2048);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn two_dimensional_plane_wave() {
        let ax = Axis::new(0.0, 10.0, 2048).unwrap();
        let ay = Axis::new(0.0, 10.0, 2048).unwrap();
        let (kx, ky) = (0.4, -0.9);
        let g = WavefunctionGrid::from_fn(vec![ax, ay], 1.0, 1.0, |p| Complex64::from_polar(1.0, kx * p[0] + ky * p[1])).unwrap();
        let v = guidance_velocity(&g, [3.3, 6.1]).unwrap();
        assert!((v[0] - kx).abs() < 1e-5 && (v[1] - ky).abs() < 1e-5, "{v:?}");
    }

    #[test]
    fn history_interpolates_between_snapshots() {
        // Node values that are quadratic in time are reproduced exactly by the
        // three-point rule.
        let ax = Axis::new(-1.0, 11.0, 4096).unwrap();
        let snaps: Vec<_> = [0.0, 0.5, 1.0]
            .iter()
            .map(|&t| {
                Arc::new(WavefunctionGrid::from_fn(vec![ax], 1.0, 1.0, |p| Complex64::new(1.0 + t * t, 0.3 * p[0] * t)).unwrap())
            })
            .collect();
        let hist = WaveHistory::new(0.0, 0.5, snaps).unwrap();
        let direct = WavefunctionGrid::from_fn(vec![ax], 1.0, 1.0, |p| Complex64::new(1.0 + 0.09, 0.3 * p[0] * 0.3)).unwrap();
        let a = hist.velocity(0.3, [4.0, 0.0]).unwrap();
        let b = PsiProvider::velocity(&direct, 0.0, [4.0, 0.0]).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-12, "{a:?} {b:?}");
    }
}
