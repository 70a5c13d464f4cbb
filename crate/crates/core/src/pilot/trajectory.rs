//! Classical RK4 integration of `dx/dt = v(t, x)` with step halving near nodes.

use serde::Serialize;

use super::grid::Point;
use super::guidance::{PsiProvider, VelocityFault};
use super::PilotError;

/// Maximum number of successive halvings of the nominal step (`dt_min = dt/2¹⁰`).
pub const MAX_HALVINGS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorOptions {
    /// Speed above which a nominal step is split. A substep at depth `d`
    /// tolerates speeds up to `v_cap · 2^d`, i.e. the same displacement.
    pub v_cap: f64,
    pub max_halvings: u32,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { v_cap: f64::INFINITY, max_halvings: MAX_HALVINGS }
    }
}

impl IntegratorOptions {
    /// Limits a nominal step to `cells` grid spacings of travel.
    pub fn for_grid(spacing: f64, dt: f64, cells: f64) -> Self {
        Self { v_cap: cells * spacing / dt, max_halvings: MAX_HALVINGS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Complete,
    /// Left the region covered by the wavefunction grid.
    Exited,
    /// Step underflow near a node.
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub dims: usize,
    pub times: Vec<f64>,
    pub positions: Vec<Point>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn start(dims: usize, t0: f64, x0: Point) -> Self {
        Self { dims, times: vec![t0], positions: vec![x0], status: TrajectoryStatus::Complete }
    }

    pub fn last_position(&self) -> Point {
        *self.positions.last().expect("trajectory has at least its start point")
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least its start point")
    }

    pub(crate) fn push(&mut self, t: f64, x: Point) {
        self.times.push(t);
        self.positions.push(x);
    }
}

/// Outcome of a failed nominal step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepFailure {
    Exited,
    Underflow,
}

/// Advances `x` from `t` to `t + dt`, recursively halving the step while a
/// stage hits a node or exceeds the speed cap.
pub fn rk4_advance<P: PsiProvider + ?Sized>(
    provider: &P,
    t: f64,
    x: Point,
    dt: f64,
    options: &IntegratorOptions,
) -> Result<Point, StepFailure> {
    advance(provider, t, x, dt, dt * options.v_cap, 0, options)
}

fn advance<P: PsiProvider + ?Sized>(
    provider: &P,
    t: f64,
    x: Point,
    h: f64,
    max_travel: f64,
    depth: u32,
    options: &IntegratorOptions,
) -> Result<Point, StepFailure> {
    match rk4_stage(provider, t, x, h, max_travel) {
        Ok(next) => Ok(next),
        Err(StageFault::Outside) => Err(StepFailure::Exited),
        Err(StageFault::Refine) if depth < options.max_halvings => {
            let half = 0.5 * h;
            let mid = advance(provider, t, x, half, max_travel, depth + 1, options)?;
            advance(provider, t + half, mid, half, max_travel, depth + 1, options)
        }
        Err(StageFault::Refine) => Err(StepFailure::Underflow),
    }
}

enum StageFault {
    Outside,
    Refine,
}

fn rk4_stage<P: PsiProvider + ?Sized>(provider: &P, t: f64, x: Point, h: f64, max_travel: f64) -> Result<Point, StageFault> {
    let eval = |tt: f64, xx: Point| -> Result<Point, StageFault> {
        let v = provider.velocity(tt, xx).map_err(|f| match f {
            VelocityFault::Node => StageFault::Refine,
            VelocityFault::Outside => StageFault::Outside,
        })?;
        if v[0].hypot(v[1]) * h > max_travel {
            return Err(StageFault::Refine);
        }
        Ok(v)
    };
    let offset = |k: Point, s: f64| [x[0] + s * k[0], x[1] + s * k[1]];
    let k1 = eval(t, x)?;
    let k2 = eval(t + 0.5 * h, offset(k1, 0.5 * h))?;
    let k3 = eval(t + 0.5 * h, offset(k2, 0.5 * h))?;
    let k4 = eval(t + h, offset(k3, h))?;
    let sixth = h / 6.0;
    Ok([
        x[0] + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        x[1] + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ])
}

/// Integrates one trajectory over `t_span` with nominal step `dt` (shortened
/// uniformly so the span is covered exactly). Leaving the grid ends the path
/// with status [`TrajectoryStatus::Exited`]; step underflow near a node is an
/// error carrying the partial path.
pub fn integrate_trajectory<P: PsiProvider + ?Sized>(
    provider: &P,
    x0: Point,
    t_span: (f64, f64),
    dt: f64,
    options: &IntegratorOptions,
) -> Result<Trajectory, PilotError> {
    let (t0, t1) = t_span;
    if !(dt > 0.0) || !(t1 >= t0) {
        return Err(PilotError::InvalidParameter(format!("need dt > 0 and t1 ≥ t0 (dt = {dt}, span = {t_span:?})")));
    }
    let steps = ((t1 - t0) / dt - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { (t1 - t0) / steps as f64 };
    let mut path = Trajectory::start(provider.dims(), t0, x0);
    let mut x = x0;
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        match rk4_advance(provider, t, x, h, options) {
            Ok(next) => {
                x = next;
                path.push(t0 + (k + 1) as f64 * h, x);
            }
            Err(StepFailure::Exited) => {
                path.status = TrajectoryStatus::Exited;
                return Ok(path);
            }
            Err(StepFailure::Underflow) => {
                path.status = TrajectoryStatus::Aborted;
                return Err(PilotError::TrajectoryAbort { time: t, partial: Box::new(path) });
            }
        }
    }
    Ok(path)
}
