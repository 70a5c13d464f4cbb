//! Phase-oscillator networks with distance-dependent pairwise coupling.
//!
//! ```text
//! dθ_i/dt = ω_i + Σ_{j≠i} K·kernel(r_ij)·sin(θ_j − θ_i)
//! ```

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::SyncError;

/// Largest phase change per step tolerated by [`OscillatorNetwork::step`].
pub const MAX_PHASE_STEP: f64 = 0.1;

/// Radial coupling profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Kernel {
    /// `1/r`, the envelope of the far-field carrier.
    #[default]
    InverseR,
    Uniform,
    /// Piecewise-linear in `r`, held constant beyond the table ends.
    Table { radii: Vec<f64>, values: Vec<f64> },
    /// `sin(k_r r)/r`. Couplings can be negative.
    Signed { k_r: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<(), SyncError> {
        match self {
            Kernel::Table { radii, values } => {
                if radii.is_empty() || radii.len() != values.len() {
                    return Err(SyncError::InvalidNetwork("kernel table needs matching, non-empty radii and values".into()));
                }
                if radii.windows(2).any(|w| !(w[1] > w[0])) || radii.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(SyncError::InvalidNetwork("kernel table radii must be finite and strictly increasing".into()));
                }
            }
            Kernel::Signed { k_r } if !(*k_r > 0.0 && k_r.is_finite()) => {
                return Err(SyncError::InvalidNetwork(format!("signed kernel needs k_r > 0, got {k_r}")));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Kernel::InverseR => 1.0 / r,
            Kernel::Uniform => 1.0,
            Kernel::Table { radii, values } => {
                let i = radii.partition_point(|&x| x <= r);
                if i == 0 {
                    values[0]
                } else if i == radii.len() {
                    values[i - 1]
                } else {
                    let f = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
                    values[i - 1] + f * (values[i] - values[i - 1])
                }
            }
            Kernel::Signed { k_r } => (k_r * r).sin() / r,
        }
    }
}

/// Euclidean distance with the squared components summed in ascending order,
/// so the result is bitwise invariant under axis permutations and reflections.
pub fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut sq = [(a[0] - b[0]).powi(2), (a[1] - b[1]).powi(2), (a[2] - b[2]).powi(2)];
    sq.sort_by(f64::total_cmp);
    (sq[0] + sq[1] + sq[2]).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorNetwork {
    positions: Vec<[f64; 3]>,
    natural_freqs: Vec<f64>,
    phases: Vec<f64>,
    coupling: f64,
    kernel: Kernel,
    /// `K·kernel(r_ij)`, row-major, zero diagonal.
    weights: Vec<f64>,
    time: f64,
}

impl OscillatorNetwork {
    pub fn new(
        positions: Vec<[f64; 3]>,
        natural_freqs: Vec<f64>,
        phases: Vec<f64>,
        coupling: f64,
        kernel: Kernel,
    ) -> Result<Self, SyncError> {
        let n = positions.len();
        if n < 2 {
            return Err(SyncError::InvalidNetwork(format!("need at least 2 oscillators, got {n}")));
        }
        if natural_freqs.len() != n || phases.len() != n {
            return Err(SyncError::InvalidNetwork("positions, frequencies and phases must have equal length".into()));
        }
        if !(coupling >= 0.0 && coupling.is_finite()) {
            return Err(SyncError::InvalidNetwork(format!("coupling must be non-negative, got {coupling}")));
        }
        if positions.iter().flatten().chain(&natural_freqs).chain(&phases).any(|v| !v.is_finite()) {
            return Err(SyncError::InvalidNetwork("positions, frequencies and phases must be finite".into()));
        }
        kernel.validate()?;
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let r = distance(positions[i], positions[j]);
                if !(r > 0.0) {
                    return Err(SyncError::InvalidNetwork(format!("oscillators {i} and {j} coincide")));
                }
                let w = coupling * kernel.eval(r);
                weights[i * n + j] = w;
                weights[j * n + i] = w;
            }
        }
        let phases = phases.into_iter().map(|p| p.rem_euclid(TAU)).collect();
        Ok(Self { positions, natural_freqs, phases, coupling, kernel, weights, time: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn natural_freqs(&self) -> &[f64] {
        &self.natural_freqs
    }

    /// Phases in `[0, 2π)`.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Effective pair coupling `K·kernel(r_ij)`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.len() + j]
    }

    /// Mean pairwise distance.
    pub fn mean_distance(&self) -> f64 {
        mean_pairwise_distance(&self.positions)
    }

    /// Upper bound on `|dθ_i/dt|` over all phase configurations.
    pub fn max_rate_bound(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| self.natural_freqs[i].abs() + self.weights[i * n..(i + 1) * n].iter().map(|w| w.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn derivative(&self, phases: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let row = &self.weights[i * n..(i + 1) * n];
            let mut acc = self.natural_freqs[i];
            for j in 0..n {
                if j != i {
                    acc += row[j] * (phases[j] - phases[i]).sin();
                }
            }
            out[i] = acc;
        }
    }

    /// `V = −Σ_{i<j} K_ij cos(θ_j − θ_i)`; non-increasing when all `ω_i` are equal.
    pub fn potential(&self) -> f64 {
        let n = self.len();
        let mut v = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                v -= self.weights[i * n + j] * (self.phases[j] - self.phases[i]).cos();
            }
        }
        v
    }

    /// One classical RK4 step. Fails without modifying the network if
    /// `dt·max|dθ/dt|` at the current state reaches [`MAX_PHASE_STEP`].
    pub fn step(&mut self, dt: f64) -> Result<(), SyncError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SyncError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let n = self.len();
        let mut k1 = vec![0.0; n];
        self.derivative(&self.phases, &mut k1);
        let rate = k1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if dt * rate >= MAX_PHASE_STEP {
            return Err(SyncError::StepTooLarge { dt, max_rate: rate });
        }
        let mut tmp = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let stage = |tmp: &mut [f64], k: &[f64], s: f64| {
            for i in 0..n {
                tmp[i] = self.phases[i] + s * k[i];
            }
        };
        stage(&mut tmp, &k1, 0.5 * dt);
        self.derivative(&tmp, &mut k2);
        stage(&mut tmp, &k2, 0.5 * dt);
        self.derivative(&tmp, &mut k3);
        stage(&mut tmp, &k3, dt);
        self.derivative(&tmp, &mut k4);
        let sixth = dt / 6.0;
        for i in 0..n {
            let next = self.phases[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            self.phases[i] = next.rem_euclid(TAU);
        }
        self.time += dt;
        Ok(())
    }
}

pub fn mean_pairwise_distance(positions: &[[f64; 3]]) -> f64 {
    let n = positions.len();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            total += distance(positions[i], positions[j]);
            pairs += 1;
        }
    }
    total / pairs as f64
}

/// Kuramoto order parameter `(r, Ψ)` with `r e^{iΨ} = (1/N) Σ e^{iθ_j}` and
/// `Ψ ∈ [0, 2π)`. `r` is clamped to `[0, 1]`.
pub fn order_parameter(phases: &[f64]) -> (f64, f64) {
    let n = phases.len() as f64;
    let (s, c) = phases.iter().fold((0.0, 0.0), |(s, c), p| {
        let (ps, pc) = p.sin_cos();
        (s + ps, c + pc)
    });
    let (s, c) = (s / n, c / n);
    let r = s.hypot(c).min(1.0);
    let psi = s.atan2(c).rem_euclid(TAU);
    (r, if psi >= TAU { 0.0 } else { psi })
}

/// Wrapped phases sampled at uniform intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseHistory {
    pub times: Vec<f64>,
    pub phases: Vec<Vec<f64>>,
}

impl PhaseHistory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(f64::NAN)
    }
}

/// Integrates `network` to `t_final` with steps of at most `dt`, recording the
/// phases every `record_every` steps (and at the end). The record interval must
/// stay short enough that no pairwise phase difference moves by π between
/// samples; with the step guard this holds for `record_every ≤ 15`.
pub fn simulate(network: &mut OscillatorNetwork, dt: f64, t_final: f64, record_every: usize) -> Result<PhaseHistory, SyncError> {
    if !(t_final >= 0.0 && t_final.is_finite()) || record_every == 0 {
        return Err(SyncError::InvalidParameter(format!(
            "need t_final ≥ 0 and record_every ≥ 1 (got {t_final}, {record_every})"
        )));
    }
    if record_every > 15 {
        return Err(SyncError::InvalidParameter(format!("record_every must be at most 15, got {record_every}")));
    }
    let steps = (t_final / dt - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { dt } else { t_final / steps as f64 };
    let t0 = network.time();
    let mut history = PhaseHistory { times: vec![t0], phases: vec![network.phases().to_vec()] };
    for s in 1..=steps {
        network.step(h)?;
        if s % record_every == 0 || s == steps {
            history.times.push(t0 + s as f64 * h);
            history.phases.push(network.phases().to_vec());
        }
    }
    Ok(history)
}

/// Step size for `network` that keeps `dt·max|dθ/dt|` at `safety ×`
/// [`MAX_PHASE_STEP`] for every phase configuration.
pub fn safe_step(network: &OscillatorNetwork, safety: f64) -> f64 {
    let bound = network.max_rate_bound();
    if bound > 0.0 {
        safety * MAX_PHASE_STEP / bound
    } else {
        1.0
    }
}
