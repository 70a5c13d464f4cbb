//! Frequency-locked cluster detection from a recorded phase history.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::network::{order_parameter, PhaseHistory};
use super::SyncError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterOptions {
    /// Lock tolerance on the spread of a pairwise phase difference (rad).
    pub tol: f64,
    /// Length of the observation window at the end of the history.
    pub window: f64,
    /// Time discarded at the start of the history.
    pub transient: f64,
}

impl ClusterOptions {
    /// `tol = 0.1`, `window = 20/K`, `transient = 100/K`; for `K = 0` the
    /// time scale is taken as 1.
    pub fn for_coupling(coupling: f64) -> Self {
        let scale = if coupling > 0.0 { 1.0 / coupling } else { 1.0 };
        Self { tol: 0.1, window: 20.0 * scale, transient: 100.0 * scale }
    }

    /// History length needed: transient plus window.
    pub fn span(&self) -> f64 {
        self.transient + self.window
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceReport {
    /// `(t, r, Ψ)` for every recorded sample.
    pub order_parameter_trace: Vec<(f64, f64, f64)>,
    pub cluster_count: usize,
    /// Partition of oscillator indices, each cluster sorted, clusters ordered
    /// by their smallest member.
    pub cluster_members: Vec<Vec<usize>>,
    pub locked: bool,
    /// Mean `r` over the observation window.
    pub window_mean_r: f64,
}

/// Groups oscillators whose pairwise phase difference varies by less than
/// `tol` over the final `window` of the history (after `transient`), closing
/// the relation transitively.
pub fn detect_clusters(history: &PhaseHistory, options: &ClusterOptions) -> Result<CoherenceReport, SyncError> {
    if history.len() < 2 {
        return Err(SyncError::InsufficientHistory("history has fewer than two samples".into()));
    }
    if !(options.tol > 0.0) || !(options.window > 0.0) || !(options.transient >= 0.0) {
        return Err(SyncError::InvalidParameter("tol and window must be positive, transient non-negative".into()));
    }
    let t0 = history.times[0];
    let t_end = history.t_end();
    let start = t_end - options.window;
    // Small slack for accumulated rounding in the sample times.
    let slack = 1e-9 * (t_end - t0).abs().max(1.0);
    if start + slack < t0 + options.transient {
        return Err(SyncError::InsufficientHistory(format!(
            "history spans {:.3} but transient + window needs {:.3}",
            t_end - t0,
            options.span()
        )));
    }
    let first = history.times.partition_point(|&t| t < start - slack);
    let window = &history.phases[first..];
    if window.len() < 2 {
        return Err(SyncError::InsufficientHistory("window holds fewer than two samples".into()));
    }

    let n = window[0].len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if pair_spread(window, i, j) < options.tol {
                union(&mut parent, i, j);
            }
        }
    }
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = members.len();
            members.push(Vec::new());
        }
        members[slot[root]].push(i);
    }

    let trace: Vec<(f64, f64, f64)> = history
        .times
        .iter()
        .zip(&history.phases)
        .map(|(&t, p)| {
            let (r, psi) = order_parameter(p);
            (t, r, psi)
        })
        .collect();
    let window_mean_r = trace[first..].iter().map(|s| s.1).sum::<f64>() / (trace.len() - first) as f64;
    let cluster_count = members.len();
    Ok(CoherenceReport { order_parameter_trace: trace, cluster_count, cluster_members: members, locked: cluster_count == 1, window_mean_r })
}

/// Range of the continuously unwrapped difference `θ_j − θ_i` over the window.
fn pair_spread(window: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let wrap = |d: f64| (d + PI).rem_euclid(TAU) - PI;
    let mut prev = wrap(window[0][j] - window[0][i]);
    let mut value = prev;
    let (mut lo, mut hi) = (value, value);
    for sample in &window[1..] {
        let d = wrap(sample[j] - sample[i]);
        value += wrap(d - prev);
        prev = d;
        lo = lo.min(value);
        hi = hi.max(value);
    }
    hi - lo
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}
