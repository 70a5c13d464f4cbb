//! CHSH estimator and exhaustive deterministic-strategy bound.

use serde::{Deserialize, Serialize};

use super::BellError;

/// Minimum number of trials per setting pair accepted by [`chsh`].
pub const MIN_TRIALS_PER_PAIR: usize = 100;

/// Analyser angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl Settings {
    pub fn from_degrees(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        Self { a: a.to_radians(), a_prime: a_prime.to_radians(), b: b.to_radians(), b_prime: b_prime.to_radians() }
    }

    /// `(0°, 45°, 22.5°, 67.5°)`, optimal for `E = cos 2(a − b)`.
    pub fn optimal_photon() -> Self {
        Self::from_degrees(0.0, 45.0, 22.5, 67.5)
    }

    /// The four `(a, b)` pairs in the order `ab, ab′, a′b, a′b′`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [(self.a, self.b), (self.a, self.b_prime), (self.a_prime, self.b), (self.a_prime, self.b_prime)]
    }
}

pub const PAIR_LABELS: [&str; 4] = ["ab", "ab'", "a'b", "a'b'"];
/// Sign of each pair's correlation in `S`.
pub const PAIR_SIGNS: [f64; 4] = [1.0, -1.0, 1.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub a: f64,
    pub b: f64,
    pub outcome_a: i8,
    pub outcome_b: i8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_var: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub pair: &'static str,
    pub e: f64,
    /// Binomial standard error `sqrt((1 − E²)/n)`.
    pub std_error: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshResult {
    pub correlations: [Correlation; 4],
    pub s: f64,
    pub s_err: f64,
}

/// Correlations of the records whose angles equal each setting pair exactly,
/// combined as `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
pub fn chsh(records: &[TrialRecord], settings: &Settings) -> Result<ChshResult, BellError> {
    if let Some(bad) = records.iter().find(|r| r.outcome_a.abs() != 1 || r.outcome_b.abs() != 1) {
        return Err(BellError::InvalidRecord(format!("outcomes must be ±1, got ({}, {})", bad.outcome_a, bad.outcome_b)));
    }
    let pairs = settings.pairs();
    let mut sums = [0i64; 4];
    let mut counts = [0usize; 4];
    for r in records {
        // Degenerate settings (a = a′) feed every matching pair.
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if r.a == a && r.b == b {
                sums[k] += i64::from(r.outcome_a * r.outcome_b);
                counts[k] += 1;
            }
        }
    }
    let mut correlations = [Correlation { pair: "", e: 0.0, std_error: 0.0, trials: 0 }; 4];
    for k in 0..4 {
        if counts[k] < MIN_TRIALS_PER_PAIR {
            return Err(BellError::InsufficientTrials { pair: PAIR_LABELS[k], trials: counts[k], required: MIN_TRIALS_PER_PAIR });
        }
        let n = counts[k] as f64;
        let e = sums[k] as f64 / n;
        correlations[k] = Correlation { pair: PAIR_LABELS[k], e, std_error: ((1.0 - e * e).max(0.0) / n).sqrt(), trials: counts[k] };
    }
    let s = (0..4).map(|k| PAIR_SIGNS[k] * correlations[k].e).sum();
    let s_err = correlations.iter().map(|c| c.std_error.powi(2)).sum::<f64>().sqrt();
    Ok(ChshResult { correlations, s, s_err })
}

/// `S` of the deterministic strategy `[A(a), A(a′), B(b), B(b′)]`.
pub fn deterministic_s(table: [i8; 4]) -> f64 {
    let [aa, aap, bb, bbp] = table.map(f64::from);
    aa * bb - aa * bbp + aap * bb + aap * bbp
}

/// All 16 deterministic strategies.
pub fn all_strategies() -> impl Iterator<Item = [i8; 4]> {
    (0..16u8).map(|bits| std::array::from_fn(|i| if bits >> i & 1 == 1 { -1 } else { 1 }))
}

/// Largest `S` over the deterministic strategies accepted by `filter`.
/// Deterministic outcomes ignore the angles, so the result does not depend on
/// `settings`.
pub fn brute_force_lhv_max_filtered<F: Fn(&[i8; 4]) -> bool>(_settings: &Settings, filter: F) -> f64 {
    all_strategies().filter(|t| filter(t)).map(deterministic_s).fold(f64::NEG_INFINITY, f64::max)
}

pub fn brute_force_lhv_max(settings: &Settings) -> f64 {
    brute_force_lhv_max_filtered(settings, |_| true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(settings: &Settings, n: usize, f: impl Fn(usize, usize) -> (i8, i8)) -> Vec<TrialRecord> {
        let mut out = Vec::new();
        for (k, (a, b)) in settings.pairs().into_iter().enumerate() {
            for t in 0..n {
                let (oa, ob) = f(k, t);
                out.push(TrialRecord { a, b, outcome_a: oa, outcome_b: ob, hidden_var: None });
            }
        }
        out
    }

    #[test]
    fn all_plus_gives_two() {
        let s = Settings::optimal_photon();
        let r = chsh(&records(&s, 100, |_, _| (1, 1)), &s).unwrap();
        assert!(r.correlations.iter().all(|c| c.e == 1.0));
        assert_eq!(r.s, 2.0);
    }

    #[test]
    fn too_few_trials() {
        let s = Settings::optimal_photon();
        let err = chsh(&records(&s, 99, |_, _| (1, -1)), &s).unwrap_err();
        assert!(matches!(err, BellError::InsufficientTrials { trials: 99, .. }));
        let mut recs = records(&s, 200, |_, _| (1, 1));
        recs.retain(|r| r.a != s.a_prime || r.b != s.b_prime);
        assert!(matches!(chsh(&recs, &s), Err(BellError::InsufficientTrials { pair: "a'b'", trials: 0, .. })));
    }

    #[test]
    fn rejects_non_binary_outcomes() {
        let s = Settings::optimal_photon();
        let mut recs = records(&s, 100, |_, _| (1, 1));
        recs[3].outcome_b = 0;
        assert!(matches!(chsh(&recs, &s), Err(BellError::InvalidRecord(_))));
    }

    #[test]
    fn enumeration_bound_is_two() {
        let s = Settings::from_degrees(10.0, 80.0, -33.0, 5.0);
        assert_eq!(all_strategies().count(), 16);
        assert_eq!(brute_force_lhv_max(&s), 2.0);
        assert_eq!(brute_force_lhv_max_filtered(&s, |t| t[0] == t[1]), 2.0);
        assert_eq!(deterministic_s([1, 1, 1, 1]), 2.0);
        assert_eq!(deterministic_s([1, -1, 1, -1]), 2.0);
        assert!(all_strategies().all(|t| deterministic_s(t).abs() == 2.0));
    }
}
