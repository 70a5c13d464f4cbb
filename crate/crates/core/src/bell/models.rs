//! Local hidden-variable models and a communicating quantum oracle.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chsh::{Settings, TrialRecord};
use super::BellError;
use crate::rng::{stream_id, stream_rng};

/// Error text for a quantum oracle without its communication channel.
pub const NONLOCAL_REFUSAL: &str = "nonlocal correlations require the communication channel in this framework";

pub const CORRELATION_CONVENTION: &str = "photon polarization, E(a, b) = cos 2(a - b)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LocalModelKind {
    /// Fixed outcomes `[A(a), A(a′), B(b), B(b′)]`.
    DeterministicTable { table: [i8; 4] },
    /// `λ ~ U[0, 2π)`, `A = sign cos 2(a − λ)`, `B = −sign cos 2(b − λ)`.
    SharedPhase,
    /// Samples outcome pairs with `E(a, b) =` [`quantum_correlation`].
    QuantumOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalModelSpec {
    pub kind: LocalModelKind,
    #[serde(default)]
    pub communication_allowed: bool,
}

impl LocalModelSpec {
    pub fn shared_phase() -> Self {
        Self { kind: LocalModelKind::SharedPhase, communication_allowed: false }
    }

    pub fn quantum_oracle() -> Self {
        Self { kind: LocalModelKind::QuantumOracle, communication_allowed: true }
    }

    pub fn deterministic(table: [i8; 4]) -> Self {
        Self { kind: LocalModelKind::DeterministicTable { table }, communication_allowed: false }
    }

    pub fn validate(&self) -> Result<(), BellError> {
        match &self.kind {
            LocalModelKind::DeterministicTable { table } if table.iter().any(|v| v.abs() != 1) => {
                Err(BellError::InvalidModel(format!("strategy table entries must be ±1, got {table:?}")))
            }
            LocalModelKind::QuantumOracle if !self.communication_allowed => Err(BellError::Contract(NONLOCAL_REFUSAL.into())),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            LocalModelKind::DeterministicTable { .. } => "deterministic_table",
            LocalModelKind::SharedPhase => "shared_phase",
            LocalModelKind::QuantumOracle => "quantum_oracle",
        }
    }
}

/// `cos 2(a − b)`.
pub fn quantum_correlation(a: f64, b: f64) -> f64 {
    (2.0 * (a - b)).cos()
}

fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// `trials` records for each of the four setting pairs, ordered by pair then
/// trial. Trial `t` of pair `k` uses random stream `(k, t)` of `seed`.
pub fn simulate_local_model(model: &LocalModelSpec, settings: &Settings, trials: usize, seed: u64) -> Result<Vec<TrialRecord>, BellError> {
    model.validate()?;
    if trials == 0 {
        return Err(BellError::InvalidParameter("trials must be at least 1".into()));
    }
    let pairs = settings.pairs();
    let per_pair: Vec<Vec<TrialRecord>> = (0..4)
        .map(|k| {
            let (a, b) = pairs[k];
            // Which side of the strategy table each setting selects.
            let (ia, ib) = ([0, 0, 1, 1][k], [2, 3, 2, 3][k]);
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = stream_rng(seed, stream_id(k as u64, t as u64));
                    match &model.kind {
                        LocalModelKind::DeterministicTable { table } => {
                            TrialRecord { a, b, outcome_a: table[ia], outcome_b: table[ib], hidden_var: None }
                        }
                        LocalModelKind::SharedPhase => {
                            let lambda = rng.random::<f64>() * TAU;
                            TrialRecord {
                                a,
                                b,
                                outcome_a: sign((2.0 * (a - lambda)).cos()),
                                outcome_b: -sign((2.0 * (b - lambda)).cos()),
                                hidden_var: Some(lambda),
                            }
                        }
                        LocalModelKind::QuantumOracle => {
                            let outcome_a = if rng.random::<bool>() { 1 } else { -1 };
                            let agree = rng.random::<f64>() < 0.5 * (1.0 + quantum_correlation(a, b));
                            TrialRecord { a, b, outcome_a, outcome_b: if agree { outcome_a } else { -outcome_a }, hidden_var: None }
                        }
                    }
                })
                .collect()
        })
        .collect();
    Ok(per_pair.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::chsh::chsh;

    #[test]
    fn oracle_needs_communication() {
        let m = LocalModelSpec { kind: LocalModelKind::QuantumOracle, communication_allowed: false };
        let err = simulate_local_model(&m, &Settings::optimal_photon(), 10, 0).unwrap_err();
        assert_eq!(err.to_string(), NONLOCAL_REFUSAL);
    }

    #[test]
    fn shared_phase_anticorrelates_at_equal_settings() {
        let s = Settings::from_degrees(30.0, 30.0, 30.0, 30.0);
        let recs = simulate_local_model(&LocalModelSpec::shared_phase(), &s, 1000, 5).unwrap();
        assert!(recs.iter().all(|r| r.outcome_a == -r.outcome_b));
    }

    #[test]
    fn deterministic_table_is_exact() {
        let s = Settings::from_degrees(3.0, 50.0, 17.0, 77.0);
        let recs = simulate_local_model(&LocalModelSpec::deterministic([1, -1, 1, -1]), &s, 100, 0).unwrap();
        assert_eq!(chsh(&recs, &s).unwrap().s, 2.0);
        assert!(LocalModelSpec::deterministic([1, 0, 1, 1]).validate().is_err());
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(quantum_correlation(0.4, 0.4), 1.0);
        assert!(quantum_correlation(45f64.to_radians(), 0.0).abs() < 1e-16);
        assert!((quantum_correlation(0.0, 22.5f64.to_radians()) - 0.5_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn seeded_runs_repeat() {
        let s = Settings::optimal_photon();
        let m = LocalModelSpec::quantum_oracle();
        assert_eq!(simulate_local_model(&m, &s, 500, 8).unwrap(), simulate_local_model(&m, &s, 500, 8).unwrap());
    }
}
