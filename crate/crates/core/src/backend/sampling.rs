use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::error::{Error, Result};
use crate::models::Observable;

/// How a circuit's expectation value is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    #[default]
    Exact,
    Shots { shots: u64 },
}

impl EvalMode {
    /// Expectation under this mode; `stream` selects an independent
    /// deterministic sampling stream.
    pub fn estimate(&self, state: &StateVector, obs: &Observable, stream: u64) -> Result<f64> {
        match *self {
            EvalMode::Exact => super::expectation(state, obs),
            EvalMode::Shots { shots } => sample_expectation(state, obs, shots, stream),
        }
    }

    pub fn shots_per_circuit(&self) -> u64 {
        match *self {
            EvalMode::Exact => 1,
            EvalMode::Shots { shots } => shots,
        }
    }
}

/// Shot estimate of `⟨ψ|O|ψ⟩`. Each Pauli term is measured in its own
/// eigenbasis with `shots` repetitions; the number of `+1` outcomes of a
/// term with exact expectation `e` is Binomial(shots, (1 + e) / 2).
pub fn sample_expectation(state: &StateVector, obs: &Observable, shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    if obs.n_qubits() != state.n_qubits() {
        return Err(Error::QubitMismatch {
            left: state.n_qubits(),
            right: obs.n_qubits(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for (p, c) in obs.terms() {
        if p.is_identity() {
            total += c;
            continue;
        }
        let e = state.pauli_expectation(p);
        let prob = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
        let plus = Binomial::new(shots, prob)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sample(&mut rng);
        total += c * (2.0 * plus as f64 / shots as f64 - 1.0);
    }
    Ok(total)
}
