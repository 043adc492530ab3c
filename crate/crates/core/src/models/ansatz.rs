use std::sync::Arc;

use crate::backend::{self, Gate, StateVector};
use crate::dla::DlaBasis;
use crate::error::{Error, Result};

/// Hardware-efficient block `U_q(θ)`, optional Hadamard prelayer, then one
/// full-angle Pauli rotation per DLA basis element `U_g(φ)`.
///
/// Parameter slots `[0, p)` drive `U_q` and `[p, p + g)` drive `U_g`.
#[derive(Debug, Clone)]
pub struct HeliaAnsatz {
    n_qubits: usize,
    uq_layers: usize,
    uq_gates: Vec<Gate>,
    hadamard_prelayer: bool,
    ug_gates: Vec<Gate>,
    theta_count: usize,
    basis: Option<Arc<DlaBasis>>,
}

impl HeliaAnsatz {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn uq_layers(&self) -> usize {
        self.uq_layers
    }

    pub fn uq_gates(&self) -> &[Gate] {
        &self.uq_gates
    }

    pub fn ug_gates(&self) -> &[Gate] {
        &self.ug_gates
    }

    pub fn hadamard_prelayer(&self) -> bool {
        self.hadamard_prelayer
    }

    /// `p`
    pub fn theta_count(&self) -> usize {
        self.theta_count
    }

    /// `g`
    pub fn phi_count(&self) -> usize {
        self.ug_gates.len()
    }

    pub fn param_count(&self) -> usize {
        self.theta_count + self.phi_count()
    }

    pub fn basis(&self) -> Option<&Arc<DlaBasis>> {
        self.basis.as_ref()
    }

    pub fn prelayer_gates(&self) -> Vec<Gate> {
        if self.hadamard_prelayer {
            (0..self.n_qubits).map(|qubit| Gate::Hadamard { qubit }).collect()
        } else {
            Vec::new()
        }
    }

    /// `U_q`, prelayer and `U_g` in application order.
    pub fn full_circuit(&self) -> Vec<Gate> {
        let mut gates = self.uq_gates.clone();
        gates.extend(self.prelayer_gates());
        gates.extend(self.ug_gates.iter().cloned());
        gates
    }

    /// `U_q` followed by the prelayer: the state handed to `U_g`.
    pub fn prepare_block_state(&self, theta: &[f64], initial: &StateVector) -> Result<StateVector> {
        if theta.len() != self.theta_count {
            return Err(Error::LengthMismatch {
                expected: self.theta_count,
                actual: theta.len(),
            });
        }
        let mut s = backend::run_circuit(&self.uq_gates, theta, initial)?;
        backend::run_in_place(&self.prelayer_gates(), &[], &mut s)?;
        Ok(s)
    }

    /// Concatenates `θ` and `φ` into the full parameter vector.
    pub fn join(&self, theta: &[f64], phi: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(theta.len() + phi.len());
        v.extend_from_slice(theta);
        v.extend_from_slice(phi);
        v
    }
}

/// One YZ-linear layer: `RotY, RotZ` on every qubit, then a CNOT ladder.
pub fn yz_linear_layers(n: usize, layers: usize, first_slot: usize) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(layers * (3 * n));
    let mut slot = first_slot;
    for _ in 0..layers {
        for qubit in 0..n {
            gates.push(Gate::RotY { qubit, slot });
            gates.push(Gate::RotZ { qubit, slot: slot + 1 });
            slot += 2;
        }
        for q in 0..n.saturating_sub(1) {
            gates.push(Gate::Cnot {
                control: q,
                target: q + 1,
            });
        }
    }
    gates
}

pub fn build_helia(
    n: usize,
    uq_layers: usize,
    basis: Option<Arc<DlaBasis>>,
    hadamard_prelayer: bool,
) -> Result<HeliaAnsatz> {
    if let Some(b) = &basis {
        if b.n_qubits() != n {
            return Err(Error::QubitMismatch {
                left: n,
                right: b.n_qubits(),
            });
        }
    }
    let uq_gates = yz_linear_layers(n, uq_layers, 0);
    let theta_count = 2 * n * uq_layers;
    let ug_gates = basis
        .as_ref()
        .map(|b| {
            b.elements()
                .iter()
                .enumerate()
                .map(|(i, p)| Gate::PauliRotation {
                    generator: p.clone(),
                    slot: theta_count + i,
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(HeliaAnsatz {
        n_qubits: n,
        uq_layers,
        uq_gates,
        hadamard_prelayer,
        ug_gates,
        theta_count,
        basis,
    })
}
