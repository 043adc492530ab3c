//! Classical simulation of the DLA block: the observable is tracked as a
//! coefficient vector over the DLA basis and conjugated gate by gate.

use std::sync::Arc;

use crate::backend::{EvalMode, StateVector};
use crate::dla::{DlaBasis, RotationPlan};
use crate::error::{Error, Result};
use crate::models::Observable;
use crate::pauli::PauliString;

/// Observable coefficients over the unnormalized basis strings.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    pub basis: Arc<DlaBasis>,
    pub values: Vec<f64>,
}

/// Entry `m` is `⟨ψ|P_m|ψ⟩` for basis string `P_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationVector {
    pub basis: Arc<DlaBasis>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `O ↦ U_g† O U_g`
    Forward,
    /// `O ↦ U_g O U_g†`
    Reverse,
}

impl CoeffVector {
    pub fn zeros(basis: Arc<DlaBasis>) -> Self {
        let values = vec![0.0; basis.dim()];
        Self { basis, values }
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Back to an observable, dropping exact zeros.
    pub fn to_observable(&self) -> Observable {
        let mut obs = Observable::new(self.basis.n_qubits());
        for (p, &c) in self.basis.elements().iter().zip(&self.values) {
            if c != 0.0 {
                obs.add_term(p.clone(), c).expect("basis strings are Hermitian");
            }
        }
        obs
    }
}

fn same_basis(a: &Arc<DlaBasis>, b: &Arc<DlaBasis>) -> bool {
    Arc::ptr_eq(a, b) || a.elements() == b.elements()
}

fn check_plans(basis: &DlaBasis, params: &[f64], plans: &[RotationPlan]) -> Result<()> {
    if params.len() != plans.len() {
        return Err(Error::LengthMismatch {
            expected: plans.len(),
            actual: params.len(),
        });
    }
    if let Some(bad) = params.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite parameter {bad}")));
    }
    for p in plans {
        if p.generator >= basis.dim() {
            return Err(Error::IndexOutOfRange {
                index: p.generator,
                dim: basis.dim(),
            });
        }
    }
    Ok(())
}

pub fn project_observable(obs: &Observable, basis: &Arc<DlaBasis>) -> Result<CoeffVector> {
    if obs.n_qubits() != basis.n_qubits() {
        return Err(Error::QubitMismatch {
            left: obs.n_qubits(),
            right: basis.n_qubits(),
        });
    }
    let mut out = CoeffVector::zeros(basis.clone());
    let mut outside: Vec<PauliString> = Vec::new();
    for (p, c) in obs.terms() {
        match basis.index_of(p) {
            Some(i) => out.values[i] = *c,
            None => outside.push(p.clone()),
        }
    }
    if outside.is_empty() {
        Ok(out)
    } else {
        Err(Error::TermOutsideDla(outside))
    }
}

/// Conjugates `coeffs` through `U_g = G_{g-1} ⋯ G_0`, `G_m = exp(-iφ_m P)`.
/// Forward applies the innermost gate `G_{g-1}` first.
pub fn heisenberg_evolve(
    coeffs: &CoeffVector,
    params: &[f64],
    plans: &[RotationPlan],
    direction: Direction,
) -> Result<CoeffVector> {
    check_plans(&coeffs.basis, params, plans)?;
    let mut out = coeffs.clone();
    match direction {
        Direction::Forward => {
            for (plan, &phi) in plans.iter().zip(params).rev() {
                plan.conjugate(phi, &mut out.values);
            }
        }
        Direction::Reverse => {
            for (plan, &phi) in plans.iter().zip(params) {
                plan.conjugate_transpose(phi, &mut out.values);
            }
        }
    }
    Ok(out)
}

pub fn gsim_cost(evolved: &CoeffVector, measured: &ExpectationVector) -> Result<f64> {
    if !same_basis(&evolved.basis, &measured.basis) {
        return Err(Error::InvalidArgument("coefficient and expectation bases differ".into()));
    }
    Ok(evolved
        .values
        .iter()
        .zip(&measured.values)
        .map(|(a, o)| a * o)
        .sum())
}

/// Cost and `∂C/∂φ` by one forward and one reverse sweep over the plans.
pub fn gsim_value_and_gradient(
    coeffs: &CoeffVector,
    params: &[f64],
    plans: &[RotationPlan],
    measured: &ExpectationVector,
) -> Result<(f64, Vec<f64>)> {
    let evolved = heisenberg_evolve(coeffs, params, plans, Direction::Forward)?;
    let value = gsim_cost(&evolved, measured)?;
    let mut v = evolved.values;
    let mut lambda = measured.values.clone();
    let mut scratch = vec![0.0; v.len()];
    let mut grad = Vec::with_capacity(params.len());
    for (plan, &phi) in plans.iter().zip(params) {
        plan.conjugate_transpose(phi, &mut v);
        plan.conjugate_derivative(phi, &v, &mut scratch);
        grad.push(
            plan.pairs
                .iter()
                .map(|p| lambda[p.first] * scratch[p.first] + lambda[p.second] * scratch[p.second])
                .sum(),
        );
        plan.conjugate_transpose(phi, &mut lambda);
    }
    Ok((value, grad))
}

pub fn gsim_gradient(
    coeffs: &CoeffVector,
    params: &[f64],
    plans: &[RotationPlan],
    measured: &ExpectationVector,
) -> Result<Vec<f64>> {
    gsim_value_and_gradient(coeffs, params, plans, measured).map(|(_, g)| g)
}

/// Expectations of every basis string. Under shot sampling, string `m`
/// draws from stream `stream_base + m`.
pub fn measure_dla_expectations(
    state: &StateVector,
    basis: &Arc<DlaBasis>,
    mode: EvalMode,
    stream_base: u64,
) -> Result<ExpectationVector> {
    if state.n_qubits() != basis.n_qubits() {
        return Err(Error::QubitMismatch {
            left: state.n_qubits(),
            right: basis.n_qubits(),
        });
    }
    let values = match mode {
        EvalMode::Exact => basis.elements().iter().map(|p| state.pauli_expectation(p)).collect(),
        EvalMode::Shots { .. } => basis
            .elements()
            .iter()
            .enumerate()
            .map(|(m, p)| {
                let obs = Observable::from_terms(state.n_qubits(), [(p.clone(), 1.0)])?;
                mode.estimate(state, &obs, stream_base.wrapping_add(m as u64))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(ExpectationVector {
        basis: basis.clone(),
        values,
    })
}

/// `Σ_i |Tr[B_i† O]|²` over the normalized basis `B_i = P_i / √2ⁿ`.
/// Terms of `O` outside the basis contribute nothing.
pub fn observable_purity(obs: &Observable, basis: &DlaBasis) -> Result<f64> {
    if obs.n_qubits() != basis.n_qubits() {
        return Err(Error::QubitMismatch {
            left: obs.n_qubits(),
            right: basis.n_qubits(),
        });
    }
    let scale = 2f64.powi(basis.n_qubits() as i32);
    Ok(obs
        .terms()
        .filter(|(p, _)| basis.index_of(p).is_some())
        .map(|(_, c)| scale * c * c)
        .sum())
}

/// Purity of `|ψ⟩⟨ψ|`: `Σ_m ⟨P_m⟩² / 2ⁿ`.
pub fn expectation_purity(measured: &ExpectationVector) -> f64 {
    let scale = 2f64.powi(measured.basis.n_qubits() as i32);
    measured.values.iter().map(|o| o * o).sum::<f64>() / scale
}

pub fn state_purity(state: &StateVector, basis: &Arc<DlaBasis>) -> Result<f64> {
    measure_dla_expectations(state, basis, EvalMode::Exact, 0).map(|e| expectation_purity(&e))
}
