//! Exact statevector simulator used in place of quantum hardware.
//!
//! Amplitude index bit `n-1-q` belongs to qubit `q`, so qubit 0 is the most
//! significant bit, matching the leftmost character of a Pauli string.

mod lanczos;
mod sampling;

pub use lanczos::{ground_state, ground_state_with, LanczosOptions, GROUND_STATE_QUBIT_BOUND};
pub use sampling::{sample_expectation, EvalMode};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Observable;
use crate::pauli::{i_pow, Pauli, PauliString};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Wraps raw amplitudes, normalizing them. Fails on a zero vector or a
    /// length that is not a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let mut s = Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        };
        let norm = s.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("state has zero norm".into()));
        }
        s.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::TargetOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn apply_1q(&mut self, qubit: usize, m: [[Complex64; 2]; 2]) {
        let bit = self.bit(qubit);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (self.bit(control), self.bit(target));
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    /// `P|ψ⟩` as a new amplitude vector.
    pub fn pauli_action(&self, p: &PauliString) -> Vec<Complex64> {
        let (xm, zm) = p.amplitude_masks();
        let base = i_pow(((p.phase_power() as u32 + p.y_count()) % 4) as u8);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let v = base * a;
            out[b ^ xm] = if (zm & b).count_ones() & 1 == 1 { -v } else { v };
        }
        out
    }

    /// `exp(-iθP)|ψ⟩ = cos θ |ψ⟩ - i sin θ P|ψ⟩`, in place.
    fn apply_pauli_rotation(&mut self, p: &PauliString, theta: f64) {
        let (xm, zm) = p.amplitude_masks();
        let base = i_pow(((p.phase_power() as u32 + p.y_count()) % 4) as u8);
        let (s, c) = theta.sin_cos();
        // -i sin θ · base
        let k = Complex64::new(0.0, -s) * base;
        let phase = |b: usize| if (zm & b).count_ones() & 1 == 1 { -k } else { k };
        if xm == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a *= Complex64::new(c, 0.0) + phase(b);
            }
            return;
        }
        let top = 1usize << (usize::BITS - 1 - xm.leading_zeros());
        for b in 0..self.amps.len() {
            if b & top != 0 {
                continue;
            }
            let bx = b ^ xm;
            let (a0, a1) = (self.amps[b], self.amps[bx]);
            self.amps[bx] = a1 * c + phase(b) * a0;
            self.amps[b] = a0 * c + phase(bx) * a1;
        }
    }

    /// `⟨ψ|P|ψ⟩` for a single Pauli string (real part; exact for Hermitian P).
    pub fn pauli_expectation(&self, p: &PauliString) -> f64 {
        let (xm, zm) = p.amplitude_masks();
        let base = i_pow(((p.phase_power() as u32 + p.y_count()) % 4) as u8);
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in self.amps.iter().enumerate() {
            let t = self.amps[b ^ xm].conj() * a;
            if (zm & b).count_ones() & 1 == 1 {
                acc -= t;
            } else {
                acc += t;
            }
        }
        (base * acc).re
    }

    /// `O|ψ⟩` as a new amplitude vector.
    pub fn observable_action(&self, obs: &Observable) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (p, c) in obs.terms() {
            let (xm, zm) = p.amplitude_masks();
            let base = i_pow((p.y_count() % 4) as u8) * *c;
            for (b, a) in self.amps.iter().enumerate() {
                let v = base * a;
                out[b ^ xm] += if (zm & b).count_ones() & 1 == 1 { -v } else { v };
            }
        }
        out
    }
}

/// Gate kinds of the circuit model. Rotations carry the index of the
/// parameter that drives them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    /// `exp(-iθY/2)`
    RotY { qubit: usize, slot: usize },
    /// `exp(-iθZ/2)`
    RotZ { qubit: usize, slot: usize },
    Hadamard { qubit: usize },
    Cnot { control: usize, target: usize },
    /// `exp(-iθP)` (full angle)
    PauliRotation {
        #[serde(with = "pauli_text")]
        generator: PauliString,
        slot: usize,
    },
}

mod pauli_text {
    use crate::pauli::PauliString;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &PauliString, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&p.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<PauliString, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Gate {
    pub fn param_slot(&self) -> Option<usize> {
        match self {
            Gate::RotY { slot, .. } | Gate::RotZ { slot, .. } | Gate::PauliRotation { slot, .. } => {
                Some(*slot)
            }
            Gate::Hadamard { .. } | Gate::Cnot { .. } => None,
        }
    }

    /// Half-width `r` of the generator spectrum `{±r}`: 1/2 for the
    /// half-angle rotations, 1 for Pauli rotations.
    pub fn generator_radius(&self) -> Option<f64> {
        match self {
            Gate::RotY { .. } | Gate::RotZ { .. } => Some(0.5),
            Gate::PauliRotation { .. } => Some(1.0),
            _ => None,
        }
    }

    /// The gate generator `A` with `gate = exp(-iθA)` applied to a state.
    fn generator_action(&self, state: &StateVector) -> Option<Vec<Complex64>> {
        let n = state.n_qubits;
        let (p, scale) = match self {
            Gate::RotY { qubit, .. } => (PauliString::single(n, *qubit, Pauli::Y), 0.5),
            Gate::RotZ { qubit, .. } => (PauliString::single(n, *qubit, Pauli::Z), 0.5),
            Gate::PauliRotation { generator, .. } => (generator.clone(), 1.0),
            _ => return None,
        };
        let mut v = state.pauli_action(&p);
        if scale != 1.0 {
            v.iter_mut().for_each(|a| *a *= scale);
        }
        Some(v)
    }
}

/// Applies `gate` at `angle` (ignored for fixed gates).
pub fn apply_gate(state: &mut StateVector, gate: &Gate, angle: f64) -> Result<()> {
    match gate {
        Gate::RotY { qubit, .. } => {
            state.check_qubit(*qubit)?;
            let (s, c) = (angle / 2.0).sin_cos();
            let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
            state.apply_1q(*qubit, [[c, -s], [s, c]]);
        }
        Gate::RotZ { qubit, .. } => {
            state.check_qubit(*qubit)?;
            let z = Complex64::new(0.0, 0.0);
            let e = Complex64::from_polar(1.0, -angle / 2.0);
            state.apply_1q(*qubit, [[e, z], [z, e.conj()]]);
        }
        Gate::Hadamard { qubit } => {
            state.check_qubit(*qubit)?;
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            state.apply_1q(*qubit, [[h, h], [h, -h]]);
        }
        Gate::Cnot { control, target } => {
            state.check_qubit(*control)?;
            state.check_qubit(*target)?;
            if control == target {
                return Err(Error::InvalidArgument("CNOT control equals target".into()));
            }
            state.apply_cnot(*control, *target);
        }
        Gate::PauliRotation { generator, .. } => {
            if generator.n_qubits() != state.n_qubits {
                return Err(Error::QubitMismatch {
                    left: state.n_qubits,
                    right: generator.n_qubits(),
                });
            }
            state.apply_pauli_rotation(generator, angle);
        }
    }
    Ok(())
}

fn angle_for(gate: &Gate, params: &[f64]) -> Result<f64> {
    match gate.param_slot() {
        None => Ok(0.0),
        Some(slot) => params.get(slot).copied().ok_or(Error::UnresolvedSlot {
            slot,
            len: params.len(),
        }),
    }
}

/// Applies `gates` left to right, each rotation reading its angle from
/// `params[slot]`.
pub fn run_circuit(gates: &[Gate], params: &[f64], initial: &StateVector) -> Result<StateVector> {
    let mut state = initial.clone();
    run_in_place(gates, params, &mut state)?;
    Ok(state)
}

pub fn run_in_place(gates: &[Gate], params: &[f64], state: &mut StateVector) -> Result<()> {
    for g in gates {
        apply_gate(state, g, angle_for(g, params)?)?;
    }
    Ok(())
}

/// Applies the inverse of `gates`: reversed order, negated angles.
pub fn run_inverse_in_place(gates: &[Gate], params: &[f64], state: &mut StateVector) -> Result<()> {
    for g in gates.iter().rev() {
        apply_gate(state, g, -angle_for(g, params)?)?;
    }
    Ok(())
}

/// Exact `⟨ψ|O|ψ⟩`.
pub fn expectation(state: &StateVector, obs: &Observable) -> Result<f64> {
    if obs.n_qubits() != state.n_qubits {
        return Err(Error::QubitMismatch {
            left: state.n_qubits,
            right: obs.n_qubits(),
        });
    }
    Ok(obs
        .terms()
        .map(|(p, c)| c * state.pauli_expectation(p))
        .sum())
}

/// Gradient of `⟨0|U†(θ) O U(θ)|0⟩` with respect to every parameter slot by
/// reverse accumulation through the statevector. Values equal the
/// parameter-shift gradient; this is a simulator shortcut and does not
/// model any hardware procedure.
pub fn adjoint_gradient(
    gates: &[Gate],
    params: &[f64],
    obs: &Observable,
    initial: &StateVector,
) -> Result<(f64, Vec<f64>)> {
    let mut psi = run_circuit(gates, params, initial)?;
    let value = expectation(&psi, obs)?;
    let mut lambda = StateVector {
        n_qubits: psi.n_qubits,
        amps: psi.observable_action(obs),
    };
    let mut grad = vec![0.0; params.len()];
    for g in gates.iter().rev() {
        let angle = angle_for(g, params)?;
        if let (Some(slot), Some(a_psi)) = (g.param_slot(), g.generator_action(&psi)) {
            let ip: Complex64 = lambda
                .amps
                .iter()
                .zip(&a_psi)
                .map(|(l, v)| l.conj() * v)
                .sum();
            grad[slot] += 2.0 * ip.im;
        }
        apply_gate(&mut psi, g, -angle)?;
        apply_gate(&mut lambda, g, -angle)?;
    }
    Ok((value, grad))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::models::Observable;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    /// Dense single-gate matrix built independently from Kronecker products.
    fn dense_gate(n: usize, gate: &Gate, angle: f64) -> DMatrix<Complex64> {
        let id2 = DMatrix::<Complex64>::identity(2, 2);
        let kron_at = |q: usize, m: &DMatrix<Complex64>| {
            let mut out = DMatrix::<Complex64>::identity(1, 1);
            for k in 0..n {
                out = out.kronecker(if k == q { m } else { &id2 });
            }
            out
        };
        match gate {
            Gate::RotY { qubit, .. } => {
                let (s, co) = (angle / 2.0).sin_cos();
                kron_at(*qubit, &DMatrix::from_row_slice(2, 2, &[c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.)]))
            }
            Gate::RotZ { qubit, .. } => {
                let e = Complex64::from_polar(1.0, -angle / 2.0);
                kron_at(*qubit, &DMatrix::from_row_slice(2, 2, &[e, c(0., 0.), c(0., 0.), e.conj()]))
            }
            Gate::Hadamard { qubit } => {
                let h = FRAC_1_SQRT_2;
                kron_at(*qubit, &DMatrix::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]))
            }
            Gate::Cnot { control, target } => {
                let dim = 1 << n;
                let mut m = DMatrix::zeros(dim, dim);
                for col in 0..dim {
                    let cb = (col >> (n - 1 - control)) & 1;
                    let row = if cb == 1 { col ^ (1 << (n - 1 - target)) } else { col };
                    m[(row, col)] = c(1., 0.);
                }
                m
            }
            Gate::PauliRotation { generator, .. } => {
                let d = generator.to_dense().unwrap();
                let dim = d.nrows();
                DMatrix::<Complex64>::identity(dim, dim) * c(angle.cos(), 0.) - d * c(0., angle.sin())
            }
        }
    }

    fn random_gate(rng: &mut impl Rng, n: usize, slot: usize) -> Gate {
        let q = rng.random_range(0..n);
        match rng.random_range(0..5) {
            0 => Gate::RotY { qubit: q, slot },
            1 => Gate::RotZ { qubit: q, slot },
            2 => Gate::Hadamard { qubit: q },
            3 => {
                let t = (q + 1 + rng.random_range(0..n - 1)) % n;
                Gate::Cnot { control: q, target: t }
            }
            _ => {
                let ops = ["I", "X", "Y", "Z"];
                let s: String = (0..n).map(|_| ops[rng.random_range(0..4)]).collect();
                Gate::PauliRotation { generator: p(&s), slot }
            }
        }
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(1);
        apply_gate(&mut s, &Gate::Hadamard { qubit: 0 }, 0.0).unwrap();
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
    }

    #[test]
    fn roty_pi_flips() {
        let mut s = StateVector::zero(1);
        apply_gate(&mut s, &Gate::RotY { qubit: 0, slot: 0 }, std::f64::consts::PI).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn xx_rotation_quarter_pi() {
        let mut s = StateVector::zero(2);
        let g = Gate::PauliRotation { generator: p("XX"), slot: 0 };
        apply_gate(&mut s, &g, std::f64::consts::FRAC_PI_4).unwrap();
        let expected = dense_gate(2, &g, std::f64::consts::FRAC_PI_4).column(0).clone_owned();
        let r = FRAC_1_SQRT_2;
        assert!((expected[0] - c(r, 0.)).norm() < 1e-15);
        assert!((expected[3] - c(0., -r)).norm() < 1e-15);
        for i in 0..4 {
            assert!((s.amplitudes()[i] - expected[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_target() {
        let mut s = StateVector::zero(2);
        assert!(matches!(
            apply_gate(&mut s, &Gate::Hadamard { qubit: 2 }, 0.0),
            Err(Error::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            run_circuit(&[Gate::RotY { qubit: 0, slot: 3 }], &[0.0], &StateVector::zero(2)),
            Err(Error::UnresolvedSlot { slot: 3, len: 1 })
        ));
    }

    #[test]
    fn empty_and_zero_angle_circuits() {
        let init = StateVector::zero(3);
        assert_eq!(run_circuit(&[], &[], &init).unwrap(), init);
        let mut gates = Vec::new();
        for q in 0..3 {
            gates.push(Gate::RotY { qubit: q, slot: 2 * q });
            gates.push(Gate::RotZ { qubit: q, slot: 2 * q + 1 });
        }
        for q in 0..2 {
            gates.push(Gate::Cnot { control: q, target: q + 1 });
        }
        let out = run_circuit(&gates, &[0.0; 6], &init).unwrap();
        assert!(out.fidelity(&init) > 1.0 - 1e-15);
    }

    #[test]
    fn random_circuit_matches_dense_product() {
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..3 {
            let gates: Vec<Gate> = (0..40).map(|i| random_gate(&mut rng, n, i)).collect();
            let params: Vec<f64> = (0..40).map(|_| rng.random_range(-3.0..3.0)).collect();
            let out = run_circuit(&gates, &params, &StateVector::zero(n)).unwrap();
            let mut v = DVector::<Complex64>::zeros(1 << n);
            v[0] = c(1., 0.);
            for (i, g) in gates.iter().enumerate() {
                v = dense_gate(n, g, params[i]) * v;
            }
            for (a, b) in out.amplitudes().iter().zip(v.iter()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn norm_preserved_and_inverse_round_trip() {
        let n = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let gates: Vec<Gate> = (0..10_000).map(|i| random_gate(&mut rng, n, i)).collect();
        let params: Vec<f64> = (0..10_000).map(|_| rng.random_range(-3.0..3.0)).collect();
        let init = StateVector::zero(n);
        let mut s = init.clone();
        run_in_place(&gates, &params, &mut s).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-10);
        run_inverse_in_place(&gates, &params, &mut s).unwrap();
        assert!(s.fidelity(&init) > 1.0 - 1e-10);
    }

    #[test]
    fn expectation_examples() {
        let z = Observable::from_terms(1, [(p("Z"), 1.0)]).unwrap();
        assert_eq!(expectation(&StateVector::zero(1), &z).unwrap(), 1.0);
        let x = Observable::from_terms(1, [(p("X"), 1.0)]).unwrap();
        let mut plus = StateVector::zero(1);
        apply_gate(&mut plus, &Gate::Hadamard { qubit: 0 }, 0.0).unwrap();
        assert!((expectation(&plus, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&StateVector::zero(2), &x).is_err());
    }

    fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
        let amps = (0..1 << n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        StateVector::from_amplitudes(amps).unwrap()
    }

    pub(crate) fn random_observable(rng: &mut impl Rng, n: usize, terms: usize) -> Observable {
        let ops = ["I", "X", "Y", "Z"];
        let mut obs = Observable::new(n);
        for _ in 0..terms {
            let s: String = (0..n).map(|_| ops[rng.random_range(0..4)]).collect();
            obs.add_term(p(&s), rng.random_range(-1.0..1.0)).unwrap();
        }
        obs
    }

    #[test]
    fn expectation_matches_dense() {
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let s = random_state(&mut rng, n);
            let obs = random_observable(&mut rng, n, 12);
            let dense = obs.to_dense().unwrap();
            let v = DVector::from_vec(s.amplitudes().to_vec());
            let e = (v.adjoint() * dense * &v)[(0, 0)];
            assert!(e.im.abs() < 1e-10);
            assert!((expectation(&s, &obs).unwrap() - e.re).abs() < 1e-10);

            let hv = DVector::from_vec(s.observable_action(&obs));
            assert!((hv - obs.to_dense().unwrap() * v).norm() < 1e-10);
        }
    }

    #[test]
    fn adjoint_gradient_matches_finite_differences() {
        let n = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let gates: Vec<Gate> = (0..30).map(|i| random_gate(&mut rng, n, i)).collect();
        let params: Vec<f64> = (0..30).map(|_| rng.random_range(-3.0..3.0)).collect();
        let obs = random_observable(&mut rng, n, 8);
        let init = StateVector::zero(n);
        let (_, grad) = adjoint_gradient(&gates, &params, &obs, &init).unwrap();
        let h = 1e-5;
        for k in 0..params.len() {
            let mut pp = params.clone();
            pp[k] += h;
            let fp = expectation(&run_circuit(&gates, &pp, &init).unwrap(), &obs).unwrap();
            pp[k] -= 2.0 * h;
            let fm = expectation(&run_circuit(&gates, &pp, &init).unwrap(), &obs).unwrap();
            assert!((grad[k] - (fp - fm) / (2.0 * h)).abs() < 1e-7, "slot {k}");
        }
    }
}
