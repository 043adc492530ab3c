//! Spin-chain Hamiltonians and DLA generator families. All chains use open
//! boundaries; random coefficients are drawn from a seeded standard normal.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Observable;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

fn two_site(n: usize, i: usize, op: Pauli) -> PauliString {
    PauliString::from_ops(n, &[(i, op), (i + 1, op)])
}

fn check_chain(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("chain needs at least 2 qubits, got {n}")));
    }
    Ok(())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `Σ_i α_i X_i X_{i+1} + β_i Y_i Y_{i+1}`, `2(n−1)` terms.
pub fn xy_hamiltonian(n: usize, seed: u64) -> Result<Observable> {
    check_chain(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Observable::new(n);
    for i in 0..n - 1 {
        let (a, b) = (normal(&mut rng), normal(&mut rng));
        h.add_term(two_site(n, i, Pauli::X), a)?;
        h.add_term(two_site(n, i, Pauli::Y), b)?;
    }
    Ok(h)
}

/// `Σ_i α_i X_i X_{i+1} + Σ_j β_j Z_j`, `(n−1) + n` terms.
pub fn tfim_hamiltonian(n: usize, seed: u64) -> Result<Observable> {
    check_chain(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tfim_terms(n, &mut rng)
}

fn tfim_terms(n: usize, rng: &mut ChaCha8Rng) -> Result<Observable> {
    let mut h = Observable::new(n);
    for i in 0..n - 1 {
        h.add_term(two_site(n, i, Pauli::X), normal(rng))?;
    }
    for j in 0..n {
        h.add_term(PauliString::single(n, j, Pauli::Z), normal(rng))?;
    }
    Ok(h)
}

/// TFIM plus longitudinal fields `Σ_j γ_j X_j`. The transverse part equals
/// [`tfim_hamiltonian`] for the same seed.
pub fn ltfim_hamiltonian(n: usize, seed: u64) -> Result<Observable> {
    check_chain(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = tfim_terms(n, &mut rng)?;
    for j in 0..n {
        h.add_term(PauliString::single(n, j, Pauli::X), normal(&mut rng))?;
    }
    Ok(h)
}

/// Uniform TFIM `Σ X_i X_{i+1} + Σ Z_j`.
pub fn tfim_unit(n: usize) -> Observable {
    let mut h = Observable::new(n);
    for i in 0..n.saturating_sub(1) {
        h.add_term(two_site(n, i, Pauli::X), 1.0).expect("valid term");
    }
    for j in 0..n {
        h.add_term(PauliString::single(n, j, Pauli::Z), 1.0).expect("valid term");
    }
    h
}

/// Bond-alternating Heisenberg chain: coupling `j` on bonds `(2i−1, 2i)`
/// and `j_prime` on bonds `(2i, 2i+1)`, each bond `XX + YY + ZZ`.
pub fn heisenberg_bond_alt(n: usize, j: f64, j_prime: f64) -> Result<Observable> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "bond-alternating chain needs an even qubit count >= 4, got {n}"
        )));
    }
    let mut h = Observable::new(n);
    for left in 0..n - 1 {
        let c = if left % 2 == 1 { j } else { j_prime };
        if c == 0.0 {
            continue;
        }
        for op in [Pauli::X, Pauli::Y, Pauli::Z] {
            h.add_term(two_site(n, left, op), c)?;
        }
    }
    Ok(h)
}

/// Generator sets for the polynomial DLAs used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DlaFamily {
    /// `{X_j X_{j+1}, Y_j Y_{j+1}}`
    Xy,
    /// `{Z_j Z_{j+1}, Y_j Y_{j+1}}`
    Yz,
    /// `{X_j X_{j+1}, Z_j Z_{j+1}}`
    Zx,
    /// `{X_j X_{j+1}, Z_j}`
    Tfim,
}

impl DlaFamily {
    pub fn generators(self, n: usize) -> Vec<PauliString> {
        let bonds = |op: Pauli| (0..n.saturating_sub(1)).map(move |i| two_site(n, i, op));
        match self {
            DlaFamily::Xy => bonds(Pauli::X).chain(bonds(Pauli::Y)).collect(),
            DlaFamily::Yz => bonds(Pauli::Z).chain(bonds(Pauli::Y)).collect(),
            DlaFamily::Zx => bonds(Pauli::X).chain(bonds(Pauli::Z)).collect(),
            DlaFamily::Tfim => bonds(Pauli::X)
                .chain((0..n).map(|j| PauliString::single(n, j, Pauli::Z)))
                .collect(),
        }
    }
}
