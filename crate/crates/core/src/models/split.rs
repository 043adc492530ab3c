use std::cmp::Ordering;
use std::sync::Arc;

use super::Observable;
use crate::dla::{close_algebra, DlaBasis};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Partition of an observable into a part whose terms generate a small DLA
/// and the remainder.
#[derive(Debug, Clone)]
pub struct PolyDlaSplit {
    pub inside: Observable,
    pub outside: Observable,
    pub basis: Arc<DlaBasis>,
}

impl PolyDlaSplit {
    /// `Σ|inside| / Σ|obs|`, identity excluded.
    pub fn coverage(&self) -> f64 {
        let total = self.inside.l1_norm() + self.outside.l1_norm();
        if total == 0.0 {
            0.0
        } else {
            self.inside.l1_norm() / total
        }
    }
}

/// Greedy split: terms are visited by descending `|coefficient|` (ties in
/// string order) and kept whenever the running generator closure stays
/// within `max_dim`. The identity term, if any, goes to `outside`.
pub fn split_poly_dla(obs: &Observable, max_dim: usize) -> Result<PolyDlaSplit> {
    let mut order: Vec<(&PauliString, f64)> = obs
        .terms()
        .filter(|(p, _)| !p.is_identity())
        .map(|(p, c)| (p, *c))
        .collect();
    if order.is_empty() {
        return Err(Error::InvalidArgument("observable has no non-identity terms".into()));
    }
    order.sort_by(|a, b| {
        b.1.abs()
            .partial_cmp(&a.1.abs())
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
    });

    let n = obs.n_qubits();
    let mut generators: Vec<PauliString> = Vec::new();
    let mut basis: Option<DlaBasis> = None;
    let mut inside = Observable::new(n);
    for (p, c) in order {
        let already = basis.as_ref().is_some_and(|b| b.index_of(p).is_some());
        if !already {
            generators.push(p.clone());
            match close_algebra(&generators, max_dim) {
                Ok(b) => basis = Some(b),
                Err(Error::ClosureExceeded { .. }) => {
                    generators.pop();
                    continue;
                }
                Err(e) => return Err(e),
            }
        }
        inside.add_term(p.clone(), c)?;
    }
    let basis = basis.ok_or(Error::ClosureExceeded { max_dim })?;

    let mut outside = Observable::new(n);
    for (p, c) in obs.terms() {
        if inside.coefficient(p) == 0.0 {
            outside.add_term(p.clone(), *c)?;
        }
    }
    Ok(PolyDlaSplit {
        inside,
        outside,
        basis: Arc::new(basis),
    })
}

/// Split against a fixed basis: terms that are basis elements go inside.
pub fn split_by_basis(obs: &Observable, basis: Arc<DlaBasis>) -> Result<PolyDlaSplit> {
    if obs.n_qubits() != basis.n_qubits() {
        return Err(Error::QubitMismatch {
            left: obs.n_qubits(),
            right: basis.n_qubits(),
        });
    }
    let n = obs.n_qubits();
    let (mut inside, mut outside) = (Observable::new(n), Observable::new(n));
    for (p, c) in obs.terms() {
        if basis.index_of(p).is_some() {
            inside.add_term(p.clone(), *c)?;
        } else {
            outside.add_term(p.clone(), *c)?;
        }
    }
    if inside.is_empty() {
        return Err(Error::TermOutsideDla(outside.terms().map(|(p, _)| p.clone()).collect()));
    }
    Ok(PolyDlaSplit { inside, outside, basis })
}
