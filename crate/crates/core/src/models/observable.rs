use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Real-weighted sum of phase-free Pauli strings. Zero-weight terms are
/// pruned, so the term map only ever holds nonzero finite coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl Observable {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (PauliString, f64)>,
    ) -> Result<Self> {
        let mut o = Self::new(n_qubits);
        for (p, c) in terms {
            o.add_term(p, c)?;
        }
        Ok(o)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &f64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> f64 {
        self.terms.get(&p.phase_free()).copied().unwrap_or(0.0)
    }

    /// Adds `coeff · p`. A `-1` phase on `p` flips the sign; an imaginary
    /// phase would make the sum non-Hermitian and is rejected.
    pub fn add_term(&mut self, p: PauliString, coeff: f64) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        if !coeff.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite coefficient on {p}")));
        }
        let coeff = match p.phase_power() {
            0 => coeff,
            2 => -coeff,
            _ => return Err(Error::InvalidArgument(format!("non-Hermitian term {p}"))),
        };
        let key = p.phase_free();
        let v = self.terms.get(&key).copied().unwrap_or(0.0) + coeff;
        if v == 0.0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
        Ok(())
    }

    pub fn plus(&self, other: &Observable) -> Result<Observable> {
        let mut out = self.clone();
        for (p, c) in other.terms() {
            out.add_term(p.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Observable {
        let mut out = Observable::new(self.n_qubits);
        for (p, c) in self.terms() {
            let v = c * factor;
            if v != 0.0 {
                out.terms.insert(p.clone(), v);
            }
        }
        out
    }

    /// Sum of absolute coefficients, identity excluded.
    pub fn l1_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(p, _)| !p.is_identity())
            .map(|(_, c)| c.abs())
            .sum()
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in self.terms() {
            m += p.to_dense()? * Complex64::new(*c, 0.0);
        }
        Ok(m)
    }

    /// Text form: qubit count on the first line, then `<pauli> <coeff>`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n_qubits);
        for (p, c) in self.terms() {
            let _ = writeln!(out, "{p} {c:e}");
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing qubit count".into(),
        })?;
        let n: usize = header.parse().map_err(|_| Error::Parse {
            line: hline,
            message: format!("invalid qubit count {header:?}"),
        })?;
        if n == 0 {
            return Err(Error::Parse {
                line: hline,
                message: "qubit count must be positive".into(),
            });
        }
        let mut obs = Observable::new(n);
        let mut seen_terms = 0usize;
        for (line, body) in lines {
            let mut parts = body.split_whitespace();
            let (ps, cs) = match (parts.next(), parts.next(), parts.next()) {
                (Some(p), Some(c), None) => (p, c),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: "expected `<pauli> <coefficient>`".into(),
                    })
                }
            };
            let p: PauliString = ps.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid Pauli string {ps:?}"),
            })?;
            if p.n_qubits() != n {
                return Err(Error::Parse {
                    line,
                    message: format!("Pauli string has {} qubits, expected {n}", p.n_qubits()),
                });
            }
            let c: f64 = cs.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid coefficient {cs:?}"),
            })?;
            obs.add_term(p, c).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            seen_terms += 1;
        }
        if seen_terms == 0 {
            return Err(Error::Parse {
                line: hline,
                message: "no terms".into(),
            });
        }
        Ok(obs)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

pub fn load_observable(path: impl AsRef<Path>) -> Result<Observable> {
    let text = std::fs::read_to_string(path)?;
    Observable::parse_text(&text)
}
