//! n-qubit Pauli strings in the binary symplectic representation.
//!
//! A string is stored as two packed bit vectors (`x`, `z`) plus a power of
//! `i`. Per qubit the pair `(x, z)` encodes `I = (0,0)`, `X = (1,0)`,
//! `Z = (0,1)` and `Y = (1,1)`, so that the full operator is
//! `i^phase · ⊗_q P_q`. Multiplication is an XOR of the bit vectors plus a
//! popcount-based phase update; no matrices are involved.
//!
//! Qubit 0 is the leftmost character of the text form and the most
//! significant bit of a statevector amplitude index.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Default qubit bound for [`PauliString::to_dense`].
pub const DENSE_ORACLE_BOUND: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Power of `i` as a complex number.
pub fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        let words = n_qubits.div_ceil(WORD).max(1);
        Self {
            n_qubits,
            x: vec![0; words],
            z: vec![0; words],
            phase: 0,
        }
    }

    /// A string acting as `op` on `qubit` and identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, op: Pauli) -> Self {
        Self::from_ops(n_qubits, &[(qubit, op)])
    }

    /// Builds a string from `(qubit, op)` pairs; later pairs on the same
    /// qubit overwrite earlier ones.
    pub fn from_ops(n_qubits: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut p = Self::identity(n_qubits);
        for &(q, op) in ops {
            assert!(q < n_qubits, "qubit {q} out of range for {n_qubits} qubits");
            p.set(q, op);
        }
        p
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn phase_power(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase_power: u8) -> Self {
        self.phase = phase_power & 3;
        self
    }

    /// The same string with the phase reset to `i^0`; the canonical
    /// representative used for set membership.
    pub fn phase_free(&self) -> Self {
        let mut p = self.clone();
        p.phase = 0;
        p
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let (w, b) = (qubit / WORD, qubit % WORD);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, op: Pauli) {
        let (w, b) = (qubit / WORD, qubit % WORD);
        let (xb, zb) = op.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        // P(x,z) = i^{x·z} X^x Z^z, and Z^z1 X^x2 = (-1)^{z1·x2} X^x2 Z^z1.
        let mut acc: u32 = self.phase as u32 + other.phase as u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            acc += (x1 & z1).count_ones() + (x2 & z2).count_ones() + 2 * (z1 & x2).count_ones();
            // subtract x3·z3 mod 4 by adding 3·popcount
            acc += 3 * (x3 & z3).count_ones();
            x.push(x3);
            z.push(z3);
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            x,
            z,
            phase: (acc % 4) as u8,
        })
    }

    /// Parity of the symplectic inner product; true iff `ab = ba`.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        parity == 0
    }

    /// `[a, b]` as `coefficient · c` with `c` phase-free, or `None` when the
    /// strings commute.
    pub fn commutator(&self, other: &Self) -> Result<Option<(Complex64, PauliString)>> {
        if self.commutes(other)? {
            return Ok(None);
        }
        let prod = self.multiply(other)?;
        let coeff = i_pow(prod.phase) * 2.0;
        Ok(Some((coeff, prod.phase_free())))
    }

    /// X and Z masks over amplitude indices (qubit 0 is the most
    /// significant bit). Only valid for `n_qubits <= 63`.
    pub fn amplitude_masks(&self) -> (usize, usize) {
        let n = self.n_qubits;
        let (mut xm, mut zm) = (0usize, 0usize);
        for q in 0..n {
            let bit = 1usize << (n - 1 - q);
            let (xb, zb) = self.get(q).bits();
            if xb {
                xm |= bit;
            }
            if zb {
                zm |= bit;
            }
        }
        (xm, zm)
    }

    /// Number of sites carrying a Y, i.e. the popcount of `x & z`.
    pub fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones())
            .sum()
    }

    /// Dense `2^n × 2^n` matrix; intended as a test oracle.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        self.to_dense_bounded(DENSE_ORACLE_BOUND)
    }

    pub fn to_dense_bounded(&self, bound: usize) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > bound {
            return Err(Error::OracleBound {
                n_qubits: self.n_qubits,
                bound,
            });
        }
        let dim = 1usize << self.n_qubits;
        let (xm, zm) = self.amplitude_masks();
        let base = self.phase as u32 + self.y_count();
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let sign = 2 * ((zm & col).count_ones() & 1);
            m[(col ^ xm, col)] = i_pow(((base + sign) % 4) as u8);
        }
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n_qubits {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(Error::InvalidPauli(s.to_string()));
        }
        let mut p = PauliString::identity(body.len());
        for (q, c) in body.chars().enumerate() {
            let op = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::InvalidPauli(s.to_string())),
            };
            p.set(q, op);
        }
        Ok(p.with_phase(phase))
    }
}
