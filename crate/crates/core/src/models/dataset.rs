//! Ground-state phase-classification data for the bond-alternating
//! Heisenberg chain, with a flat binary cache plus JSON sidecar.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::heisenberg_bond_alt;
use crate::backend::{ground_state, StateVector};
use crate::error::{Error, Result};

pub const GROUND_STATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSample {
    pub state: StateVector,
    /// `-1` for `J < J'`, `+1` for `J > J'`.
    pub label: f64,
    pub j: f64,
    pub j_prime: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDataset {
    pub n_qubits: usize,
    pub split: Split,
    pub seed: u64,
    pub samples: Vec<PhaseSample>,
    /// Draws discarded because of a tie or an eigensolver failure.
    pub resampled: usize,
}

pub fn label_for(j: f64, j_prime: f64) -> f64 {
    if j < j_prime {
        -1.0
    } else {
        1.0
    }
}

fn draw(n: usize, count: usize, rng: &mut ChaCha8Rng, resampled: &mut usize) -> Vec<PhaseSample> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let j: f64 = rng.random_range(-1.0..=1.0);
        let j_prime: f64 = rng.random_range(-1.0..=1.0);
        if j == j_prime {
            *resampled += 1;
            continue;
        }
        let h = heisenberg_bond_alt(n, j, j_prime).expect("validated chain length");
        match ground_state(&h, GROUND_STATE_TOL) {
            Ok((energy, state)) => out.push(PhaseSample {
                state,
                label: label_for(j, j_prime),
                j,
                j_prime,
                energy,
            }),
            Err(_) => *resampled += 1,
        }
    }
    out
}

/// Train and test sets with `(J, J')` uniform on `[-1, 1]²`.
pub fn make_phase_dataset(
    n: usize,
    train_count: usize,
    test_count: usize,
    seed: u64,
) -> Result<(PhaseDataset, PhaseDataset)> {
    heisenberg_bond_alt(n, 1.0, 1.0)?;
    if train_count == 0 || test_count == 0 {
        return Err(Error::InvalidArgument("dataset sizes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r_train = 0;
    let train = draw(n, train_count, &mut rng, &mut r_train);
    let mut r_test = 0;
    let test = draw(n, test_count, &mut rng, &mut r_test);
    Ok((
        PhaseDataset {
            n_qubits: n,
            split: Split::Train,
            seed,
            samples: train,
            resampled: r_train,
        },
        PhaseDataset {
            n_qubits: n,
            split: Split::Test,
            seed,
            samples: test,
            resampled: r_test,
        },
    ))
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    format: String,
    version: u32,
    n_qubits: usize,
    split: Split,
    seed: u64,
    samples: usize,
    resampled: usize,
    /// Per-record f64 fields, little-endian, in order.
    record_layout: Vec<String>,
    record_f64s: usize,
    data_file: String,
}

const FORMAT: &str = "helia-phase-dataset";

impl PhaseDataset {
    fn record_f64s(&self) -> usize {
        4 + 2 * (1usize << self.n_qubits)
    }

    /// Writes `<stem>.bin` and `<stem>.json` next to each other.
    pub fn save(&self, stem: impl AsRef<Path>) -> Result<()> {
        let stem = stem.as_ref();
        let bin_path = stem.with_extension("bin");
        let mut bin = std::io::BufWriter::new(std::fs::File::create(&bin_path)?);
        for s in &self.samples {
            for v in [s.j, s.j_prime, s.label, s.energy] {
                bin.write_all(&v.to_le_bytes())?;
            }
            for a in s.state.amplitudes() {
                bin.write_all(&a.re.to_le_bytes())?;
                bin.write_all(&a.im.to_le_bytes())?;
            }
        }
        bin.flush()?;
        let sidecar = Sidecar {
            format: FORMAT.into(),
            version: 1,
            n_qubits: self.n_qubits,
            split: self.split,
            seed: self.seed,
            samples: self.samples.len(),
            resampled: self.resampled,
            record_layout: vec![
                "j".into(),
                "j_prime".into(),
                "label".into(),
                "energy".into(),
                "amplitudes[re, im] x 2^n".into(),
            ],
            record_f64s: self.record_f64s(),
            data_file: bin_path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
        };
        let json = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(stem.with_extension("json"), json)?;
        Ok(())
    }

    pub fn load(stem: impl AsRef<Path>) -> Result<Self> {
        let stem = stem.as_ref();
        let json_path: PathBuf = stem.with_extension("json");
        let sidecar: Sidecar = serde_json::from_str(&std::fs::read_to_string(&json_path)?)
            .map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
        if sidecar.format != FORMAT || sidecar.version != 1 {
            return Err(Error::InvalidArgument(format!(
                "unsupported dataset format {} v{}",
                sidecar.format, sidecar.version
            )));
        }
        let dim = 1usize << sidecar.n_qubits;
        let per = 4 + 2 * dim;
        if sidecar.record_f64s != per {
            return Err(Error::InvalidArgument("record size does not match qubit count".into()));
        }
        let mut raw = Vec::new();
        std::fs::File::open(json_path.with_file_name(&sidecar.data_file))?.read_to_end(&mut raw)?;
        if raw.len() != sidecar.samples * per * 8 {
            return Err(Error::InvalidArgument("dataset binary has unexpected length".into()));
        }
        let vals: Vec<f64> = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        let mut samples = Vec::with_capacity(sidecar.samples);
        for rec in vals.chunks_exact(per) {
            let amps: Vec<Complex64> = rec[4..]
                .chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect();
            samples.push(PhaseSample {
                j: rec[0],
                j_prime: rec[1],
                label: rec[2],
                energy: rec[3],
                state: StateVector::from_amplitudes(amps)?,
            });
        }
        Ok(Self {
            n_qubits: sidecar.n_qubits,
            split: sidecar.split,
            seed: sidecar.seed,
            samples,
            resampled: sidecar.resampled,
        })
    }
}
