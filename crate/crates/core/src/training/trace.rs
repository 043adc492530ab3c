use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Init,
    Alt,
    Sim,
    PsrUq,
    PsrFull,
    Gsim,
}

impl Phase {
    pub fn tag(self) -> &'static str {
        match self {
            Phase::Init => "init",
            Phase::Alt => "alt",
            Phase::Sim => "sim",
            Phase::PsrUq => "psr-uq",
            Phase::PsrFull => "psr-full",
            Phase::Gsim => "gsim",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub cost: f64,
    pub theta_hash: String,
    pub phi_hash: String,
    /// Cumulative unique circuit evaluations.
    pub qpu_calls: u64,
    /// Cumulative circuit evaluations times shots per circuit.
    pub shots: u64,
    pub phase: Phase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub method: String,
    pub seed: u64,
    pub config_digest: String,
    pub records: Vec<IterationRecord>,
    pub best_cost: f64,
    pub best_iteration: usize,
    pub best_qpu_calls: u64,
    /// Why the last phase ended: `budget` or `converged`.
    pub stop_reason: String,
    pub final_theta: Vec<f64>,
    pub final_phi: Vec<f64>,
}

/// Short sha256 fingerprint of a parameter vector.
pub fn params_hash(params: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in params {
        h.update(v.to_le_bytes());
    }
    let digest = h.finalize();
    hex::encode(&digest[..8])
}

impl TrainTrace {
    pub fn new(method: &str, seed: u64) -> Self {
        Self {
            method: method.into(),
            seed,
            config_digest: String::new(),
            records: Vec::new(),
            best_cost: f64::INFINITY,
            best_iteration: 0,
            best_qpu_calls: 0,
            stop_reason: "budget".into(),
            final_theta: Vec::new(),
            final_phi: Vec::new(),
        }
    }

    pub fn push(&mut self, record: IterationRecord) {
        if record.cost < self.best_cost {
            self.best_cost = record.cost;
            self.best_iteration = record.iteration;
            self.best_qpu_calls = record.qpu_calls;
        }
        self.records.push(record);
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn total_qpu_calls(&self) -> u64 {
        self.last().map_or(0, |r| r.qpu_calls)
    }

    pub fn iterations(&self) -> usize {
        self.last().map_or(0, |r| r.iteration)
    }

    pub fn final_cost(&self) -> f64 {
        self.last().map_or(f64::NAN, |r| r.cost)
    }

    pub fn peak_test_accuracy(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.test_accuracy)
            .fold(None, |acc, a| Some(acc.map_or(a, |b: f64| b.max(a))))
    }

    /// QPU calls charged during each iteration.
    pub fn per_iteration_charges(&self) -> Vec<(Phase, u64)> {
        self.records
            .windows(2)
            .map(|w| (w[1].phase, w[1].qpu_calls - w[0].qpu_calls))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// `iteration,cost,qpu_calls,phase` rows.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["iteration", "cost", "qpu_calls", "phase"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.records {
            w.write_record([
                r.iteration.to_string(),
                format!("{:e}", r.cost),
                r.qpu_calls.to_string(),
                r.phase.tag().to_string(),
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}
