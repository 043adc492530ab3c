use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backend::EvalMode;
use crate::error::{Error, Result};
use crate::models::DlaFamily;
use crate::training::{AdamConfig, GradientEngine, PretrainSchedule, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Vqe,
    Classify,
    BpVariance,
    Purity,
    DlaInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "full-psr")]
    FullPsr,
    /// Hardware-efficient block alone, trained by PSR.
    #[serde(rename = "hea-psr")]
    HeaPsr,
    #[serde(rename = "gsim")]
    Gsim,
    #[serde(rename = "alt")]
    Alternate,
    #[serde(rename = "sim")]
    Simultaneous,
    #[serde(rename = "alt+sim")]
    AltSim,
    #[serde(rename = "pretrain")]
    Pretrain,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FullPsr => "full-psr",
            Method::HeaPsr => "hea-psr",
            Method::Gsim => "gsim",
            Method::Alternate => "alt",
            Method::Simultaneous => "sim",
            Method::AltSim => "alt+sim",
            Method::Pretrain => "pretrain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianFamily {
    Xy,
    Tfim,
    Ltfim,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HamiltonianSpec {
    pub family: HamiltonianFamily,
    pub n_qubits: usize,
    /// Fixed instance seed; when absent each trial draws its own instance.
    pub seed: Option<u64>,
    pub path: Option<PathBuf>,
}

impl Default for HamiltonianSpec {
    fn default() -> Self {
        Self {
            family: HamiltonianFamily::Xy,
            n_qubits: 6,
            seed: None,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzSpec {
    pub uq_layers: usize,
    pub prelayer: bool,
    /// DLA of the `U_g` block; defaults to the Hamiltonian family's.
    pub dla: Option<DlaFamily>,
    /// Cap on the dimension of a DLA grown from Hamiltonian terms; `n²`
    /// when absent. Named families are closed with a cap of `4n²`.
    pub max_dla_dim: Option<usize>,
}

impl AnsatzSpec {
    pub fn split_cap(&self, n: usize) -> usize {
        self.max_dla_dim.unwrap_or(n * n)
    }

    pub fn family_cap(&self, n: usize) -> usize {
        self.max_dla_dim.unwrap_or(4 * n * n)
    }
}

impl Default for AnsatzSpec {
    fn default() -> Self {
        Self {
            uq_layers: 1,
            prelayer: true,
            dla: None,
            max_dla_dim: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSpec {
    pub methods: Vec<Method>,
    /// Iteration budget of every method; Alt+Sim spends `alt_iterations`
    /// on Alternate and at most the rest on Simultaneous.
    pub iterations: usize,
    pub alt_iterations: usize,
    pub schedule: PretrainSchedule,
    pub engine: GradientEngine,
    /// Shots per circuit; exact expectations when absent.
    pub shots: Option<u64>,
    pub learning_rate: f64,
    /// Step size of the `φ` block; equals `learning_rate` when absent.
    pub phi_learning_rate: Option<f64>,
    pub convergence_window: usize,
    pub convergence_tol: f64,
    pub test_every: usize,
}

impl Default for TrainingSpec {
    fn default() -> Self {
        Self {
            methods: vec![Method::FullPsr, Method::AltSim],
            iterations: 2500,
            alt_iterations: 500,
            schedule: PretrainSchedule::default(),
            engine: GradientEngine::Psr,
            shots: None,
            learning_rate: 0.01,
            phi_learning_rate: None,
            convergence_window: 20,
            convergence_tol: 1e-8,
            test_every: 10,
        }
    }
}

impl TrainingSpec {
    pub fn eval_mode(&self) -> EvalMode {
        match self.shots {
            Some(shots) => EvalMode::Shots { shots },
            None => EvalMode::Exact,
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        let adam = |lr: f64| AdamConfig {
            learning_rate: lr,
            ..AdamConfig::default()
        };
        TrainConfig {
            seed,
            theta_adam: adam(self.learning_rate),
            phi_adam: adam(self.phi_learning_rate.unwrap_or(self.learning_rate)),
            engine: self.engine,
            eval: self.eval_mode(),
            convergence_window: self.convergence_window,
            convergence_tol: self.convergence_tol,
            sim_cap: self.iterations.saturating_sub(self.alt_iterations),
            test_every: self.test_every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySpec {
    pub train: usize,
    pub test: usize,
    /// Dataset seed; the master seed when absent.
    pub dataset_seed: Option<u64>,
}

impl Default for ClassifySpec {
    fn default() -> Self {
        Self {
            train: 40,
            test: 40,
            dataset_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BpSpec {
    pub qubits: Vec<usize>,
    pub iterations: usize,
    pub hea_layers: usize,
}

impl Default for BpSpec {
    fn default() -> Self {
        Self {
            qubits: vec![4, 6, 8, 10],
            iterations: 20,
            hea_layers: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthProfile {
    Constant,
    Logarithmic,
    Linear,
}

impl DepthProfile {
    pub fn layers(self, n: usize, constant_layers: usize) -> usize {
        match self {
            DepthProfile::Constant => constant_layers,
            DepthProfile::Logarithmic => (n.max(2) as f64).log2().ceil() as usize,
            DepthProfile::Linear => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PuritySpec {
    pub qubits: Vec<usize>,
    pub samples: usize,
    pub profiles: Vec<DepthProfile>,
    pub constant_layers: usize,
}

impl Default for PuritySpec {
    fn default() -> Self {
        Self {
            qubits: vec![4, 6, 8],
            samples: 1000,
            profiles: vec![DepthProfile::Constant, DepthProfile::Logarithmic, DepthProfile::Linear],
            constant_layers: 1,
        }
    }
}

/// Execution settings that do not affect results and are left out of the
/// digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self { jobs: 1, out: None }
    }
}

fn default_trials() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    #[serde(default)]
    pub ansatz: AnsatzSpec,
    #[serde(default)]
    pub training: TrainingSpec,
    #[serde(default)]
    pub classify: ClassifySpec,
    #[serde(default)]
    pub bp: BpSpec,
    #[serde(default)]
    pub purity: PuritySpec,
    /// Read from config files but never written out, so reports do not
    /// depend on where they were produced.
    #[serde(default, skip_serializing)]
    pub run: RunSpec,
}

impl ExperimentConfig {
    pub fn new(task: TaskKind) -> Self {
        Self {
            task,
            seed: 0,
            trials: default_trials(),
            hamiltonian: HamiltonianSpec::default(),
            ansatz: AnsatzSpec::default(),
            training: TrainingSpec::default(),
            classify: ClassifySpec::default(),
            bp: BpSpec::default(),
            purity: PuritySpec::default(),
            run: RunSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0),
            message: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a TOML config, or the config embedded in a JSON report.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            #[derive(Deserialize)]
            struct Embedded {
                config: ExperimentConfig,
            }
            let e: Embedded = serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
            e.config.validate()?;
            Ok(e.config)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.trials == 0 {
            return bad("trials must be positive");
        }
        if self.run.jobs == 0 {
            return bad("jobs must be positive");
        }
        if self.training.shots == Some(0) {
            return bad("shots must be positive");
        }
        if self.training.shots.is_some() && self.training.engine == GradientEngine::Adjoint {
            return bad("the adjoint engine requires exact expectations");
        }
        if self.training.alt_iterations > self.training.iterations {
            return bad("alt_iterations exceeds the iteration budget");
        }
        if self.hamiltonian.family == HamiltonianFamily::File && self.hamiltonian.path.is_none() {
            return bad("hamiltonian family 'file' needs a path");
        }
        match self.task {
            TaskKind::Vqe | TaskKind::Classify if self.training.methods.is_empty() => bad("no training methods"),
            TaskKind::BpVariance if self.trials < 2 || self.bp.qubits.len() < 2 => {
                bad("variance sweep needs two or more trials and qubit counts")
            }
            TaskKind::Purity if self.purity.samples == 0 || self.purity.qubits.is_empty() => {
                bad("purity sweep needs samples and qubit counts")
            }
            _ => Ok(()),
        }
    }

    /// sha256 over the canonical JSON form, excluding `run`.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.run = RunSpec::default();
        let json = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Seed of trial `k`: the master seed plus `k`.
    pub fn trial_seed(&self, k: usize) -> u64 {
        self.seed.wrapping_add(k as u64)
    }

    pub fn trial_seeds(&self) -> Vec<u64> {
        (0..self.trials).map(|k| self.trial_seed(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let c = ExperimentConfig::from_toml("task = \"vqe\"\n").unwrap();
        assert_eq!(c, ExperimentConfig::new(TaskKind::Vqe));
        assert_eq!(c.training.train_config(3).sim_cap, 2000);
        assert_eq!(c.training.train_config(3).seed, 3);
    }

    #[test]
    fn full_document_round_trip() {
        let text = r#"
task = "vqe"
seed = 11
trials = 4
[hamiltonian]
family = "tfim"
n_qubits = 6
[ansatz]
uq_layers = 2
prelayer = false
dla = "tfim"
[training]
methods = ["alt", "gsim", "hea-psr", "alt+sim"]
iterations = 300
alt_iterations = 100
engine = "adjoint"
[training.schedule]
alternate = 1
"#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(c.training.methods[3], Method::AltSim);
        assert_eq!(c.training.schedule.simultaneous, 100);
        assert_eq!(c.trial_seeds(), vec![11, 12, 13, 14]);
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.digest(), c.digest());
    }

    #[test]
    fn digest_ignores_run_settings_only() {
        let a = ExperimentConfig::new(TaskKind::Vqe);
        let mut b = a.clone();
        b.run.jobs = 4;
        b.run.out = Some("x".into());
        assert_eq!(a.digest(), b.digest());
        b.seed = 1;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn invalid_documents_are_rejected() {
        assert!(matches!(ExperimentConfig::from_toml("task = \"nope\""), Err(Error::Parse { .. })));
        assert!(ExperimentConfig::from_toml("task = \"vqe\"\nbogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("task = \"vqe\"\ntrials = 0").is_err());
        assert!(ExperimentConfig::from_toml("task = \"vqe\"\n[hamiltonian]\nfamily = \"file\"").is_err());
        assert!(
            ExperimentConfig::from_toml("task = \"vqe\"\n[training]\nshots = 10\nengine = \"adjoint\"").is_err()
        );
    }

    #[test]
    fn depth_profiles() {
        assert_eq!(DepthProfile::Constant.layers(8, 1), 1);
        assert_eq!(DepthProfile::Logarithmic.layers(8, 1), 3);
        assert_eq!(DepthProfile::Logarithmic.layers(6, 1), 3);
        assert_eq!(DepthProfile::Linear.layers(6, 1), 6);
    }
}
