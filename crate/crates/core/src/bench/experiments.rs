use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DepthProfile, ExperimentConfig, HamiltonianFamily, Method, TaskKind};
use super::metrics::{fit_slope, relative_error, MeanStd, MetricReport, RunningStats, TrialOutcome};
use crate::backend::{self, ground_state, Gate, StateVector};
use crate::dla::{close_algebra, DlaBasis};
use crate::error::{Error, Result};
use crate::gsim::state_purity;
use crate::models::{
    build_helia, load_observable, ltfim_hamiltonian, make_phase_dataset, split_by_basis, split_poly_dla,
    tfim_hamiltonian, xy_hamiltonian, yz_linear_layers, DlaFamily, HeliaAnsatz, Observable,
};
use crate::training::{
    pretrain_general, predict_label, train_alt_then_sim, train_alternate, train_full_psr, train_gsim_only,
    train_simultaneous, Task, TrainConfig, TrainTrace, Trainer,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest register for which `E*` is computed by exact diagonalization.
pub const EXACT_ENERGY_MAX_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub task: TaskKind,
    pub config_digest: String,
    pub master_seed: u64,
    pub trial_seeds: Vec<u64>,
    pub config: ExperimentConfig,
    pub results: Results,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Results {
    Vqe(VqeResults),
    Classify(ClassifyResults),
    BpVariance(BpResults),
    Purity(PurityResults),
    DlaInfo(DlaInfo),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeTrial {
    pub seed: u64,
    pub hamiltonian_seed: Option<u64>,
    pub e_star: f64,
    pub exact: bool,
    pub outcomes: Vec<(Method, TrialOutcome)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResults {
    pub n_qubits: usize,
    /// Distribution of random Hamiltonian coefficients.
    pub coefficients: String,
    pub dla_dim: usize,
    pub theta_count: usize,
    /// Baseline for QPU reductions, when Full-PSR is among the methods.
    pub baseline: Option<Method>,
    pub methods: Vec<MetricReport>,
    pub trials: Vec<VqeTrial>,
}

impl VqeResults {
    pub fn method(&self, m: Method) -> Option<&MetricReport> {
        self.methods.iter().find(|r| r.method == m.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyMethodReport {
    pub method: String,
    pub peak_test_accuracy: Vec<f64>,
    pub peak_test_accuracy_stats: MeanStd,
    pub final_train_loss: Vec<f64>,
    pub total_qpu_calls: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResults {
    pub n_qubits: usize,
    pub dla: DlaFamily,
    pub dla_dim: usize,
    pub dataset_seed: u64,
    /// Basis element used as the readout in each trial.
    pub readouts: Vec<String>,
    pub test_every: usize,
    pub methods: Vec<ClassifyMethodReport>,
}

impl ClassifyResults {
    pub fn method(&self, m: Method) -> Option<&ClassifyMethodReport> {
        self.methods.iter().find(|r| r.method == m.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpRow {
    pub n_qubits: usize,
    pub helia_theta_variance: f64,
    pub helia_phi_variance: f64,
    pub hea_variance: f64,
    pub samples: u64,
}

/// Slopes of `ln Var` against `n`; absent when a variance is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpSlopes {
    pub helia_theta: Option<f64>,
    pub helia_phi: Option<f64>,
    pub hea: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpResults {
    pub dla: DlaFamily,
    pub hea_layers: usize,
    pub rows: Vec<BpRow>,
    pub slopes: BpSlopes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityRow {
    pub n_qubits: usize,
    pub profile: DepthProfile,
    pub layers: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuritySlope {
    pub profile: DepthProfile,
    /// Slope of `ln` mean purity against `n`; absent when a mean is zero.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityResults {
    pub dla: DlaFamily,
    pub samples: usize,
    pub rows: Vec<PurityRow>,
    pub slopes: Vec<PuritySlope>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlaInfo {
    pub n_qubits: usize,
    pub source: String,
    pub generators: Vec<String>,
    pub dimension: usize,
    pub basis: Vec<String>,
}

/// A report plus the training traces behind it, keyed by file stem.
#[derive(Debug, Clone)]
pub struct Outputs {
    pub report: Report,
    pub traces: Vec<(String, TrainTrace)>,
}

/// Runs the configured task on a pool of `cfg.run.jobs` threads.
pub fn run(cfg: &ExperimentConfig) -> Result<Outputs> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let digest = cfg.digest();
    let (results, mut traces) = pool.install(|| match cfg.task {
        TaskKind::Vqe => run_vqe(cfg).map(|(r, t)| (Results::Vqe(r), t)),
        TaskKind::Classify => run_classification(cfg).map(|(r, t)| (Results::Classify(r), t)),
        TaskKind::BpVariance => bp_variance_sweep(cfg).map(|r| (Results::BpVariance(r), Vec::new())),
        TaskKind::Purity => purity_depth_sweep(cfg).map(|r| (Results::Purity(r), Vec::new())),
        TaskKind::DlaInfo => dla_info(cfg).map(|r| (Results::DlaInfo(r), Vec::new())),
    })?;
    for (_, t) in &mut traces {
        t.config_digest = digest.clone();
    }
    Ok(Outputs {
        report: Report {
            schema_version: SCHEMA_VERSION,
            task: cfg.task,
            config_digest: digest,
            master_seed: cfg.seed,
            trial_seeds: cfg.trial_seeds(),
            config: cfg.clone(),
            results,
        },
        traces,
    })
}

/// Writes `report.json` and `traces/<stem>.{csv,json}` under `dir`.
pub fn write_outputs(dir: &Path, out: &Outputs) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(&out.report).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(dir.join("report.json"), json + "\n")?;
    if !out.traces.is_empty() {
        let tdir = dir.join("traces");
        std::fs::create_dir_all(&tdir)?;
        for (stem, trace) in &out.traces {
            let f = std::fs::File::create(tdir.join(format!("{stem}.csv")))?;
            trace.write_csv(std::io::BufWriter::new(f))?;
            trace.write_json(tdir.join(format!("{stem}.json")))?;
        }
    }
    Ok(())
}

fn family_basis(cfg: &ExperimentConfig, family: DlaFamily, n: usize) -> Result<Arc<DlaBasis>> {
    Ok(Arc::new(close_algebra(&family.generators(n), cfg.ansatz.family_cap(n))?))
}

fn default_family(family: HamiltonianFamily) -> Option<DlaFamily> {
    match family {
        HamiltonianFamily::Xy => Some(DlaFamily::Xy),
        HamiltonianFamily::Tfim | HamiltonianFamily::Ltfim => Some(DlaFamily::Tfim),
        HamiltonianFamily::File => None,
    }
}

fn hamiltonian(cfg: &ExperimentConfig, seed: u64) -> Result<Observable> {
    let n = cfg.hamiltonian.n_qubits;
    match cfg.hamiltonian.family {
        HamiltonianFamily::Xy => xy_hamiltonian(n, seed),
        HamiltonianFamily::Tfim => tfim_hamiltonian(n, seed),
        HamiltonianFamily::Ltfim => ltfim_hamiltonian(n, seed),
        HamiltonianFamily::File => {
            let path = cfg.hamiltonian.path.as_ref().expect("validated");
            load_observable(path)
        }
    }
}

fn trace_stem(task: &str, method: Method, k: usize, seed: u64) -> String {
    format!("{task}-{}-trial{k}-seed{seed}", method.name().replace('+', "-"))
}

/// Trains one method on `task`; `reduced` is the in-DLA part used by
/// pre-training.
fn run_method(
    cfg: &ExperimentConfig,
    method: Method,
    basis: &Arc<DlaBasis>,
    task: &Task,
    reduced: Option<&Observable>,
    tc: TrainConfig,
) -> Result<TrainTrace> {
    let n = basis.n_qubits();
    let a = &cfg.ansatz;
    let t = &cfg.training;
    let helia = |layers: usize| build_helia(n, layers, Some(basis.clone()), a.prelayer);
    match method {
        Method::FullPsr => train_full_psr(&helia(a.uq_layers)?, task, t.iterations, tc),
        Method::HeaPsr => {
            let hea = build_helia(n, a.uq_layers, None, a.prelayer)?;
            let mut tr = train_full_psr(&hea, task, t.iterations, tc)?;
            tr.method = "hea-psr".into();
            Ok(tr)
        }
        Method::Gsim => train_gsim_only(&helia(0)?, task, t.iterations, tc),
        Method::Alternate => train_alternate(&helia(a.uq_layers)?, task, t.iterations, tc),
        Method::Simultaneous => train_simultaneous(&helia(a.uq_layers)?, task, t.iterations, tc),
        Method::AltSim => train_alt_then_sim(&helia(a.uq_layers)?, task, t.alt_iterations, tc),
        Method::Pretrain => {
            let reduced = reduced.ok_or_else(|| {
                Error::InvalidArgument("pre-training needs an energy task".into())
            })?;
            pretrain_general(&helia(a.uq_layers)?, task, reduced, t.schedule, tc)
        }
    }
}

fn vqe_basis(cfg: &ExperimentConfig) -> Result<Arc<DlaBasis>> {
    let n = cfg.hamiltonian.n_qubits;
    match cfg.ansatz.dla.or(default_family(cfg.hamiltonian.family)) {
        Some(f) => family_basis(cfg, f, n),
        None => {
            let h = hamiltonian(cfg, cfg.seed)?;
            Ok(split_poly_dla(&h, cfg.ansatz.split_cap(h.n_qubits()))?.basis)
        }
    }
}

/// Ground-state search on one Hamiltonian per trial (or a fixed one), each
/// configured method started from the trial seed.
pub fn run_vqe(cfg: &ExperimentConfig) -> Result<(VqeResults, Vec<(String, TrainTrace)>)> {
    let basis = vqe_basis(cfg)?;
    let n = basis.n_qubits();
    if n != cfg.hamiltonian.n_qubits && cfg.hamiltonian.family != HamiltonianFamily::File {
        return Err(Error::QubitMismatch {
            left: cfg.hamiltonian.n_qubits,
            right: n,
        });
    }
    let methods = cfg.training.methods.clone();
    let per_trial: Vec<_> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let seed = cfg.trial_seed(k);
            let h_seed = cfg.hamiltonian.seed.unwrap_or(seed);
            let h = hamiltonian(cfg, h_seed)?;
            let exact = if h.n_qubits() <= EXACT_ENERGY_MAX_QUBITS {
                Some(ground_state(&h, 1e-10)?.0)
            } else {
                None
            };
            let reduced = if methods.contains(&Method::Pretrain) {
                Some(split_by_basis(&h, basis.clone())?.inside)
            } else {
                None
            };
            let task = Task::energy(h);
            let tc = cfg.training.train_config(seed);
            let traces = methods
                .iter()
                .map(|&m| run_method(cfg, m, &basis, &task, reduced.as_ref(), tc).map(|t| (m, t)))
                .collect::<Result<Vec<_>>>()?;
            Ok((seed, h_seed, exact, traces))
        })
        .collect::<Result<Vec<_>>>()?;

    let fixed = cfg.hamiltonian.seed.is_some() || cfg.hamiltonian.family == HamiltonianFamily::File;
    let global_min = per_trial
        .iter()
        .flat_map(|(_, _, _, ts)| ts.iter().map(|(_, t)| t.best_cost))
        .fold(f64::INFINITY, f64::min);
    let mut trials = Vec::with_capacity(per_trial.len());
    let mut traces = Vec::new();
    for (k, (seed, h_seed, exact, ts)) in per_trial.into_iter().enumerate() {
        let e_star = match exact {
            Some(e) => e,
            None if fixed => global_min,
            None => ts.iter().map(|(_, t)| t.best_cost).fold(f64::INFINITY, f64::min),
        };
        let outcomes = ts
            .iter()
            .map(|(m, t)| {
                Ok((
                    *m,
                    TrialOutcome {
                        relative_error: relative_error(t.best_cost, e_star)?,
                        best_qpu_calls: t.best_qpu_calls,
                        total_qpu_calls: t.total_qpu_calls(),
                    },
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        trials.push(VqeTrial {
            seed,
            hamiltonian_seed: (cfg.hamiltonian.family != HamiltonianFamily::File).then_some(h_seed),
            e_star,
            exact: exact.is_some(),
            outcomes,
        });
        for (m, t) in ts {
            traces.push((trace_stem("vqe", m, k, seed), t));
        }
    }

    let column = |m: Method| -> Vec<TrialOutcome> {
        trials
            .iter()
            .map(|t| t.outcomes.iter().find(|(x, _)| *x == m).expect("every trial runs every method").1)
            .collect()
    };
    let baseline = methods.contains(&Method::FullPsr).then_some(Method::FullPsr);
    let base_col = baseline.map(column);
    let e_star: Vec<f64> = trials.iter().map(|t| t.e_star).collect();
    let reports = methods
        .iter()
        .map(|&m| {
            let b = if Some(m) == baseline { None } else { base_col.as_deref() };
            MetricReport::summarize(m.name(), &column(m), b, e_star.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        VqeResults {
            n_qubits: n,
            coefficients: match cfg.hamiltonian.family {
                HamiltonianFamily::File => "file".into(),
                _ => "standard-normal".into(),
            },
            dla_dim: basis.dim(),
            theta_count: 2 * n * cfg.ansatz.uq_layers,
            baseline,
            methods: reports,
            trials,
        },
        traces,
    ))
}

/// Fraction of `samples` whose predicted label matches.
pub fn classification_accuracy(
    ansatz: &HeliaAnsatz,
    theta: &[f64],
    phi: &[f64],
    readout: &Observable,
    samples: &[(StateVector, f64)],
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let gates = ansatz.full_circuit();
    let params = ansatz.join(theta, phi);
    let mut hits = 0usize;
    for (s, y) in samples {
        let f = backend::expectation(&backend::run_circuit(&gates, &params, s)?, readout)?;
        if predict_label(f) == *y {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples.len() as f64)
}

/// Phase classification of bond-alternating Heisenberg ground states,
/// read out through a random DLA basis element per trial.
pub fn run_classification(cfg: &ExperimentConfig) -> Result<(ClassifyResults, Vec<(String, TrainTrace)>)> {
    let n = cfg.hamiltonian.n_qubits;
    let family = cfg.ansatz.dla.unwrap_or(DlaFamily::Xy);
    let basis = family_basis(cfg, family, n)?;
    let dataset_seed = cfg.classify.dataset_seed.unwrap_or(cfg.seed);
    let (train, test) = make_phase_dataset(n, cfg.classify.train, cfg.classify.test, dataset_seed)?;
    let pairs = |d: &crate::models::PhaseDataset| -> Vec<(StateVector, f64)> {
        d.samples.iter().map(|s| (s.state.clone(), s.label)).collect()
    };
    let (train, test) = (pairs(&train), pairs(&test));
    let methods = cfg.training.methods.clone();

    let per_trial: Vec<_> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let seed = cfg.trial_seed(k);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EAD_0075);
            let element = basis.element(rng.random_range(0..basis.dim())).clone();
            let readout = Observable::from_terms(n, [(element.clone(), 1.0)])?;
            let task = Task::Classification {
                readout,
                train: train.clone(),
                test: test.clone(),
            };
            let tc = cfg.training.train_config(seed);
            let traces = methods
                .iter()
                .map(|&m| run_method(cfg, m, &basis, &task, None, tc).map(|t| (m, t)))
                .collect::<Result<Vec<_>>>()?;
            Ok((seed, element.to_string(), traces))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut reports: Vec<ClassifyMethodReport> = methods
        .iter()
        .map(|m| ClassifyMethodReport {
            method: m.name().into(),
            peak_test_accuracy: Vec::new(),
            peak_test_accuracy_stats: MeanStd { mean: 0.0, std: 0.0 },
            final_train_loss: Vec::new(),
            total_qpu_calls: Vec::new(),
        })
        .collect();
    let mut readouts = Vec::new();
    let mut traces = Vec::new();
    for (k, (seed, element, ts)) in per_trial.into_iter().enumerate() {
        readouts.push(element);
        for (i, (m, t)) in ts.into_iter().enumerate() {
            let r = &mut reports[i];
            r.peak_test_accuracy.push(t.peak_test_accuracy().unwrap_or(0.0));
            r.final_train_loss.push(t.final_cost());
            r.total_qpu_calls.push(t.total_qpu_calls());
            traces.push((trace_stem("classify", m, k, seed), t));
        }
    }
    for r in &mut reports {
        r.peak_test_accuracy_stats = MeanStd::of(&r.peak_test_accuracy).expect("trials > 0");
    }
    Ok((
        ClassifyResults {
            n_qubits: n,
            dla: family,
            dla_dim: basis.dim(),
            dataset_seed,
            readouts,
            test_every: cfg.training.test_every,
            methods: reports,
        },
        traces,
    ))
}

fn log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if y.iter().any(|v| *v <= 0.0 || !v.is_finite()) {
        return None;
    }
    let ln: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_slope(x, &ln).ok()
}

#[derive(Default)]
struct BpSamples {
    theta: Vec<f64>,
    phi: Vec<f64>,
    hea: Vec<f64>,
}

fn bp_trial(cfg: &ExperimentConfig, n: usize, basis: &Arc<DlaBasis>, seed: u64) -> Result<BpSamples> {
    let mut cfg = cfg.clone();
    cfg.hamiltonian.n_qubits = n;
    let task = Task::energy(hamiltonian(&cfg, seed)?);
    let obs = task.observable();
    let tc = cfg.training.train_config(seed);
    let mut out = BpSamples::default();

    let helia = build_helia(n, cfg.ansatz.uq_layers, Some(basis.clone()), cfg.ansatz.prelayer)?;
    let mut t = Trainer::new(&helia, &task, "alt", tc)?;
    let coeffs = t.project(obs)?;
    for _ in 0..cfg.bp.iterations {
        t.step_alternate(obs, &coeffs)?;
        let (gt, gp) = t.last_gradients();
        if let Some(g) = gt.first() {
            out.theta.push(*g);
        }
        if let Some(g) = gp.first() {
            out.phi.push(*g);
        }
    }

    let hea = build_helia(n, cfg.bp.hea_layers, None, false)?;
    let mut t = Trainer::new(&hea, &task, "hea-psr", tc)?;
    for _ in 0..cfg.bp.iterations {
        t.step_full_psr(obs)?;
        if let Some(g) = t.last_gradients().0.first() {
            out.hea.push(*g);
        }
    }
    Ok(out)
}

/// Variance of the first `θ` and `φ` gradient of HELIA against the first
/// gradient of a deep hardware-efficient circuit, over every iteration of
/// every trial.
pub fn bp_variance_sweep(cfg: &ExperimentConfig) -> Result<BpResults> {
    let family = cfg
        .ansatz
        .dla
        .or(default_family(cfg.hamiltonian.family))
        .ok_or_else(|| Error::InvalidArgument("variance sweep needs a Hamiltonian family".into()))?;
    let mut rows = Vec::new();
    for &n in &cfg.bp.qubits {
        let basis = family_basis(cfg, family, n)?;
        let per_trial = (0..cfg.trials)
            .into_par_iter()
            .map(|k| bp_trial(cfg, n, &basis, cfg.trial_seed(k)))
            .collect::<Result<Vec<_>>>()?;
        let mut theta = RunningStats::default();
        let mut phi = RunningStats::default();
        let mut hea = RunningStats::default();
        for s in per_trial {
            s.theta.into_iter().for_each(|g| theta.push(g));
            s.phi.into_iter().for_each(|g| phi.push(g));
            s.hea.into_iter().for_each(|g| hea.push(g));
        }
        rows.push(BpRow {
            n_qubits: n,
            helia_theta_variance: theta.variance(),
            helia_phi_variance: phi.variance(),
            hea_variance: hea.variance(),
            samples: hea.count(),
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.n_qubits as f64).collect();
    let col = |f: fn(&BpRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let slopes = BpSlopes {
        helia_theta: log_slope(&x, &col(|r| r.helia_theta_variance)),
        helia_phi: log_slope(&x, &col(|r| r.helia_phi_variance)),
        hea: log_slope(&x, &col(|r| r.hea_variance)),
    };
    Ok(BpResults {
        dla: family,
        hea_layers: cfg.bp.hea_layers,
        rows,
        slopes,
    })
}

/// Mean and standard deviation of the DLA purity of `U_q|0⟩` over
/// parameters uniform on `[0, 2π)`.
pub fn average_purity(
    basis: &Arc<DlaBasis>,
    layers: usize,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    let n = basis.n_qubits();
    let gates: Vec<Gate> = yz_linear_layers(n, layers, 0);
    let mut stats = RunningStats::default();
    for _ in 0..samples {
        let theta: Vec<f64> = (0..2 * n * layers)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        let state = backend::run_circuit(&gates, &theta, &StateVector::zero(n))?;
        stats.push(state_purity(&state, basis)?);
    }
    Ok((stats.mean(), stats.variance().sqrt()))
}

pub fn purity_depth_sweep(cfg: &ExperimentConfig) -> Result<PurityResults> {
    let family = cfg.ansatz.dla.unwrap_or(DlaFamily::Xy);
    let p = &cfg.purity;
    let cells: Vec<(usize, usize, DepthProfile)> = p
        .qubits
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| p.profiles.iter().enumerate().map(move |(j, &pr)| (i * 64 + j, n, pr)))
        .collect();
    let rows = cells
        .into_par_iter()
        .map(|(cell, n, profile)| -> Result<PurityRow> {
            let basis = family_basis(cfg, family, n)?;
            let layers = profile.layers(n, p.constant_layers);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(cell as u64);
            let (mean, std) = average_purity(&basis, layers, p.samples, &mut rng)?;
            Ok(PurityRow {
                n_qubits: n,
                profile,
                layers,
                mean,
                std,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slopes = p
        .profiles
        .iter()
        .map(|&profile| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.profile == profile)
                .map(|r| (r.n_qubits as f64, r.mean))
                .unzip();
            PuritySlope {
                profile,
                slope: if x.len() < 2 { None } else { log_slope(&x, &y) },
            }
        })
        .collect();
    Ok(PurityResults {
        dla: family,
        samples: p.samples,
        rows,
        slopes,
    })
}

/// Basis of the configured DLA, or of the closure of a Hamiltonian file's
/// terms.
pub fn dla_info(cfg: &ExperimentConfig) -> Result<DlaInfo> {
    let (source, generators) = match cfg.ansatz.dla.or(default_family(cfg.hamiltonian.family)) {
        Some(f) => (
            format!("{f:?}").to_lowercase(),
            f.generators(cfg.hamiltonian.n_qubits),
        ),
        None => {
            let h = hamiltonian(cfg, cfg.seed)?;
            ("file".to_string(), h.terms().map(|(p, _)| p.clone()).collect())
        }
    };
    let n = generators.first().map_or(cfg.hamiltonian.n_qubits, |p| p.n_qubits());
    let cap = match cfg.ansatz.dla.or(default_family(cfg.hamiltonian.family)) {
        Some(_) => cfg.ansatz.family_cap(n),
        None => cfg.ansatz.split_cap(n),
    };
    let basis = close_algebra(&generators, cap)?;
    Ok(DlaInfo {
        n_qubits: basis.n_qubits(),
        source,
        generators: generators.iter().map(|p| p.to_string()).collect(),
        dimension: basis.dim(),
        basis: basis.elements().iter().map(|p| p.to_string()).collect(),
    })
}
