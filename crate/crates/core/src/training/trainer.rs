use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamConfig, OptimState};
use super::psr::psr_gradient;
use super::trace::{params_hash, IterationRecord, Phase, TrainTrace};
use crate::backend::{self, EvalMode, Gate, StateVector};
use crate::dla::{all_rotation_plans, RotationPlan};
use crate::error::{Error, Result};
use crate::gsim::{self, CoeffVector, ExpectationVector};
use crate::models::{HeliaAnsatz, Observable};

/// How circuit gradients are produced by the simulator. Both give the
/// parameter-shift values and are charged identically; `Adjoint` is a
/// simulator shortcut valid only for exact expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GradientEngine {
    #[default]
    Psr,
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub seed: u64,
    pub theta_adam: AdamConfig,
    pub phi_adam: AdamConfig,
    pub engine: GradientEngine,
    pub eval: EvalMode,
    /// Simultaneous phases stop once the best cost improves by less than
    /// `convergence_tol` over this many iterations.
    pub convergence_window: usize,
    pub convergence_tol: f64,
    pub sim_cap: usize,
    /// Test accuracy is evaluated on iterations divisible by this.
    pub test_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            theta_adam: AdamConfig::default(),
            phi_adam: AdamConfig::default(),
            engine: GradientEngine::Psr,
            eval: EvalMode::Exact,
            convergence_window: 20,
            convergence_tol: 1e-8,
            sim_cap: 2000,
            test_every: 10,
        }
    }
}

/// What the circuit is trained to do.
#[derive(Debug, Clone)]
pub enum Task {
    /// Minimize `⟨ψ|H|ψ⟩` starting from `initial`.
    Energy { hamiltonian: Observable, initial: StateVector },
    /// Mean squared error of the readout expectation against ±1 labels.
    Classification {
        readout: Observable,
        train: Vec<(StateVector, f64)>,
        test: Vec<(StateVector, f64)>,
    },
}

impl Task {
    pub fn energy(hamiltonian: Observable) -> Self {
        let initial = StateVector::zero(hamiltonian.n_qubits());
        Task::Energy { hamiltonian, initial }
    }

    /// The observable logged each iteration and optimized by default.
    pub fn observable(&self) -> &Observable {
        match self {
            Task::Energy { hamiltonian, .. } => hamiltonian,
            Task::Classification { readout, .. } => readout,
        }
    }

    fn inputs(&self) -> Vec<(&StateVector, f64)> {
        match self {
            Task::Energy { initial, .. } => vec![(initial, 0.0)],
            Task::Classification { train, .. } => train.iter().map(|(s, y)| (s, *y)).collect(),
        }
    }

    fn is_energy(&self) -> bool {
        matches!(self, Task::Energy { .. })
    }

    /// Loss and `∂loss/∂f_s` for model outputs `f`.
    fn loss_and_weights(&self, outputs: &[f64]) -> (f64, Vec<f64>) {
        match self {
            Task::Energy { .. } => (outputs[0], vec![1.0]),
            Task::Classification { train, .. } => {
                let n = train.len() as f64;
                let mut loss = 0.0;
                let w = outputs
                    .iter()
                    .zip(train)
                    .map(|(f, (_, y))| {
                        loss += (f - y) * (f - y);
                        2.0 * (f - y) / n
                    })
                    .collect();
                (loss / n, w)
            }
        }
    }
}

pub fn predict_label(output: f64) -> f64 {
    if output < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Parameters, optimizer moments, QPU counter and trace of one run.
pub struct Trainer<'a> {
    ansatz: &'a HeliaAnsatz,
    task: &'a Task,
    cfg: TrainConfig,
    gates: Vec<Gate>,
    plans: Vec<RotationPlan>,
    theta: Vec<f64>,
    phi: Vec<f64>,
    opt_theta: OptimState,
    opt_phi: OptimState,
    qpu_calls: u64,
    shots: u64,
    stream: u64,
    iteration: usize,
    trace: TrainTrace,
    fixed_expectations: Option<Vec<ExpectationVector>>,
    last_theta_grad: Vec<f64>,
    last_phi_grad: Vec<f64>,
}

impl<'a> Trainer<'a> {
    /// Draws `θ` then `φ` from N(0, 1) with the configured seed.
    pub fn new(ansatz: &'a HeliaAnsatz, task: &'a Task, method: &str, cfg: TrainConfig) -> Result<Self> {
        if task.observable().n_qubits() != ansatz.n_qubits() {
            return Err(Error::QubitMismatch {
                left: ansatz.n_qubits(),
                right: task.observable().n_qubits(),
            });
        }
        if let Task::Classification { train, .. } = task {
            if train.is_empty() {
                return Err(Error::InvalidArgument("empty training set".into()));
            }
        }
        if cfg.engine == GradientEngine::Adjoint && cfg.eval != EvalMode::Exact {
            return Err(Error::InvalidArgument(
                "the adjoint engine requires exact expectations".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| StandardNormal.sample(&mut rng)).collect() };
        let theta = draw(ansatz.theta_count());
        let phi = draw(ansatz.phi_count());
        let plans = match ansatz.basis() {
            Some(b) => all_rotation_plans(b)?,
            None => Vec::new(),
        };
        let mut t = Self {
            ansatz,
            task,
            cfg,
            gates: ansatz.full_circuit(),
            plans,
            opt_theta: OptimState::new(theta.len(), cfg.theta_adam),
            opt_phi: OptimState::new(phi.len(), cfg.phi_adam),
            theta,
            phi,
            qpu_calls: 0,
            shots: 0,
            stream: 0,
            iteration: 0,
            trace: TrainTrace::new(method, cfg.seed),
            fixed_expectations: None,
            last_theta_grad: Vec::new(),
            last_phi_grad: Vec::new(),
        };
        t.record(Phase::Init)?;
        Ok(t)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn qpu_calls(&self) -> u64 {
        self.qpu_calls
    }

    pub fn trace(&self) -> &TrainTrace {
        &self.trace
    }

    /// Gradients used by the most recent `θ` and `φ` updates.
    pub fn last_gradients(&self) -> (&[f64], &[f64]) {
        (&self.last_theta_grad, &self.last_phi_grad)
    }

    /// Overrides the current parameters (optimizer moments are kept).
    pub fn set_params(&mut self, theta: &[f64], phi: &[f64]) -> Result<()> {
        for (want, got) in [(self.theta.len(), theta.len()), (self.phi.len(), phi.len())] {
            if want != got {
                return Err(Error::LengthMismatch {
                    expected: want,
                    actual: got,
                });
            }
        }
        self.theta.copy_from_slice(theta);
        self.phi.copy_from_slice(phi);
        Ok(())
    }

    pub fn finish(mut self) -> TrainTrace {
        self.trace.final_theta = self.theta.clone();
        self.trace.final_phi = self.phi.clone();
        self.trace
    }

    fn charge(&mut self, circuits: u64) {
        self.qpu_calls += circuits;
        self.shots += circuits * self.cfg.eval.shots_per_circuit();
    }

    fn next_streams(&mut self, count: u64) -> u64 {
        let base = self
            .cfg
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(self.stream);
        self.stream += count;
        base
    }

    fn params(&self) -> Vec<f64> {
        self.ansatz.join(&self.theta, &self.phi)
    }

    fn require_basis(&self) -> Result<()> {
        if self.ansatz.basis().is_none() {
            return Err(Error::InvalidArgument("ansatz has no DLA block".into()));
        }
        Ok(())
    }

    /// Exact loss, and test accuracy for classification. Not charged.
    fn evaluate(&self) -> Result<(f64, Option<f64>)> {
        let params = self.params();
        let obs = self.task.observable();
        let outputs = self
            .task
            .inputs()
            .iter()
            .map(|(s, _)| backend::expectation(&backend::run_circuit(&self.gates, &params, s)?, obs))
            .collect::<Result<Vec<_>>>()?;
        let (loss, _) = self.task.loss_and_weights(&outputs);
        let due = self.cfg.test_every > 0 && self.iteration.is_multiple_of(self.cfg.test_every);
        let acc = match self.task {
            Task::Energy { .. } => None,
            Task::Classification { .. } if !due => None,
            Task::Classification { test, .. } => {
                let mut hits = 0usize;
                for (s, y) in test {
                    let f = backend::expectation(&backend::run_circuit(&self.gates, &params, s)?, obs)?;
                    if predict_label(f) == *y {
                        hits += 1;
                    }
                }
                Some(if test.is_empty() { 0.0 } else { hits as f64 / test.len() as f64 })
            }
        };
        Ok((loss, acc))
    }

    fn record(&mut self, phase: Phase) -> Result<()> {
        let (cost, test_accuracy) = self.evaluate()?;
        self.trace.push(IterationRecord {
            iteration: self.iteration,
            cost,
            theta_hash: params_hash(&self.theta),
            phi_hash: params_hash(&self.phi),
            qpu_calls: self.qpu_calls,
            shots: self.shots,
            phase,
            test_accuracy,
        });
        Ok(())
    }

    /// `∂loss/∂f_s`; for classification the outputs are read from the
    /// device, one circuit per sample.
    fn output_weights(&mut self, obs: &Observable) -> Result<Vec<f64>> {
        if self.task.is_energy() {
            return Ok(vec![1.0]);
        }
        let params = self.params();
        let inputs = self.task.inputs();
        let base = self.next_streams(inputs.len() as u64);
        let mut outputs = Vec::with_capacity(inputs.len());
        for (k, (s, _)) in inputs.iter().enumerate() {
            let state = backend::run_circuit(&self.gates, &params, s)?;
            outputs.push(self.cfg.eval.estimate(&state, obs, base.wrapping_add(k as u64))?);
        }
        self.charge(inputs.len() as u64);
        Ok(self.task.loss_and_weights(&outputs).1)
    }

    /// `Σ_s w_s ∂f_s/∂params[slots]`, two circuits per slot and sample.
    fn circuit_gradient(&mut self, obs: &Observable, slots: &[usize], weights: &[f64]) -> Result<Vec<f64>> {
        let params = self.params();
        let inputs = self.task.inputs();
        let mut grad = vec![0.0; slots.len()];
        for ((s, _), w) in inputs.iter().zip(weights) {
            let g = match self.cfg.engine {
                GradientEngine::Psr => {
                    let base = self.next_streams(2 * slots.len() as u64);
                    psr_gradient(&self.gates, &params, obs, s, slots, self.cfg.eval, base)?
                }
                GradientEngine::Adjoint => {
                    let (_, full) = backend::adjoint_gradient(&self.gates, &params, obs, s)?;
                    slots.iter().map(|&k| full[k]).collect()
                }
            };
            grad.iter_mut().zip(g).for_each(|(a, b)| *a += w * b);
        }
        self.charge(2 * slots.len() as u64 * inputs.len() as u64);
        Ok(grad)
    }

    /// DLA expectations after `U_q(theta)` and the prelayer, one circuit per
    /// basis element and sample.
    fn measure(&mut self, theta: &[f64]) -> Result<Vec<ExpectationVector>> {
        self.require_basis()?;
        let basis = self.ansatz.basis().expect("checked").clone();
        let inputs = self.task.inputs();
        let mut out = Vec::with_capacity(inputs.len());
        for (s, _) in &inputs {
            let block = self.ansatz.prepare_block_state(theta, s)?;
            let base = self.next_streams(basis.dim() as u64);
            out.push(gsim::measure_dla_expectations(&block, &basis, self.cfg.eval, base)?);
        }
        self.charge((basis.dim() * inputs.len()) as u64);
        Ok(out)
    }

    /// `∂loss/∂φ` from measured expectations; classical only.
    fn phi_gradient(&self, coeffs: &CoeffVector, measured: &[ExpectationVector]) -> Result<Vec<f64>> {
        let evolved = gsim::heisenberg_evolve(coeffs, &self.phi, &self.plans, gsim::Direction::Forward)?;
        let outputs = measured
            .iter()
            .map(|m| gsim::gsim_cost(&evolved, m))
            .collect::<Result<Vec<_>>>()?;
        let (_, w) = self.task.loss_and_weights(&outputs);
        let mut agg = ExpectationVector {
            basis: coeffs.basis.clone(),
            values: vec![0.0; coeffs.values.len()],
        };
        for (m, ws) in measured.iter().zip(&w) {
            agg.values.iter_mut().zip(&m.values).for_each(|(a, o)| *a += ws * o);
        }
        gsim::gsim_gradient(coeffs, &self.phi, &self.plans, &agg)
    }

    pub fn project(&self, obs: &Observable) -> Result<CoeffVector> {
        self.require_basis()?;
        gsim::project_observable(obs, self.ansatz.basis().expect("checked"))
    }

    fn theta_slots(&self) -> Vec<usize> {
        (0..self.ansatz.theta_count()).collect()
    }

    fn all_slots(&self) -> Vec<usize> {
        (0..self.ansatz.param_count()).collect()
    }

    /// Full-PSR gradient over every parameter: `(∂θ, ∂φ)`.
    pub fn full_gradient(&mut self, obs: &Observable) -> Result<(Vec<f64>, Vec<f64>)> {
        let w = self.output_weights(obs)?;
        let slots = self.all_slots();
        let mut g = self.circuit_gradient(obs, &slots, &w)?;
        let phi = g.split_off(self.ansatz.theta_count());
        Ok((g, phi))
    }

    /// Hybrid gradient at the current point: PSR on `θ`, g-sim on `φ` from
    /// expectations measured after `U_q(θ)`.
    pub fn simultaneous_gradient(&mut self, obs: &Observable, coeffs: &CoeffVector) -> Result<(Vec<f64>, Vec<f64>)> {
        let w = self.output_weights(obs)?;
        let slots = self.theta_slots();
        let g_theta = self.circuit_gradient(obs, &slots, &w)?;
        let theta = self.theta.clone();
        let measured = self.measure(&theta)?;
        let g_phi = self.phi_gradient(coeffs, &measured)?;
        Ok((g_theta, g_phi))
    }

    fn update_theta(&mut self, g: &[f64]) -> Result<()> {
        adam_step(&mut self.opt_theta, &mut self.theta, g)?;
        self.last_theta_grad = g.to_vec();
        Ok(())
    }

    fn update_phi(&mut self, g: &[f64]) -> Result<()> {
        adam_step(&mut self.opt_phi, &mut self.phi, g)?;
        self.last_phi_grad = g.to_vec();
        Ok(())
    }

    fn finish_step(&mut self, phase: Phase) -> Result<()> {
        self.iteration += 1;
        self.record(phase)
    }

    pub fn step_full_psr(&mut self, obs: &Observable) -> Result<()> {
        let (gt, gp) = self.full_gradient(obs)?;
        self.update_theta(&gt)?;
        self.update_phi(&gp)?;
        self.finish_step(Phase::PsrFull)
    }

    pub fn step_theta_psr(&mut self, obs: &Observable) -> Result<()> {
        let w = self.output_weights(obs)?;
        let slots = self.theta_slots();
        let g = self.circuit_gradient(obs, &slots, &w)?;
        self.update_theta(&g)?;
        self.finish_step(Phase::PsrUq)
    }

    pub fn step_alternate(&mut self, obs: &Observable, coeffs: &CoeffVector) -> Result<()> {
        let w = self.output_weights(obs)?;
        let slots = self.theta_slots();
        let g = self.circuit_gradient(obs, &slots, &w)?;
        self.update_theta(&g)?;
        let theta = self.theta.clone();
        let measured = self.measure(&theta)?;
        let gp = self.phi_gradient(coeffs, &measured)?;
        self.update_phi(&gp)?;
        self.finish_step(Phase::Alt)
    }

    pub fn step_simultaneous(&mut self, obs: &Observable, coeffs: &CoeffVector) -> Result<()> {
        let (gt, gp) = self.simultaneous_gradient(obs, coeffs)?;
        self.update_theta(&gt)?;
        self.update_phi(&gp)?;
        self.finish_step(Phase::Sim)
    }

    /// `φ`-only step against expectations of the fixed input states.
    /// Product inputs with no `U_q` are computed classically; data states
    /// are measured once, on first use.
    pub fn step_gsim_only(&mut self, coeffs: &CoeffVector) -> Result<()> {
        if self.fixed_expectations.is_none() {
            let theta = self.theta.clone();
            let analytic = self.task.is_energy() && self.ansatz.theta_count() == 0;
            let before = (self.qpu_calls, self.shots);
            let m = self.measure(&theta)?;
            if analytic {
                (self.qpu_calls, self.shots) = before;
            }
            self.fixed_expectations = Some(m);
        }
        let measured = self.fixed_expectations.take().expect("set above");
        let g = self.phi_gradient(coeffs, &measured);
        self.fixed_expectations = Some(measured);
        self.update_phi(&g?)?;
        self.finish_step(Phase::Gsim)
    }

    fn converged(&self, phase_start: usize) -> bool {
        let window = self.cfg.convergence_window;
        let recs = &self.trace.records;
        if window == 0 || recs.len() < phase_start + window {
            return false;
        }
        let cut = recs.len() - window;
        let before = recs[..cut].iter().map(|r| r.cost).fold(f64::INFINITY, f64::min);
        before - self.trace.best_cost < self.cfg.convergence_tol
    }

    /// Simultaneous steps until the convergence rule fires or `cap` is hit.
    pub fn run_simultaneous_until_converged(&mut self, obs: &Observable, cap: usize) -> Result<()> {
        let coeffs = self.project(obs)?;
        let start = self.trace.records.len();
        for _ in 0..cap {
            self.step_simultaneous(obs, &coeffs)?;
            if self.converged(start) {
                self.trace.stop_reason = "converged".into();
                return Ok(());
            }
        }
        self.trace.stop_reason = "budget".into();
        Ok(())
    }
}

pub fn train_full_psr(ansatz: &HeliaAnsatz, task: &Task, iterations: usize, cfg: TrainConfig) -> Result<TrainTrace> {
    let mut t = Trainer::new(ansatz, task, "full-psr", cfg)?;
    for _ in 0..iterations {
        t.step_full_psr(task.observable())?;
    }
    Ok(t.finish())
}

pub fn train_gsim_only(ansatz: &HeliaAnsatz, task: &Task, iterations: usize, cfg: TrainConfig) -> Result<TrainTrace> {
    let mut t = Trainer::new(ansatz, task, "gsim", cfg)?;
    let coeffs = t.project(task.observable())?;
    for _ in 0..iterations {
        t.step_gsim_only(&coeffs)?;
    }
    Ok(t.finish())
}

pub fn train_alternate(ansatz: &HeliaAnsatz, task: &Task, iterations: usize, cfg: TrainConfig) -> Result<TrainTrace> {
    let mut t = Trainer::new(ansatz, task, "alternate", cfg)?;
    let coeffs = t.project(task.observable())?;
    for _ in 0..iterations {
        t.step_alternate(task.observable(), &coeffs)?;
    }
    Ok(t.finish())
}

pub fn train_simultaneous(
    ansatz: &HeliaAnsatz,
    task: &Task,
    iterations: usize,
    cfg: TrainConfig,
) -> Result<TrainTrace> {
    let mut t = Trainer::new(ansatz, task, "simultaneous", cfg)?;
    let coeffs = t.project(task.observable())?;
    for _ in 0..iterations {
        t.step_simultaneous(task.observable(), &coeffs)?;
    }
    Ok(t.finish())
}

/// `alt_iterations` Alternate steps, then Simultaneous until convergence
/// or `cfg.sim_cap` further steps.
pub fn train_alt_then_sim(
    ansatz: &HeliaAnsatz,
    task: &Task,
    alt_iterations: usize,
    cfg: TrainConfig,
) -> Result<TrainTrace> {
    let mut t = Trainer::new(ansatz, task, "alt+sim", cfg)?;
    let obs = task.observable();
    let coeffs = t.project(obs)?;
    for _ in 0..alt_iterations {
        t.step_alternate(obs, &coeffs)?;
    }
    t.run_simultaneous_until_converged(obs, cfg.sim_cap)?;
    Ok(t.finish())
}

/// Iteration counts of the four pre-training phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PretrainSchedule {
    pub alternate: usize,
    pub simultaneous: usize,
    pub theta_only: usize,
    pub full: usize,
}

impl Default for PretrainSchedule {
    fn default() -> Self {
        Self {
            alternate: 250,
            simultaneous: 100,
            theta_only: 200,
            full: 1000,
        }
    }
}

impl PretrainSchedule {
    pub fn total(&self) -> usize {
        self.alternate + self.simultaneous + self.theta_only + self.full
    }
}

/// Alternate and Simultaneous on `reduced` (whose terms lie in the DLA),
/// then PSR on `θ` alone and on everything against the task observable.
/// Logged costs always use the task observable.
pub fn pretrain_general(
    ansatz: &HeliaAnsatz,
    task: &Task,
    reduced: &Observable,
    schedule: PretrainSchedule,
    cfg: TrainConfig,
) -> Result<TrainTrace> {
    let mut t = Trainer::new(ansatz, task, "pretrain", cfg)?;
    let coeffs = t.project(reduced)?;
    for _ in 0..schedule.alternate {
        t.step_alternate(reduced, &coeffs)?;
    }
    for _ in 0..schedule.simultaneous {
        t.step_simultaneous(reduced, &coeffs)?;
    }
    let full = task.observable();
    for _ in 0..schedule.theta_only {
        t.step_theta_psr(full)?;
    }
    for _ in 0..schedule.full {
        t.step_full_psr(full)?;
    }
    Ok(t.finish())
}
