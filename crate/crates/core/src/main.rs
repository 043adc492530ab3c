use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use helia::bench::experiments::{run, write_outputs, Results};
use helia::bench::{ExperimentConfig, TaskKind};
use helia::Error;

#[derive(Parser)]
#[command(name = "helia", version, about = "Hybrid PSR / g-sim training experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state search
    Vqe(Common),
    /// Phase classification of bond-alternating Heisenberg chains
    Classify(Common),
    /// Gradient variance against qubit count
    BpVariance(Common),
    /// DLA purity of random hardware-efficient circuits against depth
    Purity(Common),
    /// Dimension and basis of a DLA
    DlaInfo(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config, or a JSON report whose embedded config is re-run
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Directory for report.json and traces
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shots per circuit, or `exact`
    #[arg(long, value_parser = parse_shots)]
    shots: Option<Shots>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Register size
    #[arg(long)]
    qubits: Option<usize>,
}

#[derive(Clone, Copy)]
enum Shots {
    Exact,
    Count(u64),
}

fn parse_shots(s: &str) -> Result<Shots, String> {
    if s == "exact" {
        return Ok(Shots::Exact);
    }
    s.parse::<u64>()
        .ok()
        .filter(|n| *n > 0)
        .map(Shots::Count)
        .ok_or_else(|| format!("expected a positive shot count or `exact`, got {s:?}"))
}

const EXIT_CONFIG: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_COMPONENT: u8 = 5;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("helia: {msg}");
    ExitCode::from(code)
}

fn code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_COMPONENT,
    }
}

fn load_config(task: TaskKind, c: &Common) -> Result<ExperimentConfig, (u8, String)> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| {
            let code = if matches!(e, Error::Io(_)) { EXIT_IO } else { EXIT_CONFIG };
            (code, format!("{}: {e}", path.display()))
        })?,
        None => ExperimentConfig::new(task),
    };
    cfg.task = task;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    if let Some(j) = c.jobs {
        cfg.run.jobs = j;
    }
    if let Some(o) = &c.out {
        cfg.run.out = Some(o.clone());
    }
    if let Some(n) = c.qubits {
        cfg.hamiltonian.n_qubits = n;
    }
    match c.shots {
        Some(Shots::Exact) => cfg.training.shots = None,
        Some(Shots::Count(n)) => cfg.training.shots = Some(n),
        None => {}
    }
    cfg.validate().map_err(|e| (EXIT_CONFIG, e.to_string()))?;
    Ok(cfg)
}

fn summarize(results: &Results) {
    match results {
        Results::Vqe(r) => {
            println!("n = {}, dim(g) = {}, p = {}", r.n_qubits, r.dla_dim, r.theta_count);
            for m in &r.methods {
                let red = m
                    .qpu_reduction_all
                    .as_ref()
                    .map_or("-".to_string(), |s| format!("{:.2} ± {:.2}%", s.mean, s.std));
                println!(
                    "{:<9} success {:.3}  median rel. error {:.3e}  QPU reduction {red}",
                    m.method, m.success_fraction, m.relative_error_all.median
                );
            }
        }
        Results::Classify(r) => {
            println!("n = {}, dla = {:?}, dim(g) = {}", r.n_qubits, r.dla, r.dla_dim);
            for m in &r.methods {
                let s = &m.peak_test_accuracy_stats;
                println!("{:<9} peak test accuracy {:.3} ± {:.3}", m.method, s.mean, s.std);
            }
        }
        Results::BpVariance(r) => {
            println!("n  var(dθ)       var(dφ)       var(HEA{})", r.hea_layers);
            for row in &r.rows {
                println!(
                    "{:<2} {:.6e}  {:.6e}  {:.6e}",
                    row.n_qubits, row.helia_theta_variance, row.helia_phi_variance, row.hea_variance
                );
            }
            println!(
                "slopes of ln var: θ {:?}  φ {:?}  HEA {:?}",
                r.slopes.helia_theta, r.slopes.helia_phi, r.slopes.hea
            );
        }
        Results::Purity(r) => {
            for row in &r.rows {
                println!(
                    "n = {:<2} {:<11} layers {:<2} purity {:.6e} ± {:.2e}",
                    row.n_qubits,
                    format!("{:?}", row.profile).to_lowercase(),
                    row.layers,
                    row.mean,
                    row.std
                );
            }
        }
        Results::DlaInfo(d) => {
            println!("dimension {}", d.dimension);
            for p in &d.basis {
                println!("{p}");
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, common) = match &cli.command {
        Command::Vqe(c) => (TaskKind::Vqe, c),
        Command::Classify(c) => (TaskKind::Classify, c),
        Command::BpVariance(c) => (TaskKind::BpVariance, c),
        Command::Purity(c) => (TaskKind::Purity, c),
        Command::DlaInfo(c) => (TaskKind::DlaInfo, c),
    };
    let cfg = match load_config(task, common) {
        Ok(c) => c,
        Err((code, msg)) => return fail(code, msg),
    };
    let out = match run(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(code_for(&e), e),
    };
    summarize(&out.report.results);
    if let Some(dir) = &cfg.run.out {
        if let Err(e) = write_outputs(dir, &out) {
            return fail(EXIT_IO, e);
        }
        println!("report written to {}", dir.join("report.json").display());
    }
    ExitCode::SUCCESS
}
