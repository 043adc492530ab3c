//! Matrix-free Lanczos eigensolver with full reorthogonalization and
//! explicit restarts from the current Ritz vector.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StateVector;
use crate::error::{Error, Result};
use crate::models::Observable;

pub const GROUND_STATE_QUBIT_BOUND: usize = 14;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Residual bound `‖Hx − λx‖`.
    pub tol: f64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub max_qubits: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            krylov_dim: 80,
            max_restarts: 200,
            max_qubits: GROUND_STATE_QUBIT_BOUND,
            seed: 0x9e37_79b9,
        }
    }
}

/// Lowest eigenpair of `obs` with residual at most `tol`.
pub fn ground_state(obs: &Observable, tol: f64) -> Result<(f64, StateVector)> {
    ground_state_with(
        obs,
        LanczosOptions {
            tol,
            ..Default::default()
        },
    )
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn apply(obs: &Observable, v: &[Complex64]) -> Vec<Complex64> {
    let s = StateVector {
        n_qubits: obs.n_qubits(),
        amps: v.to_vec(),
    };
    s.observable_action(obs)
}

pub fn ground_state_with(obs: &Observable, opts: LanczosOptions) -> Result<(f64, StateVector)> {
    let n = obs.n_qubits();
    if n > opts.max_qubits {
        return Err(Error::InvalidArgument(format!(
            "ground state requested for {n} qubits, bound is {}",
            opts.max_qubits
        )));
    }
    let dim = 1usize << n;
    let m = opts.krylov_dim.min(dim).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let s0 = norm(&start);
    start.iter_mut().for_each(|x| *x /= s0);

    let mut residual = f64::INFINITY;
    for _ in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            let mut w = apply(obs, &basis[j]);
            alpha.push(dot(&basis[j], &w).re);
            // two passes of classical Gram–Schmidt against the whole basis
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if j + 1 == m || b < 1e-12 * (1.0 + alpha[j].abs()) {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }

        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let y = eig.eigenvectors.column(imin);

        let mut x = vec![Complex64::new(0.0, 0.0); dim];
        for (i, v) in basis.iter().take(k).enumerate() {
            let yi = y[i];
            x.iter_mut().zip(v).for_each(|(a, b)| *a += b * yi);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|a| *a /= nx);

        let hx = apply(obs, &x);
        let energy = dot(&x, &hx).re;
        residual = hx
            .iter()
            .zip(&x)
            .map(|(h, v)| (h - v * energy).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= opts.tol {
            return Ok((
                energy,
                StateVector {
                    n_qubits: n,
                    amps: x,
                },
            ));
        }
        start = x;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_restarts,
        residual,
    })
}
