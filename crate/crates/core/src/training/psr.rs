use std::f64::consts::FRAC_PI_4;

use crate::backend::{self, EvalMode, Gate, StateVector};
use crate::error::{Error, Result};
use crate::models::Observable;

/// Locates the single gate driven by `slot` and its generator radius.
fn shift_target(gates: &[Gate], params: &[f64], slot: usize) -> Result<(usize, f64)> {
    if slot >= params.len() {
        return Err(Error::UnresolvedSlot {
            slot,
            len: params.len(),
        });
    }
    let mut found = None;
    for (pos, g) in gates.iter().enumerate() {
        if g.param_slot() == Some(slot) {
            if found.is_some() {
                return Err(Error::InvalidArgument(format!("slot {slot} drives several gates")));
            }
            let r = g.generator_radius().ok_or_else(|| {
                Error::InvalidArgument(format!("slot {slot} has no two-eigenvalue generator"))
            })?;
            found = Some((pos, r));
        }
    }
    found.ok_or_else(|| Error::InvalidArgument(format!("slot {slot} drives no gate")))
}

/// Parameter-shift gradient of `⟨ψ(params)|O|ψ(params)⟩` for the listed
/// slots, in the order given. Each slot costs two circuit evaluations;
/// under shot sampling evaluation `j` of slot `k` uses stream
/// `stream_base + 2k + j`.
pub fn psr_gradient(
    gates: &[Gate],
    params: &[f64],
    obs: &Observable,
    initial: &StateVector,
    slots: &[usize],
    mode: EvalMode,
    stream_base: u64,
) -> Result<Vec<f64>> {
    let mut targets: Vec<(usize, f64, usize)> = slots
        .iter()
        .enumerate()
        .map(|(k, &slot)| shift_target(gates, params, slot).map(|(pos, r)| (pos, r, k)))
        .collect::<Result<_>>()?;
    targets.sort_by_key(|t| t.0);

    let mut grad = vec![0.0; slots.len()];
    let mut prefix = initial.clone();
    let mut done = 0;
    for (pos, r, k) in targets {
        backend::run_in_place(&gates[done..pos], params, &mut prefix)?;
        done = pos;
        let gate = &gates[pos];
        let angle = params[slots[k]];
        let shift = FRAC_PI_4 / r;
        let mut values = [0.0; 2];
        for (j, sign) in [1.0, -1.0].into_iter().enumerate() {
            let mut s = prefix.clone();
            backend::apply_gate(&mut s, gate, angle + sign * shift)?;
            backend::run_in_place(&gates[pos + 1..], params, &mut s)?;
            values[j] = mode.estimate(&s, obs, stream_base.wrapping_add(2 * k as u64 + j as u64))?;
        }
        grad[k] = r * (values[0] - values[1]);
    }
    Ok(grad)
}
