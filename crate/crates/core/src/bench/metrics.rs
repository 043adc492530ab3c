use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SUCCESS_THRESHOLD: f64 = 1e-3;

/// `|(e − e_star) / e_star|`.
pub fn relative_error(e: f64, e_star: f64) -> Result<f64> {
    if e_star == 0.0 {
        return Err(Error::InvalidArgument("reference energy is zero".into()));
    }
    Ok(((e - e_star) / e_star).abs())
}

/// Fraction of errors strictly below `threshold`.
pub fn success_rate(errors: &[f64], threshold: f64) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::InvalidArgument("no trials".into()));
    }
    Ok(errors.iter().filter(|e| **e < threshold).count() as f64 / errors.len() as f64)
}

/// Percentage of baseline calls saved; negative when the method used more.
pub fn qpu_reduction(method_calls: u64, psr_calls: u64) -> Result<f64> {
    if psr_calls == 0 {
        return Err(Error::InvalidArgument("baseline made no QPU calls".into()));
    }
    Ok(100.0 * (1.0 - method_calls as f64 / psr_calls as f64))
}

/// Quantile by linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

/// Streaming mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / self.count as f64
        }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::default();
        iter.into_iter().for_each(|x| s.push(x));
        s
    }
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let s: RunningStats = values.iter().copied().collect();
    (s.mean(), s.variance().sqrt())
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument("slope fit needs two or more paired points".into()));
    }
    let (mx, _) = mean_std(x);
    let (my, _) = mean_std(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("slope fit needs distinct x values".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        Some(Self {
            q25: quantile(values, 0.25)?,
            median: quantile(values, 0.5)?,
            q75: quantile(values, 0.75)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let (mean, std) = mean_std(values);
        Some(Self { mean, std })
    }
}

/// Per-method summary over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub method: String,
    pub trials: usize,
    pub success_fraction: f64,
    /// Over successful trials only; absent when none succeeded.
    pub relative_error_successful: Option<Quartiles>,
    pub relative_error_all: Quartiles,
    /// At each trial's best-energy point, against the baseline's.
    pub qpu_reduction_all: Option<MeanStd>,
    pub qpu_reduction_successful: Option<MeanStd>,
    /// Total calls over the whole budget, against the baseline's.
    pub qpu_reduction_total: Option<MeanStd>,
    pub e_star: Vec<f64>,
}

/// One trial's outcome for one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub relative_error: f64,
    pub best_qpu_calls: u64,
    pub total_qpu_calls: u64,
}

impl MetricReport {
    /// `baseline` holds the reference method's outcomes for the same
    /// trials; QPU reductions are omitted without it.
    pub fn summarize(
        method: &str,
        outcomes: &[TrialOutcome],
        baseline: Option<&[TrialOutcome]>,
        e_star: Vec<f64>,
    ) -> Result<Self> {
        let errors: Vec<f64> = outcomes.iter().map(|o| o.relative_error).collect();
        let success_fraction = success_rate(&errors, SUCCESS_THRESHOLD)?;
        let ok: Vec<usize> = (0..errors.len()).filter(|&i| errors[i] < SUCCESS_THRESHOLD).collect();
        let ok_errors: Vec<f64> = ok.iter().map(|&i| errors[i]).collect();
        let (mut all, mut succ, mut total) = (None, None, None);
        if let Some(base) = baseline {
            if base.len() != outcomes.len() {
                return Err(Error::LengthMismatch {
                    expected: outcomes.len(),
                    actual: base.len(),
                });
            }
            let best: Vec<f64> = outcomes
                .iter()
                .zip(base)
                .map(|(o, b)| qpu_reduction(o.best_qpu_calls, b.best_qpu_calls))
                .collect::<Result<_>>()?;
            let tot: Vec<f64> = outcomes
                .iter()
                .zip(base)
                .map(|(o, b)| qpu_reduction(o.total_qpu_calls, b.total_qpu_calls))
                .collect::<Result<_>>()?;
            all = MeanStd::of(&best);
            succ = MeanStd::of(&ok.iter().map(|&i| best[i]).collect::<Vec<_>>());
            total = MeanStd::of(&tot);
        }
        Ok(Self {
            method: method.into(),
            trials: outcomes.len(),
            success_fraction,
            relative_error_successful: Quartiles::of(&ok_errors),
            relative_error_all: Quartiles::of(&errors).expect("nonempty"),
            qpu_reduction_all: all,
            qpu_reduction_successful: succ,
            qpu_reduction_total: total,
            e_star,
        })
    }
}
