//! Batches of independent sensing trials.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::generate::{gen_channel_per_source, noise_from, signal_from};
use super::rng::{splitmix64, trial_seed, SampleStream};
use crate::error::{Error, Result};
use crate::fmt::{general, sci};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::spiked_model::{snr, DetectorDesign, Scenario};

/// Largest tolerated fraction of failed eigen-solves in a batch.
const MAX_FAILURE_RATE: f64 = 1e-3;

/// What is received: noise alone, or a primary signal through a channel.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialInput {
    NoiseOnly { noise_variance: f64 },
    Signal(Scenario),
}

impl TrialInput {
    pub fn noise_variance(&self) -> f64 {
        match self {
            TrialInput::NoiseOnly { noise_variance } => *noise_variance,
            TrialInput::Signal(s) => s.noise_variance(),
        }
    }

    pub fn scenario(&self) -> Option<&Scenario> {
        match self {
            TrialInput::NoiseOnly { .. } => None,
            TrialInput::Signal(s) => Some(s),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOptions {
    /// Draw a new Rayleigh channel for every trial, keeping each source's SNR.
    /// By default the scenario's channel is held for the whole batch.
    pub redraw_channel: bool,
}

/// Extreme eigenvalues and ratio statistic of every trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialBatch {
    pub design: DetectorDesign,
    pub input: TrialInput,
    pub seed: u64,
    pub trials: usize,
    pub lambda_max: Vec<f64>,
    pub lambda_min: Vec<f64>,
    pub t_stat: Vec<f64>,
    /// Indices of trials whose eigen-solve failed; their entries are NaN.
    pub failed: Vec<usize>,
}

impl TrialBatch {
    /// Ratio statistics of the trials that succeeded.
    pub fn statistics(&self) -> Vec<f64> {
        self.t_stat
            .iter()
            .copied()
            .filter(|t| !t.is_nan())
            .collect()
    }

    pub fn mean_lambda_max(&self) -> f64 {
        mean(&self.lambda_max)
    }

    pub fn mean_lambda_min(&self) -> f64 {
        mean(&self.lambda_min)
    }

    /// Dump with a `#` comment line recording the batch parameters, then
    /// `trial,lambda_max,lambda_min,t`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let (modulation, rho) = match self.input.scenario() {
            Some(s) => (s.modulation().name(), general(snr(s), 10)),
            None => ("none", "0".to_string()),
        };
        writeln!(
            out,
            "# K={} N={} seed={} modulation={} snr={}",
            self.design.receivers(),
            self.design.samples(),
            self.seed,
            modulation,
            rho
        )?;
        writeln!(out, "trial,lambda_max,lambda_min,t")?;
        for i in 0..self.trials {
            writeln!(
                out,
                "{},{},{},{}",
                i,
                sci(self.lambda_max[i], 12),
                sci(self.lambda_min[i], 12),
                sci(self.t_stat[i], 12)
            )?;
        }
        Ok(())
    }
}

fn mean(xs: &[f64]) -> f64 {
    let good: Vec<f64> = xs.iter().copied().filter(|x| !x.is_nan()).collect();
    good.iter().sum::<f64>() / good.len() as f64
}

/// R(N) = Y Yᴴ / N.
pub fn sample_covariance(y: &CMatrix) -> CMatrix {
    let (k, n) = (y.rows(), y.cols());
    let mut r = CMatrix::zeros(k, k);
    for i in 0..k {
        let yi = y.row(i);
        for j in i..k {
            let yj = y.row(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in yi.iter().zip(yj) {
                acc += a * b.conj();
            }
            r[(i, j)] = acc / n as f64;
            if j != i {
                r[(j, i)] = (acc / n as f64).conj();
            }
        }
        r[(i, i)].im = 0.0;
    }
    r
}

/// Y = H S + V for one trial, drawing S then V from `stream`.
pub fn received_samples(
    design: &DetectorDesign,
    input: &TrialInput,
    channel: Option<&CMatrix>,
    stream: &mut SampleStream,
) -> CMatrix {
    let (k, n) = (design.receivers(), design.samples());
    match input {
        TrialInput::NoiseOnly { noise_variance } => noise_from(stream, k, n, *noise_variance),
        TrialInput::Signal(sc) => {
            let h = channel.unwrap_or(sc.channel());
            let s = signal_from(stream, n, sc.modulation(), sc.powers());
            let mut y = noise_from(stream, k, n, sc.noise_variance());
            let data = y.as_mut_slice();
            for r in 0..k {
                let out = &mut data[r * n..(r + 1) * n];
                for q in 0..sc.sources() {
                    let hrq = h[(r, q)];
                    for (z, sv) in out.iter_mut().zip(s.row(q)) {
                        *z += hrq * sv;
                    }
                }
            }
            y
        }
    }
}

fn one_trial(
    design: &DetectorDesign,
    input: &TrialInput,
    options: TrialOptions,
    seed: u64,
) -> Result<(f64, f64)> {
    let redrawn = match (input, options.redraw_channel) {
        (TrialInput::Signal(sc), true) => {
            // Unit-power targets ρ_p / σ_p² keep every source's SNR with its own power.
            let targets: Vec<f64> = sc
                .per_source_snr()
                .iter()
                .zip(sc.powers())
                .map(|(r, p)| r / p)
                .collect();
            Some(gen_channel_per_source(
                sc.receivers(),
                &targets,
                sc.noise_variance(),
                splitmix64(!seed),
            )?)
        }
        _ => None,
    };
    let mut stream = SampleStream::new(seed);
    let y = received_samples(design, input, redrawn.as_ref(), &mut stream);
    let eig = hermitian_eigenvalues(&sample_covariance(&y))?;
    Ok((eig[0], eig[eig.len() - 1]))
}

/// Runs `trials` independent trials. Trial `i` uses the stream seeded with
/// `trial_seed(seed, i)`, so the batch is identical whatever the thread count.
pub fn run_trials(
    design: &DetectorDesign,
    input: &TrialInput,
    trials: usize,
    seed: u64,
) -> Result<TrialBatch> {
    run_trials_with(design, input, trials, seed, TrialOptions::default())
}

pub fn run_trials_with(
    design: &DetectorDesign,
    input: &TrialInput,
    trials: usize,
    seed: u64,
    options: TrialOptions,
) -> Result<TrialBatch> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    if !(input.noise_variance().is_finite() && input.noise_variance() > 0.0) {
        return Err(Error::domain(format!(
            "noise variance must be positive, got {}",
            input.noise_variance()
        )));
    }
    if let TrialInput::Signal(sc) = input {
        if sc.receivers() != design.receivers() {
            return Err(Error::domain(format!(
                "scenario has {} receivers but the design has {}",
                sc.receivers(),
                design.receivers()
            )));
        }
    }
    let outcomes: Vec<Result<(f64, f64)>> = (0..trials)
        .into_par_iter()
        .map(|i| one_trial(design, input, options, trial_seed(seed, i as u64)))
        .collect();

    let mut batch = TrialBatch {
        design: *design,
        input: input.clone(),
        seed,
        trials,
        lambda_max: Vec::with_capacity(trials),
        lambda_min: Vec::with_capacity(trials),
        t_stat: Vec::with_capacity(trials),
        failed: Vec::new(),
    };
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((hi, lo)) if lo > 0.0 => {
                batch.lambda_max.push(hi);
                batch.lambda_min.push(lo);
                batch.t_stat.push(hi / lo);
            }
            Ok(_) | Err(Error::Numeric(_)) => {
                batch.failed.push(i);
                batch.lambda_max.push(f64::NAN);
                batch.lambda_min.push(f64::NAN);
                batch.t_stat.push(f64::NAN);
            }
            Err(e) => return Err(e),
        }
    }
    if batch.failed.len() as f64 > MAX_FAILURE_RATE * trials as f64 {
        return Err(Error::numeric(format!(
            "{} of {} trials failed, more than the tolerated {}%",
            batch.failed.len(),
            trials,
            MAX_FAILURE_RATE * 100.0
        )));
    }
    if !batch.failed.is_empty() {
        log::warn!(
            "{} of {} trials failed and were marked",
            batch.failed.len(),
            trials
        );
    }
    Ok(batch)
}
