//! Sensing geometry, primary-signal scenarios and spike-eigenvalue algebra.
//!
//! Under the signal hypothesis the population covariance of the received
//! vector is `σ_v² I + H Σ Hᴴ`. Its `P` non-unit eigenvalues, normalised by
//! the noise power, are the spikes `t_p = s_p / σ_v² + 1`, where `s_p` are the
//! non-zero eigenvalues of `H Σ Hᴴ`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};

/// Relative gap below which the two largest spikes are reported as tied.
const TIE_TOLERANCE: f64 = 1e-9;

/// Number of receivers `K`, samples `N` and assumed primary sources `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorDesign {
    receivers: usize,
    samples: usize,
    sources: usize,
}

impl DetectorDesign {
    /// A design with one primary source. Requires `1 <= K < N`.
    pub fn new(receivers: usize, samples: usize) -> Result<Self> {
        if receivers == 0 || samples == 0 {
            return Err(Error::domain("K and N must be positive"));
        }
        if receivers >= samples {
            return Err(Error::domain(format!(
                "K must be smaller than N so that c = K/N lies in (0,1), got K = {receivers}, N = {samples}"
            )));
        }
        Ok(DetectorDesign {
            receivers,
            samples,
            sources: 1,
        })
    }

    /// Sets the number of primary sources `P` (must satisfy `1 <= P < K`).
    pub fn with_sources(mut self, sources: usize) -> Result<Self> {
        if sources == 0 || sources >= self.receivers {
            return Err(Error::domain(format!(
                "number of sources P must satisfy 1 <= P < K = {}, got {sources}",
                self.receivers
            )));
        }
        self.sources = sources;
        Ok(self)
    }

    pub fn receivers(&self) -> usize {
        self.receivers
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn sources(&self) -> usize {
        self.sources
    }

    /// c = K / N.
    pub fn c(&self) -> f64 {
        self.receivers as f64 / self.samples as f64
    }

    /// c′ = (K − P) / N, the aspect ratio of the noise-only bulk under ℋ₁.
    pub fn c_prime(&self) -> f64 {
        (self.receivers - self.sources) as f64 / self.samples as f64
    }

    /// Phase-transition point 1 + √c.
    pub fn critical_spike(&self) -> f64 {
        1.0 + self.c().sqrt()
    }
}

/// Statistical model of the primary signal samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    #[default]
    Gaussian,
    Qpsk,
    QpskSrrc,
    PskNoncoherent,
    UniformComplex,
}

impl Modulation {
    pub const ALL: [Modulation; 5] = [
        Modulation::Gaussian,
        Modulation::Qpsk,
        Modulation::QpskSrrc,
        Modulation::PskNoncoherent,
        Modulation::UniformComplex,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Modulation::Gaussian => "gaussian",
            Modulation::Qpsk => "qpsk",
            Modulation::QpskSrrc => "qpsk_srrc",
            Modulation::PskNoncoherent => "psk_noncoherent",
            Modulation::UniformComplex => "uniform_complex",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Modulation::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| {
                Error::domain(format!(
                    "unknown modulation '{s}' (expected one of gaussian, qpsk, qpsk_srrc, psk_noncoherent, uniform_complex)"
                ))
            })
    }
}

/// Primary-signal scenario: channel `H` (K×P), per-source powers, noise power.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    channel: CMatrix,
    powers: Vec<f64>,
    noise_variance: f64,
    modulation: Modulation,
}

impl Scenario {
    pub fn new(
        channel: CMatrix,
        powers: Vec<f64>,
        noise_variance: f64,
        modulation: Modulation,
    ) -> Result<Self> {
        let (k, p) = (channel.rows(), channel.cols());
        if p == 0 || p >= k {
            return Err(Error::domain(format!(
                "scenario needs 1 <= P < K, got K = {k}, P = {p}"
            )));
        }
        if powers.len() != p {
            return Err(Error::domain(format!(
                "expected {p} source powers, got {}",
                powers.len()
            )));
        }
        if let Some(bad) = powers.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::domain(format!(
                "source powers must be positive and finite, got {bad}"
            )));
        }
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(Error::domain(format!(
                "noise variance must be positive, got {noise_variance}"
            )));
        }
        if channel
            .as_slice()
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::domain("channel matrix has non-finite entries"));
        }
        Ok(Scenario {
            channel,
            powers,
            noise_variance,
            modulation,
        })
    }

    /// One source with channel `h = (1, …, 1)` and power set so that the SNR is `snr`.
    pub fn single_source(
        receivers: usize,
        snr: f64,
        noise_variance: f64,
        modulation: Modulation,
    ) -> Result<Self> {
        if !(snr.is_finite() && snr > 0.0) {
            return Err(Error::domain(format!(
                "SNR must be positive for a signal scenario, got {snr}"
            )));
        }
        let h = CMatrix::from_fn(receivers, 1, |_, _| Complex64::new(1.0, 0.0));
        Scenario::new(h, vec![snr * noise_variance], noise_variance, modulation)
    }

    pub fn channel(&self) -> &CMatrix {
        &self.channel
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn receivers(&self) -> usize {
        self.channel.rows()
    }

    pub fn sources(&self) -> usize {
        self.channel.cols()
    }

    pub fn with_modulation(mut self, modulation: Modulation) -> Self {
        self.modulation = modulation;
        self
    }

    /// Multiplies the noise power and every source power by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Scenario::new(
            self.channel.clone(),
            self.powers.iter().map(|p| p * factor).collect(),
            self.noise_variance * factor,
            self.modulation,
        )
    }

    /// σ_p² ‖h_p‖² / (K σ_v²) for every source.
    pub fn per_source_snr(&self) -> Vec<f64> {
        let k = self.receivers() as f64;
        (0..self.sources())
            .map(|p| {
                let gain: f64 = self.channel.column(p).iter().map(|z| z.norm_sqr()).sum();
                self.powers[p] * gain / (k * self.noise_variance)
            })
            .collect()
    }

    /// The design matching this scenario's `K` and `P` for `samples` snapshots.
    pub fn design(&self, samples: usize) -> Result<DetectorDesign> {
        DetectorDesign::new(self.receivers(), samples)?.with_sources(self.sources())
    }
}

/// ρ = tr(H Σ Hᴴ) / (K σ_v²).
pub fn snr(scenario: &Scenario) -> f64 {
    scenario.per_source_snr().iter().sum()
}

/// SNR of the dominant component only, max_p σ_p² ‖h_p‖² / (K σ_v²).
pub fn approx_snr_dominant(scenario: &Scenario) -> f64 {
    scenario.per_source_snr().into_iter().fold(0.0, f64::max)
}

/// Spike eigenvalues of a scenario, with the bookkeeping needed downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeSpectrum {
    /// t_1 ≥ … ≥ t_P.
    pub spikes: Vec<f64>,
    /// Non-zero eigenvalues s_1 ≥ … ≥ s_P of H Σ Hᴴ.
    pub signal_eigs: Vec<f64>,
    pub snr: f64,
    /// 1 + √c.
    pub critical_value: f64,
    /// Set when t_1 and t_2 coincide to within 1e-9 relative.
    pub leading_tie: bool,
}

impl SpikeSpectrum {
    pub fn t1(&self) -> f64 {
        self.spikes[0]
    }

    pub fn is_identifiable(&self) -> bool {
        self.t1() > self.critical_value
    }
}

/// Spikes from the P×P matrix Σ^{1/2} HᴴH Σ^{1/2}, which shares its non-zero
/// eigenvalues with the K×K matrix H Σ Hᴴ.
pub fn spike_spectrum(scenario: &Scenario, design: &DetectorDesign) -> Result<SpikeSpectrum> {
    if design.receivers() != scenario.receivers() {
        return Err(Error::domain(format!(
            "design has K = {} receivers but the channel has {} rows",
            design.receivers(),
            scenario.receivers()
        )));
    }
    let p = scenario.sources();
    let h = scenario.channel();
    let root: Vec<f64> = scenario.powers().iter().map(|s| s.sqrt()).collect();
    let gram = &h.adjoint() * h;
    let reduced = CMatrix::from_fn(p, p, |i, j| gram[(i, j)] * (root[i] * root[j]));
    let eig = hermitian_eigen(&reduced)?;
    let signal_eigs: Vec<f64> = eig.values.iter().map(|s| s.max(0.0)).collect();
    let spikes: Vec<f64> = signal_eigs
        .iter()
        .map(|s| s / scenario.noise_variance() + 1.0)
        .collect();
    let leading_tie =
        spikes.len() > 1 && spikes[0] > 1.0 && (spikes[0] - spikes[1]) <= TIE_TOLERANCE * spikes[0];
    if leading_tie {
        log::warn!(
            "largest spike t1 = {} has multiplicity > 1; treating it as simple (Gaussian limit)",
            spikes[0]
        );
    }
    Ok(SpikeSpectrum {
        spikes,
        signal_eigs,
        snr: snr(scenario),
        critical_value: design.critical_spike(),
        leading_tie,
    })
}

/// t₁ = Kρ + 1 for a single source.
pub fn spike_from_snr(receivers: usize, snr: f64) -> Result<f64> {
    if !(snr.is_finite() && snr >= 0.0) {
        return Err(Error::domain(format!(
            "SNR must be a non-negative number, got {snr}"
        )));
    }
    Ok(receivers as f64 * snr + 1.0)
}

/// ρ = (t₁ − 1) / K for a single source.
pub fn snr_from_spike(receivers: usize, t1: f64) -> Result<f64> {
    if !(t1.is_finite() && t1 >= 1.0) {
        return Err(Error::domain(format!(
            "spike eigenvalue must be at least 1, got {t1}"
        )));
    }
    Ok((t1 - 1.0) / receivers as f64)
}

/// Strict phase-transition test t₁ > 1 + √c.
pub fn is_identifiable(t1: f64, design: &DetectorDesign) -> bool {
    t1 > design.critical_spike()
}

/// Smallest identifiable single-source SNR, 1/√(KN).
pub fn critical_snr(design: &DetectorDesign) -> f64 {
    critical_snr_for(design.receivers(), design.samples())
}

pub(crate) fn critical_snr_for(receivers: usize, samples: usize) -> f64 {
    1.0 / (receivers as f64 * samples as f64).sqrt()
}

/// Smallest N with ρ > 1/√(KN).
pub fn min_samples(receivers: usize, snr: f64) -> Result<usize> {
    if receivers == 0 {
        return Err(Error::domain("K must be positive"));
    }
    if !(snr.is_finite() && snr > 0.0) {
        return Err(Error::domain(format!("SNR must be positive, got {snr}")));
    }
    let estimate = (1.0 / (receivers as f64 * snr * snr)).floor();
    // Leave headroom for the adjustment loop below.
    if estimate.is_nan() || estimate >= (1u64 << 52) as f64 || estimate >= usize::MAX as f64 {
        return Err(Error::Range(format!(
            "minimum sample count for SNR {snr} exceeds the integer range"
        )));
    }
    let mut n = (estimate as usize).max(1);
    while critical_snr_for(receivers, n) >= snr {
        n += 1;
    }
    while n > 1 && critical_snr_for(receivers, n - 1) < snr {
        n -= 1;
    }
    Ok(n)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// JSON scenario document.
///
/// Full form: `K`, `N`, `sigma_v2`, `modulation`, `Sigma` (P powers) and `H`
/// (K rows of P `[re, im]` pairs). Shortcut form: `K`, `N`, `snr`, `P = 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioDocument {
    #[serde(rename = "K")]
    pub receivers: usize,
    #[serde(rename = "N")]
    pub samples: usize,
    #[serde(default = "unit")]
    pub sigma_v2: f64,
    #[serde(default)]
    pub modulation: Modulation,
    #[serde(rename = "Sigma", default, skip_serializing_if = "Option::is_none")]
    pub powers: Option<Vec<f64>>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr: Option<f64>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<usize>,
}

fn unit() -> f64 {
    1.0
}

impl ScenarioDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_scenario(scenario: &Scenario, samples: usize) -> Self {
        let h = scenario.channel();
        ScenarioDocument {
            receivers: scenario.receivers(),
            samples,
            sigma_v2: scenario.noise_variance(),
            modulation: scenario.modulation(),
            powers: Some(scenario.powers().to_vec()),
            channel: Some(
                (0..h.rows())
                    .map(|r| h.row(r).iter().map(|z| [z.re, z.im]).collect())
                    .collect(),
            ),
            snr: None,
            sources: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Validates the document and builds the design and scenario it describes.
    pub fn resolve(&self) -> Result<(DetectorDesign, Scenario)> {
        let scenario = match (&self.channel, &self.powers, self.snr) {
            (Some(rows), Some(powers), None) => {
                if rows.len() != self.receivers {
                    return Err(Error::domain(format!(
                        "H has {} rows but K = {}",
                        rows.len(),
                        self.receivers
                    )));
                }
                let p = powers.len();
                if let Some(bad) = rows.iter().position(|r| r.len() != p) {
                    return Err(Error::domain(format!(
                        "row {bad} of H does not have P = {p} entries"
                    )));
                }
                if let Some(declared) = self.sources {
                    if declared != p {
                        return Err(Error::domain(format!(
                            "P = {declared} disagrees with {p} entries in Sigma"
                        )));
                    }
                }
                let data = rows
                    .iter()
                    .flatten()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect();
                Scenario::new(
                    CMatrix::from_rows(self.receivers, p, data),
                    powers.clone(),
                    self.sigma_v2,
                    self.modulation,
                )?
            }
            (None, None, Some(snr)) => {
                if self.sources.unwrap_or(1) != 1 {
                    return Err(Error::domain("the snr shortcut form requires P = 1"));
                }
                Scenario::single_source(self.receivers, snr, self.sigma_v2, self.modulation)?
            }
            _ => {
                return Err(Error::domain(
                    "scenario must give either both H and Sigma, or snr with P = 1",
                ))
            }
        };
        Ok((scenario.design(self.samples)?, scenario))
    }
}
