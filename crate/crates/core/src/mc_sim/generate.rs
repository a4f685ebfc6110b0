//! Noise, primary-signal and channel generators.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

use super::rng::{splitmix64, SampleStream};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::spiked_model::{Modulation, Scenario};

/// SRRC roll-off factor.
pub const SRRC_ROLLOFF: f64 = 0.5;
/// SRRC oversampling factor.
pub const SRRC_SAMPLES_PER_SYMBOL: usize = 8;
/// SRRC truncation length in symbols.
pub const SRRC_SPAN_SYMBOLS: usize = 10;

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!(
            "{name} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

/// K×N matrix of i.i.d. CSCG noise with power `noise_variance`.
pub fn gen_noise(
    receivers: usize,
    samples: usize,
    noise_variance: f64,
    seed: u64,
) -> Result<CMatrix> {
    check_positive("noise variance", noise_variance)?;
    Ok(noise_from(
        &mut SampleStream::new(seed),
        receivers,
        samples,
        noise_variance,
    ))
}

pub(crate) fn noise_from(
    stream: &mut SampleStream,
    receivers: usize,
    samples: usize,
    variance: f64,
) -> CMatrix {
    CMatrix::from_fn(receivers, samples, |_, _| stream.cscg(variance))
}

/// P×N primary-signal matrix; row `p` has power `powers[p]`.
pub fn gen_signal(
    samples: usize,
    modulation: Modulation,
    powers: &[f64],
    seed: u64,
) -> Result<CMatrix> {
    for &s in powers {
        check_positive("source power", s)?;
    }
    Ok(signal_from(
        &mut SampleStream::new(seed),
        samples,
        modulation,
        powers,
    ))
}

pub(crate) fn signal_from(
    stream: &mut SampleStream,
    samples: usize,
    modulation: Modulation,
    powers: &[f64],
) -> CMatrix {
    let mut data = Vec::with_capacity(powers.len() * samples);
    for &power in powers {
        let sigma = power.sqrt();
        match modulation {
            Modulation::Gaussian => data.extend((0..samples).map(|_| stream.cscg(power))),
            Modulation::Qpsk => data.extend((0..samples).map(|_| qpsk_symbol(stream) * sigma)),
            Modulation::QpskSrrc => data.extend(srrc_row(stream, samples, sigma)),
            Modulation::PskNoncoherent => data
                .extend((0..samples).map(|_| Complex64::from_polar(sigma, TAU * stream.uniform()))),
            Modulation::UniformComplex => {
                let a = sigma * 1.5f64.sqrt();
                data.extend((0..samples).map(|_| {
                    let re = a * (2.0 * stream.uniform() - 1.0);
                    let im = a * (2.0 * stream.uniform() - 1.0);
                    Complex64::new(re, im)
                }))
            }
        }
    }
    CMatrix::from_rows(powers.len(), samples, data)
}

/// Unit-power QPSK symbol (±1 ± j)/√2.
fn qpsk_symbol(stream: &mut SampleStream) -> Complex64 {
    let re = if stream.bit() {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    };
    let im = if stream.bit() {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    };
    Complex64::new(re, im)
}

/// Unit-energy square-root raised-cosine taps, `span · sps + 1` of them.
pub fn srrc_taps() -> &'static [f64] {
    static TAPS: OnceLock<Vec<f64>> = OnceLock::new();
    TAPS.get_or_init(|| {
        let sps = SRRC_SAMPLES_PER_SYMBOL as f64;
        let beta = SRRC_ROLLOFF;
        let half = (SRRC_SPAN_SYMBOLS * SRRC_SAMPLES_PER_SYMBOL / 2) as i64;
        let mut g: Vec<f64> = (-half..=half)
            .map(|m| {
                let t = m as f64 / sps;
                if m == 0 {
                    1.0 - beta + 4.0 * beta / PI
                } else if ((4.0 * beta * t).abs() - 1.0).abs() < 1e-12 {
                    let arg = PI / (4.0 * beta);
                    beta / 2f64.sqrt()
                        * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos())
                } else {
                    ((PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos())
                        / (PI * t * (1.0 - (4.0 * beta * t).powi(2)))
                }
            })
            .collect();
        let energy: f64 = g.iter().map(|x| x * x).sum();
        g.iter_mut().for_each(|x| *x /= energy.sqrt());
        g
    })
}

/// QPSK symbols upsampled and shaped by the SRRC pulse, scaled so the average
/// power over a symbol period is σ².
fn srrc_row(stream: &mut SampleStream, samples: usize, sigma: f64) -> Vec<Complex64> {
    let taps = srrc_taps();
    let sps = SRRC_SAMPLES_PER_SYMBOL;
    let len = taps.len();
    let symbols: Vec<Complex64> = (0..(samples + len - 1).div_ceil(sps))
        .map(|_| qpsk_symbol(stream))
        .collect();
    let gain = sigma * (sps as f64).sqrt();
    (0..samples)
        .map(|n| {
            // Output n sees upsampled inputs n .. n + len - 1 once the filter is full.
            let last = n + len - 1;
            let mut acc = Complex64::new(0.0, 0.0);
            let first_symbol = n.div_ceil(sps);
            for s in first_symbol..=last / sps {
                acc += symbols[s] * taps[last - s * sps];
            }
            acc * gain
        })
        .collect()
}

fn raw_channel(receivers: usize, sources: usize, seed: u64) -> CMatrix {
    let mut seed = seed;
    loop {
        let h = noise_from(&mut SampleStream::new(seed), receivers, sources, 1.0);
        if (0..sources).all(|p| h.column(p).iter().any(|z| z.norm_sqr() > 0.0)) {
            return h;
        }
        seed = splitmix64(seed);
    }
}

/// Rayleigh-fading K×P channel, scaled jointly so that with unit source powers
/// the scenario SNR is exactly `target_snr`.
pub fn gen_channel(
    receivers: usize,
    sources: usize,
    target_snr: f64,
    noise_variance: f64,
    seed: u64,
) -> Result<CMatrix> {
    check_positive("target SNR", target_snr)?;
    check_positive("noise variance", noise_variance)?;
    let h = raw_channel(receivers, sources, seed);
    let gain = h.frobenius_norm().powi(2);
    Ok(h.scale((target_snr * receivers as f64 * noise_variance / gain).sqrt()))
}

/// Rayleigh-fading channel whose column `p` alone gives SNR `targets[p]` with
/// unit source powers.
pub fn gen_channel_per_source(
    receivers: usize,
    targets: &[f64],
    noise_variance: f64,
    seed: u64,
) -> Result<CMatrix> {
    for &t in targets {
        check_positive("target SNR", t)?;
    }
    check_positive("noise variance", noise_variance)?;
    let h = raw_channel(receivers, targets.len(), seed);
    let scales: Vec<f64> = targets
        .iter()
        .enumerate()
        .map(|(p, t)| {
            let gain: f64 = h.column(p).iter().map(|z| z.norm_sqr()).sum();
            (t * receivers as f64 * noise_variance / gain).sqrt()
        })
        .collect();
    Ok(CMatrix::from_fn(receivers, targets.len(), |r, c| {
        h[(r, c)] * scales[c]
    }))
}

/// Scenario with a freshly drawn Rayleigh channel, unit source powers and the
/// given per-source SNRs.
pub fn rayleigh_scenario(
    receivers: usize,
    per_source_snr: &[f64],
    noise_variance: f64,
    modulation: Modulation,
    seed: u64,
) -> Result<Scenario> {
    let h = gen_channel_per_source(receivers, per_source_snr, noise_variance, seed)?;
    Scenario::new(
        h,
        vec![1.0; per_source_snr.len()],
        noise_variance,
        modulation,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spiked_model::{snr, spike_spectrum, DetectorDesign};

    fn power(m: &CMatrix) -> f64 {
        m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / m.as_slice().len() as f64
    }

    #[test]
    fn noise_moments_and_circularity() {
        let v = gen_noise(100, 10_000, 2.5, 3).unwrap();
        assert!((power(&v) / 2.5 - 1.0).abs() < 0.01);
        let n = v.as_slice().len() as f64;
        let re2: f64 = v.as_slice().iter().map(|z| z.re * z.re).sum::<f64>() / n;
        let im2: f64 = v.as_slice().iter().map(|z| z.im * z.im).sum::<f64>() / n;
        let cross: f64 = v.as_slice().iter().map(|z| z.re * z.im).sum::<f64>() / n;
        assert!((re2 / 1.25 - 1.0).abs() < 0.01 && (im2 / 1.25 - 1.0).abs() < 0.01);
        assert!((cross / (re2 * im2).sqrt()).abs() <= 0.01);
        assert_eq!(v, gen_noise(100, 10_000, 2.5, 3).unwrap());
        assert!(gen_noise(2, 2, 0.0, 3).is_err());
    }

    #[test]
    fn every_modulation_has_the_requested_power() {
        for m in Modulation::ALL {
            let s = gen_signal(1_000_000, m, &[0.7], 11).unwrap();
            let mean: Complex64 = s.as_slice().iter().sum::<Complex64>() / 1e6;
            assert!((power(&s) / 0.7 - 1.0).abs() < 0.01, "{m}: {}", power(&s));
            assert!(mean.norm() < 0.01, "{m}");
        }
    }

    #[test]
    fn fourth_moments() {
        let kurtosis = |m| {
            let s = gen_signal(200_000, m, &[2.0], 5).unwrap();
            s.as_slice()
                .iter()
                .map(|z| z.norm_sqr().powi(2))
                .sum::<f64>()
                / 200_000.0
                / 4.0
        };
        assert!((kurtosis(Modulation::Qpsk) - 1.0).abs() < 1e-12);
        assert!((kurtosis(Modulation::PskNoncoherent) - 1.0).abs() < 1e-12);
        assert!((kurtosis(Modulation::Gaussian) - 2.0).abs() < 0.05);
    }

    #[test]
    fn uniform_fourth_moment_matches_closed_form() {
        let sigma2 = 1.3;
        let n = 10_000_000;
        let s = gen_signal(n, Modulation::UniformComplex, &[sigma2], 17).unwrap();
        let m4 = s.as_slice().iter().map(|z| z.re.powi(4)).sum::<f64>() / n as f64;
        let a = (sigma2 * 1.5f64).sqrt();
        assert!((m4 / (a.powi(4) / 5.0) - 1.0).abs() < 0.005);
        assert!((a.powi(4) / 5.0 - 1.8 * (sigma2 / 2.0).powi(2)).abs() < 1e-12);
        let bound = s
            .as_slice()
            .iter()
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(0.0, f64::max);
        assert!(bound <= a);
    }

    #[test]
    fn srrc_taps_are_unit_energy_and_symmetric() {
        let g = srrc_taps();
        assert_eq!(g.len(), 81);
        assert!((g.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..g.len() {
            assert!((g[i] - g[g.len() - 1 - i]).abs() < 1e-15);
        }
        // Nyquist: the raised cosine g * g vanishes at non-zero symbol lags.
        let rc = |lag: usize| g.iter().zip(&g[lag..]).map(|(a, b)| a * b).sum::<f64>();
        for k in 1..4 {
            assert!(rc(8 * k).abs() < 0.01, "lag {k}: {}", rc(8 * k));
        }
    }

    #[test]
    fn signal_rows_are_uncorrelated() {
        let s = gen_signal(200_000, Modulation::QpskSrrc, &[1.0, 1.0], 21).unwrap();
        let c: Complex64 = s
            .row(0)
            .iter()
            .zip(s.row(1))
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            / 200_000.0;
        assert!(c.norm() < 0.01);
    }

    #[test]
    fn channel_normalisation() {
        let h = gen_channel(50, 1, 0.01, 1.0, 4).unwrap();
        assert_eq!(h, gen_channel(50, 1, 0.01, 1.0, 4).unwrap());
        let sc = Scenario::new(h, vec![1.0], 1.0, Modulation::Gaussian).unwrap();
        assert!((snr(&sc) - 0.01).abs() < 1e-12);
        let design = DetectorDesign::new(50, 1000).unwrap();
        assert!((spike_spectrum(&sc, &design).unwrap().t1() - 1.5).abs() < 1e-9);

        let sc = rayleigh_scenario(50, &[0.06, 0.04], 2.0, Modulation::Gaussian, 8).unwrap();
        let per = sc.per_source_snr();
        assert!((per[0] - 0.06).abs() < 1e-12 && (per[1] - 0.04).abs() < 1e-12);
        let h = gen_channel(20, 3, 0.5, 2.0, 9).unwrap();
        let sc = Scenario::new(h, vec![1.0; 3], 2.0, Modulation::Gaussian).unwrap();
        assert!((snr(&sc) - 0.5).abs() < 1e-12);
    }
}
