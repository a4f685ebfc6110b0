//! Subcommand adapters over the core library.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use ebd_core::detection_perf::{
    build_lut, pfa, pmd, roc, threshold_from_pfa, write_roc_csv, RatioLaw,
};
use ebd_core::fmt::general;
use ebd_core::mc_sim::{
    cdf_comparison, rayleigh_scenario, run_trials_with, splitmix64, write_cdf_comparison,
    EmpiricalCdf, TrialInput, TrialOptions,
};
use ebd_core::rmt_dist::TracyWidomTable;
use ebd_core::spiked_model::{
    critical_snr, linear_to_db, min_samples, snr_from_spike, spike_from_snr, spike_spectrum,
    DetectorDesign, Modulation, Scenario, ScenarioDocument,
};
use ebd_core::{Error, Result};

use crate::args::{Command, DesignArgs, OptionalSignal};

/// Points in the empirical-vs-analytical CDF CSV.
const COMPARISON_POINTS: usize = 201;

/// Single-source signal description resolved from the flags.
enum Signal {
    None,
    Snr(f64),
    Spike(f64),
    Document(Scenario),
}

fn resolve(design: &DesignArgs, signal: &OptionalSignal) -> Result<(DetectorDesign, Signal)> {
    if let Some(path) = &signal.scenario {
        let (doc_design, scenario) = ScenarioDocument::load(path)?.resolve()?;
        for (flag, given, found) in [
            ("--k", design.k, doc_design.receivers()),
            ("--n", design.n, doc_design.samples()),
        ] {
            if given.is_some_and(|g| g != found) {
                return Err(Error::Domain(format!(
                    "{flag} disagrees with the scenario file ({found})"
                )));
            }
        }
        return Ok((doc_design, Signal::Document(scenario)));
    }
    let (Some(k), Some(n)) = (design.k, design.n) else {
        return Err(Error::Domain(
            "--k and --n are required without --scenario".into(),
        ));
    };
    let d = DetectorDesign::new(k, n)?;
    let s = match (signal.snr, signal.t1) {
        (Some(rho), _) => Signal::Snr(rho),
        (_, Some(t1)) => Signal::Spike(t1),
        _ => Signal::None,
    };
    Ok((d, s))
}

/// Largest spike of the signal description, with the design it applies to.
fn spike(design: DetectorDesign, signal: &Signal) -> Result<Option<(DetectorDesign, f64)>> {
    Ok(match signal {
        Signal::None => None,
        Signal::Snr(rho) => Some((design, spike_from_snr(design.receivers(), *rho)?)),
        Signal::Spike(t1) => Some((design, *t1)),
        Signal::Document(sc) => Some((design, spike_spectrum(sc, &design)?.t1())),
    })
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Threshold {
            design,
            pfa: target,
            signal,
        } => {
            let (d, sig) = resolve(&design, &signal)?;
            let gamma = threshold_from_pfa(target, &d)?;
            println!("gamma = {}", general(gamma, 12));
            if let Some((d, t1)) = spike(d, &sig)? {
                println!("t1 = {}", general(t1, 12));
                println!("pmd = {}", general(pmd(gamma, &d, t1)?, 12));
            }
        }
        Command::Pmd {
            design,
            gamma,
            signal,
        } => {
            let (d, sig) = resolve(&design, &(&signal).into())?;
            let (d, t1) = spike(d, &sig)?.expect("a signal flag is required by the parser");
            println!("pmd = {}", general(pmd(gamma, &d, t1)?, 12));
        }
        Command::Pfa { design, gamma } => {
            let (d, _) = resolve(
                &design,
                &OptionalSignal {
                    snr: None,
                    t1: None,
                    scenario: None,
                },
            )?;
            println!("pfa = {}", general(pfa(gamma, &d)?, 12));
        }
        Command::Identify { k, n, snr } => match (n, snr) {
            (Some(n), _) => {
                let d = DetectorDesign::new(k, n)?;
                let rho = critical_snr(&d);
                println!(
                    "critical SNR = {} ({:.2} dB)",
                    general(rho, 4),
                    linear_to_db(rho)
                );
                println!("critical t1 = {:.4}", d.critical_spike());
            }
            (None, Some(rho)) => {
                let n = min_samples(k, rho)?;
                println!("minimum N = {n}");
                println!("t1 = {}", general(spike_from_snr(k, rho)?, 10));
            }
            (None, None) => unreachable!("the parser requires --n or --snr"),
        },
        Command::Roc {
            design,
            signal,
            pfa_grid,
            out,
        } => {
            let (d, sig) = resolve(&design, &(&signal).into())?;
            let (d, t1) = spike(d, &sig)?.expect("a signal flag is required by the parser");
            let points = roc(&d, t1, &pfa_grid.points())?;
            let mut w = sink(out.as_deref())?;
            write_roc_csv(&points, &mut w)?;
            w.flush()?;
        }
        Command::Lut {
            k,
            n,
            pfa,
            snr,
            out,
        } => {
            let table = build_lut(&k, &n, &pfa, snr)?;
            let mut w = sink(out.as_deref())?;
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Simulate {
            design,
            signal,
            trials,
            seed,
            modulation,
            redraw_channel,
            out,
            dump,
        } => {
            let (d, sig) = resolve(&design, &signal)?;
            let (input, law) = simulation_setup(d, &sig, modulation, seed)?;
            let options = TrialOptions { redraw_channel };
            let batch = run_trials_with(&law.design, &input, trials, seed, options)?;
            let ecdf = EmpiricalCdf::new(batch.t_stat.clone());
            let ks = ecdf.ks_distance(|g| law.cdf(g))?;
            if let Some(t1) = law.t1 {
                println!("t1 = {}", general(t1, 10));
            }
            println!("trials = {}", trials);
            println!("KS = {}", general(ks, 6));
            if let Some(path) = out {
                let mut w = sink(Some(&path))?;
                write_cdf_comparison(
                    &cdf_comparison(&ecdf, |g| law.cdf(g), COMPARISON_POINTS),
                    &mut w,
                )?;
                w.flush()?;
            }
            if let Some(path) = dump {
                let mut w = sink(Some(&path))?;
                batch.write_csv(&mut w)?;
                w.flush()?;
            }
        }
        Command::TwTable { tolerance, out } => {
            let table = TracyWidomTable::build(tolerance)?;
            let mut w = sink(out.as_deref())?;
            table.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Trial input and the analytical law it is compared with. A bare SNR or
/// spike gets a Rayleigh channel drawn from the batch seed.
fn simulation_setup(
    d: DetectorDesign,
    sig: &Signal,
    modulation: Modulation,
    seed: u64,
) -> Result<(TrialInput, RatioLaw)> {
    let k = d.receivers();
    let scenario = match sig {
        Signal::None => {
            return Ok((
                TrialInput::NoiseOnly {
                    noise_variance: 1.0,
                },
                RatioLaw::h0(&d)?,
            ))
        }
        Signal::Snr(rho) => rayleigh_scenario(k, &[*rho], 1.0, modulation, splitmix64(!seed))?,
        Signal::Spike(t1) => rayleigh_scenario(
            k,
            &[snr_from_spike(k, *t1)?],
            1.0,
            modulation,
            splitmix64(!seed),
        )?,
        Signal::Document(sc) => sc.clone().with_modulation(modulation),
    };
    let d = scenario.design(d.samples())?;
    let t1 = spike_spectrum(&scenario, &d)?.t1();
    Ok((TrialInput::Signal(scenario), RatioLaw::h1(&d, t1)?))
}
