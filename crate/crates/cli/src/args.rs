//! Command-line syntax: flags, SNR values, grids and lists.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ebd_core::spiked_model::{db_to_linear, Modulation};

#[derive(Debug, Parser)]
#[command(
    name = "ebd",
    version,
    about = "Design and validation of the eigenvalue-ratio detector"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold for a target false-alarm probability (and P_md with a signal).
    Threshold {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        pfa: f64,
        #[command(flatten)]
        signal: OptionalSignal,
    },
    /// Missed-detection probability at a threshold.
    Pmd {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        signal: RequiredSignal,
    },
    /// False-alarm probability at a threshold.
    Pfa {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        gamma: f64,
    },
    /// Critical SNR for (K, N), or the minimum N for (K, SNR).
    Identify {
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with = "snr", required_unless_present = "snr")]
        n: Option<usize>,
        #[arg(long, value_parser = parse_snr, allow_hyphen_values = true)]
        snr: Option<f64>,
    },
    /// ROC curve (P_fa, P_md) over a P_fa grid, as CSV.
    Roc {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        signal: RequiredSignal,
        #[arg(long, value_parser = parse_grid)]
        pfa_grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold look-up table over K, N and P_fa lists, as CSV.
    Lut {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        pfa: Vec<f64>,
        #[arg(long, value_parser = parse_snr, allow_hyphen_values = true)]
        snr: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo batch compared with the analytical law; prints the KS distance.
    Simulate {
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        signal: OptionalSignal,
        #[arg(long, default_value_t = 5000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = Modulation::Gaussian)]
        modulation: Modulation,
        /// Draw a new channel for every trial.
        #[arg(long)]
        redraw_channel: bool,
        /// Empirical-vs-analytical CDF CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-trial eigenvalue dump CSV.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Tabulated Tracy-Widom CDF and density, as CSV.
    TwTable {
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// K and N, which a scenario file may supply instead.
#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
pub struct OptionalSignal {
    /// Linear (0.01) or decibel (-20dB) SNR of a single source.
    #[arg(long, value_parser = parse_snr, allow_hyphen_values = true)]
    pub snr: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    /// JSON scenario document.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct RequiredSignal {
    #[arg(long, value_parser = parse_snr, allow_hyphen_values = true)]
    pub snr: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

impl From<&RequiredSignal> for OptionalSignal {
    fn from(s: &RequiredSignal) -> Self {
        OptionalSignal {
            snr: s.snr,
            t1: s.t1,
            scenario: s.scenario.clone(),
        }
    }
}

/// `0.01` or `-20dB` (case-insensitive suffix) to a linear SNR.
pub fn parse_snr(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let lower = t.to_ascii_lowercase();
    let (number, db) = match lower.strip_suffix("db") {
        Some(head) => (head.trim(), true),
        None => (t, false),
    };
    let v: f64 = number
        .parse()
        .map_err(|_| format!("cannot read SNR '{text}'"))?;
    let v = if db { db_to_linear(v) } else { v };
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("SNR must be positive, got '{text}'"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        (0..self.count)
            .map(|i| {
                let f = i as f64 / (self.count - 1) as f64;
                if self.log {
                    (self.lo.ln() + f * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + f * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

/// `lo:hi:count[log|lin]`, linear when no suffix is given.
pub fn parse_grid(text: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(format!(
            "grid '{text}' is not of the form lo:hi:count[log|lin]"
        ));
    };
    let (count, log) = if let Some(c) = count.strip_suffix("log") {
        (c, true)
    } else {
        (count.strip_suffix("lin").unwrap_or(count), false)
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad grid start '{lo}'"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad grid end '{hi}'"))?;
    let count: usize = count
        .parse()
        .map_err(|_| format!("bad grid count '{count}'"))?;
    if count == 0 || lo.is_nan() || hi.is_nan() || lo > hi || (log && lo <= 0.0) {
        return Err(format!(
            "grid '{text}' needs count >= 1, lo <= hi and lo > 0 on a log scale"
        ));
    }
    Ok(Grid { lo, hi, count, log })
}
