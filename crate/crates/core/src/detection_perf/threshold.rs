//! Threshold inversion, ROC curves and threshold look-up tables.

use std::io::Write;

use rayon::prelude::*;

use super::law::RatioLaw;
use crate::error::{Error, Result};
use crate::fmt::general;
use crate::spiked_model::{spike_from_snr, DetectorDesign};

const BRACKET: (f64, f64) = (1.0, 100.0);
const BISECTION_WIDTH: f64 = 1e-4;
const RESIDUAL_TOLERANCE: f64 = 1e-12;

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("{name} must lie in (0,1), got {p}")));
    }
    Ok(())
}

/// Solves `cdf(γ) = target` on `[1, 100]`: bisection down to a 1e-4 bracket,
/// then Illinois-style secant steps inside the bracket.
fn invert_cdf(law: &RatioLaw, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = BRACKET;
    let mut f_lo = law.cdf(lo) - target;
    let mut f_hi = law.cdf(hi) - target;
    if f_lo > 0.0 || f_hi < 0.0 || target >= 1.0 {
        return Err(Error::Range(format!(
            "target CDF value {target} is not attained for gamma in [{}, {}]",
            BRACKET.0, BRACKET.1
        )));
    }
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        let f = law.cdf(mid) - target;
        if f < 0.0 {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
            f_hi = f;
        }
    }
    let mut side = 0i8;
    let mut best = if f_lo.abs() < f_hi.abs() { lo } else { hi };
    for _ in 0..100 {
        if f_lo.abs().min(f_hi.abs()) <= RESIDUAL_TOLERANCE || hi - lo <= 1e-15 * hi {
            break;
        }
        let x = if f_hi != f_lo {
            (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        } else {
            0.5 * (lo + hi)
        };
        let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
        let f = law.cdf(x) - target;
        if f < 0.0 {
            lo = x;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        best = x;
        if f.abs() <= RESIDUAL_TOLERANCE {
            break;
        }
    }
    Ok(best)
}

/// γ(P_fa) = F_{T|ℋ₀}⁻¹(1 − P_fa).
pub fn threshold_from_pfa(target: f64, design: &DetectorDesign) -> Result<f64> {
    check_probability("pfa", target)?;
    threshold_for_law(&RatioLaw::h0(design)?, 1.0 - target)
}

/// The γ at which P_md(γ) = target for the spike `t1`.
pub fn threshold_from_pmd(target: f64, design: &DetectorDesign, t1: f64) -> Result<f64> {
    check_probability("pmd", target)?;
    threshold_for_law(&RatioLaw::h1(design, t1)?, target)
}

/// γ with `law.cdf(γ) = cdf_target`.
pub fn threshold_for_law(law: &RatioLaw, cdf_target: f64) -> Result<f64> {
    invert_cdf(law, cdf_target)
}

/// Complementary ROC: `(p, P_md(γ(p)))` for every `p` in the grid.
pub fn roc(design: &DetectorDesign, t1: f64, pfa_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    for &p in pfa_grid {
        check_probability("pfa", p)?;
    }
    let h0 = RatioLaw::h0(design)?;
    let h1 = RatioLaw::h1(design, t1)?;
    pfa_grid
        .iter()
        .map(|&p| {
            let gamma = invert_cdf(&h0, 1.0 - p)?;
            Ok((p, h1.cdf(gamma)))
        })
        .collect()
}

/// Writes a `pfa,pmd` CSV.
pub fn write_roc_csv<W: Write>(points: &[(f64, f64)], mut out: W) -> Result<()> {
    writeln!(out, "pfa,pmd")?;
    for (p, m) in points {
        writeln!(out, "{},{}", general(*p, 10), general(*m, 10))?;
    }
    Ok(())
}

/// One row of a threshold look-up table.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub receivers: usize,
    pub samples: usize,
    pub pfa: f64,
    /// The threshold, or the reason it could not be computed.
    pub gamma: std::result::Result<f64, String>,
    pub snr: Option<f64>,
    pub pmd: Option<std::result::Result<f64, String>>,
}

/// Look-up table of thresholds over a (K, N, P_fa) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    pub rows: Vec<ThresholdRow>,
}

impl ThresholdTable {
    pub fn has_snr(&self) -> bool {
        self.rows.iter().any(|r| r.snr.is_some())
    }

    /// CSV with header `K,N,pfa,gamma[,snr,pmd]`, `%.10g` numbers and `error`
    /// in place of values that failed.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let with_snr = self.has_snr();
        writeln!(
            out,
            "{}",
            if with_snr {
                "K,N,pfa,gamma,snr,pmd"
            } else {
                "K,N,pfa,gamma"
            }
        )?;
        let cell = |v: &std::result::Result<f64, String>| match v {
            Ok(x) => general(*x, 10),
            Err(_) => "error".to_string(),
        };
        for r in &self.rows {
            write!(
                out,
                "{},{},{},{}",
                r.receivers,
                r.samples,
                general(r.pfa, 10),
                cell(&r.gamma)
            )?;
            if with_snr {
                let snr = r.snr.map(|s| general(s, 10)).unwrap_or_default();
                let pmd = r.pmd.as_ref().map(cell).unwrap_or_default();
                write!(out, ",{snr},{pmd}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Thresholds for the Cartesian product of the lists, sorted by (K, N, P_fa).
///
/// With `snr`, each row also carries P_md at its threshold for a single
/// source with t₁ = Kρ + 1. Rows that fail keep their error and generation
/// continues; rows are evaluated in parallel and collected in order.
pub fn build_lut(
    k_list: &[usize],
    n_list: &[usize],
    pfa_list: &[f64],
    snr: Option<f64>,
) -> Result<ThresholdTable> {
    if k_list.is_empty() || n_list.is_empty() || pfa_list.is_empty() {
        return Err(Error::domain("K, N and pfa lists must all be non-empty"));
    }
    for &p in pfa_list {
        check_probability("pfa", p)?;
    }
    if let Some(s) = snr {
        spike_from_snr(1, s)?;
    }
    let mut ks = k_list.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut ps = pfa_list.to_vec();
    ps.sort_by(f64::total_cmp);
    ps.dedup();

    let cells: Vec<(usize, usize)> = ks
        .iter()
        .flat_map(|&k| ns.iter().map(move |&n| (k, n)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(k, n)| lut_cell(k, n, &ps, snr))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(ThresholdTable { rows })
}

fn lut_cell(k: usize, n: usize, pfas: &[f64], snr: Option<f64>) -> Vec<ThresholdRow> {
    let design = DetectorDesign::new(k, n);
    let h0 = design
        .as_ref()
        .map_err(|e| e.to_string())
        .and_then(|d| RatioLaw::h0(d).map_err(|e| e.to_string()));
    let h1 = snr.map(|s| {
        let d = design.as_ref().map_err(|e| e.to_string())?;
        let t1 = spike_from_snr(k, s).map_err(|e| e.to_string())?;
        RatioLaw::h1(d, t1).map_err(|e| e.to_string())
    });
    pfas.iter()
        .map(|&p| {
            let gamma = h0
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|law| invert_cdf(law, 1.0 - p).map_err(|e| e.to_string()));
            let pmd = h1.as_ref().map(|law| {
                let law = law.as_ref().map_err(Clone::clone)?;
                gamma.as_ref().map(|g| law.cdf(*g)).map_err(Clone::clone)
            });
            ThresholdRow {
                receivers: k,
                samples: n,
                pfa: p,
                gamma,
                snr,
                pmd,
            }
        })
        .collect()
}
