//! Empirical CDFs and Kolmogorov-Smirnov distances.

use std::io::Write;

use super::trials::TrialBatch;
use crate::error::{Error, Result};
use crate::fmt::sci;

/// Smallest sample accepted by [`ks_distance`].
pub const MIN_KS_SAMPLES: usize = 100;

/// Right-continuous step CDF of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
}

impl EmpiricalCdf {
    /// NaN entries (failed trials) are dropped.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.retain(|x| !x.is_nan());
        values.sort_by(f64::total_cmp);
        EmpiricalCdf { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// #{xᵢ ≤ x} / n.
    pub fn eval(&self, x: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.partition_point(|v| *v <= x) as f64 / self.values.len() as f64
    }

    /// Smallest sample value whose CDF reaches `p`.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        if self.values.is_empty() || !(0.0..=1.0).contains(&p) {
            return None;
        }
        let idx = ((p * self.values.len() as f64).ceil() as usize).clamp(1, self.values.len()) - 1;
        Some(self.values[idx])
    }

    /// sup over the sample points of |F_n(xᵢ) − F(xᵢ)|.
    pub fn ks_distance(&self, law: impl Fn(f64) -> f64) -> Result<f64> {
        let n = self.values.len();
        if n < MIN_KS_SAMPLES {
            return Err(Error::domain(format!(
                "KS distance needs at least {MIN_KS_SAMPLES} samples, got {n}"
            )));
        }
        let mut d = 0.0f64;
        let mut i = 0;
        while i < n {
            let x = self.values[i];
            let mut j = i + 1;
            while j < n && self.values[j] == x {
                j += 1;
            }
            d = d.max((j as f64 / n as f64 - law(x)).abs());
            i = j;
        }
        Ok(d)
    }
}

/// KS distance between the batch's ratio statistics and `law`.
pub fn ks_distance(batch: &TrialBatch, law: impl Fn(f64) -> f64) -> Result<f64> {
    EmpiricalCdf::new(batch.t_stat.clone()).ks_distance(law)
}

/// `(γ, empirical, analytical)` on `points` equally spaced values spanning the sample.
pub fn cdf_comparison(
    ecdf: &EmpiricalCdf,
    law: impl Fn(f64) -> f64,
    points: usize,
) -> Vec<(f64, f64, f64)> {
    let (Some(&lo), Some(&hi)) = (ecdf.values().first(), ecdf.values().last()) else {
        return Vec::new();
    };
    let points = points.max(2);
    (0..points)
        .map(|i| {
            let g = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            (g, ecdf.eval(g), law(g))
        })
        .collect()
}

/// Writes a `gamma,empirical,analytical` CSV.
pub fn write_cdf_comparison<W: Write>(rows: &[(f64, f64, f64)], mut out: W) -> Result<()> {
    writeln!(out, "gamma,empirical,analytical")?;
    for (g, e, a) in rows {
        writeln!(out, "{},{},{}", sci(*g, 12), sci(*e, 12), sci(*a, 12))?;
    }
    Ok(())
}
