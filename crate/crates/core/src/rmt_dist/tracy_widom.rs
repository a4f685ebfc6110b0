//! Tracy-Widom law of order 2 from the Hastings-McLeod solution of Painlevé II.
//!
//! With `q'' = u q + 2 q³`, `q(u) ~ -Ai(u)` as `u → ∞`, the CDF is
//! `F(x) = exp(-∫ₓ^∞ (u - x) q²(u) du)`. Writing `I(x) = ∫ₓ^∞ q²` and
//! `J(x) = ∫ₓ^∞ (u - x) q²`, the state `(q, q', I, J)` obeys
//! `I' = -q²`, `J' = -I`, so a single backward integration yields
//! `F = exp(-J)` and `f = F · I` on the whole grid.

use std::io::Write;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fmt::sci;
use crate::special::airy_ai_pair;

use super::ode::Dopri5;

/// Boundary point where the Hastings-McLeod solution is matched to `-Ai`.
pub const BOUNDARY: f64 = 8.0;
pub const LEFT_EDGE: f64 = -10.0;
/// Tolerance of the shared table behind [`tw2_cdf`] and friends.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const GRID_STEP: f64 = 0.005;
const QUANTILE_TOLERANCE: f64 = 1e-9;

/// Tabulated Tracy-Widom (β = 2) CDF and density on a uniform grid.
#[derive(Debug, Clone)]
pub struct TracyWidomTable {
    grid: Vec<f64>,
    cdf_values: Vec<f64>,
    pdf_values: Vec<f64>,
    /// d/dx of the density, used as Hermite slopes.
    pdf_slopes: Vec<f64>,
    build_tolerance: f64,
}

impl TracyWidomTable {
    /// Integrates Painlevé II backward from [`BOUNDARY`] to [`LEFT_EDGE`].
    pub fn build(tolerance: f64) -> Result<Self> {
        if !(1e-12..=1e-4).contains(&tolerance) {
            return Err(Error::domain(format!(
                "table tolerance must lie in [1e-12, 1e-4], got {tolerance}"
            )));
        }
        let intervals = ((BOUNDARY - LEFT_EDGE) / GRID_STEP).round() as usize;
        let n = intervals + 1;
        let (i0, j0) = airy_tail_integrals(BOUNDARY);
        let (ai, aip) = airy_ai_pair(BOUNDARY)?;
        let mut state = [-ai, -aip, i0, j0];

        let rhs = |u: f64, y: &[f64; 4]| {
            let q = y[0];
            [y[1], u * q + 2.0 * q * q * q, -q * q, -y[2]]
        };
        let mut ode = Dopri5::<4>::new(tolerance, tolerance * 1e-6, GRID_STEP);

        // Filled from the right edge leftwards, reversed at the end.
        let mut rows = Vec::with_capacity(n);
        rows.push((BOUNDARY, state));
        for k in 1..n {
            let x_prev = BOUNDARY - (k - 1) as f64 * GRID_STEP;
            let x = BOUNDARY - k as f64 * GRID_STEP;
            state = ode.advance(&rhs, x_prev, x, state).map_err(|e| {
                Error::numeric(format!(
                    "Painlevé II integration failed between {x_prev} and {x}: {e}"
                ))
            })?;
            rows.push((x, state));
        }
        rows.reverse();

        let mut grid = Vec::with_capacity(n);
        let mut cdf_values = Vec::with_capacity(n);
        let mut pdf_values = Vec::with_capacity(n);
        let mut pdf_slopes = Vec::with_capacity(n);
        for (x, [q, _, i, j]) in rows {
            let cdf = (-j).exp();
            grid.push(x);
            cdf_values.push(cdf);
            pdf_values.push(cdf * i);
            pdf_slopes.push(cdf * (i * i - q * q));
        }
        Ok(TracyWidomTable {
            grid,
            cdf_values,
            pdf_values,
            pdf_slopes,
            build_tolerance: tolerance,
        })
    }

    /// The process-wide table built at [`DEFAULT_TOLERANCE`].
    pub fn standard() -> &'static TracyWidomTable {
        static TABLE: OnceLock<TracyWidomTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            TracyWidomTable::build(DEFAULT_TOLERANCE).expect("default Tracy-Widom table must build")
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf_values
    }

    pub fn pdf_values(&self) -> &[f64] {
        &self.pdf_values
    }

    pub fn build_tolerance(&self) -> f64 {
        self.build_tolerance
    }

    fn left(&self) -> f64 {
        self.grid[0]
    }

    fn right(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Cell index and local coordinate for Hermite interpolation.
    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let pos = (x - self.left()) / GRID_STEP;
        let i = (pos.floor() as usize).min(self.grid.len() - 2);
        let h = self.grid[i + 1] - self.grid[i];
        (i, (x - self.grid[i]) / h, h)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.left() {
            return 0.0;
        }
        if x >= self.right() {
            return right_tail(x).0;
        }
        let (i, t, h) = self.locate(x);
        let v = hermite(
            t,
            h,
            self.cdf_values[i],
            self.cdf_values[i + 1],
            self.pdf_values[i],
            self.pdf_values[i + 1],
        );
        v.clamp(0.0, 1.0)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.left() {
            return 0.0;
        }
        if x >= self.right() {
            return right_tail(x).1;
        }
        let (i, t, h) = self.locate(x);
        let v = hermite(
            t,
            h,
            self.pdf_values[i],
            self.pdf_values[i + 1],
            self.pdf_slopes[i],
            self.pdf_slopes[i + 1],
        );
        v.max(0.0)
    }

    /// Inverse CDF by bisection, to `|F(x) - p| <= 1e-9`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "probability must lie in (0,1), got {p}"
            )));
        }
        let (mut lo, mut hi) = (self.left(), self.right());
        if p < self.cdf(lo) || p > self.cdf(hi) {
            return Err(Error::Range(format!(
                "probability {p} lies outside the tabulated Tracy-Widom range"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let f = self.cdf(mid);
            if (f - p).abs() <= QUANTILE_TOLERANCE * 1e-3 || hi - lo < 1e-14 {
                return Ok(mid);
            }
            if f < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Mean and variance by Simpson's rule on the tabulated density.
    pub fn moments(&self) -> (f64, f64) {
        let m0 = self.simpson(|_, f| f);
        let m1 = self.simpson(|x, f| x * f) / m0;
        let m2 = self.simpson(|x, f| (x - m1).powi(2) * f) / m0;
        (m1, m2)
    }

    /// Trapezoidal integral of the tabulated density.
    pub fn pdf_mass(&self) -> f64 {
        self.pdf_values
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]) * GRID_STEP)
            .sum()
    }

    fn simpson(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.grid.len();
        let mut s =
            g(self.grid[0], self.pdf_values[0]) + g(self.grid[n - 1], self.pdf_values[n - 1]);
        for i in 1..n - 1 {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(self.grid[i], self.pdf_values[i]);
        }
        // Odd point count is guaranteed by the grid construction.
        s * GRID_STEP / 3.0
    }

    /// Writes `x,cdf,pdf` rows with `%.12e` formatting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,cdf,pdf")?;
        for ((x, c), p) in self.grid.iter().zip(&self.cdf_values).zip(&self.pdf_values) {
            writeln!(out, "{},{},{}", sci(*x, 12), sci(*c, 12), sci(*p, 12))?;
        }
        Ok(())
    }
}

/// `(∫ₓ^∞ Ai², ∫ₓ^∞ (u - x) Ai²)` in closed form.
fn airy_tail_integrals(x: f64) -> (f64, f64) {
    match airy_ai_pair(x) {
        Ok((ai, aip)) => {
            let i = aip * aip - x * ai * ai;
            let j = (2.0 * x * x * ai * ai - 2.0 * x * aip * aip - ai * aip) / 3.0;
            (i, j)
        }
        // Beyond |u| = 200 the Airy tail is far below f64 resolution.
        Err(_) => (0.0, 0.0),
    }
}

/// (cdf, pdf) beyond the boundary, where q = -Ai to working precision.
fn right_tail(x: f64) -> (f64, f64) {
    let (i, j) = airy_tail_integrals(x);
    let cdf = (-j).exp();
    (cdf, cdf * i)
}

fn hermite(t: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Tracy-Widom CDF from the shared table.
pub fn tw2_cdf(x: f64) -> f64 {
    TracyWidomTable::standard().cdf(x)
}

pub fn tw2_pdf(x: f64) -> f64 {
    TracyWidomTable::standard().pdf(x)
}

pub fn tw2_quantile(p: f64) -> Result<f64> {
    TracyWidomTable::standard().quantile(p)
}
