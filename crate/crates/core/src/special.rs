//! Airy function of the first kind and the standard normal law.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Ai(0) = 3^{-2/3} / Γ(2/3).
const AI_0: f64 = 0.355_028_053_887_817_2;
/// -Ai'(0) = 3^{-1/3} / Γ(1/3).
const NEG_AI_PRIME_0: f64 = 0.258_819_403_792_806_8;

const SERIES_UPPER: f64 = 2.0;
const ASYMPTOTIC_FROM: f64 = 8.0;

/// Ai(u).
pub fn airy_ai(u: f64) -> Result<f64> {
    airy_ai_pair(u).map(|(ai, _)| ai)
}

/// (Ai(u), Ai'(u)) for finite `u` with `|u| <= 200`.
///
/// Maclaurin series on `[-8, 2]`, the Laplace-type integral
/// `Ai(u) = e^{-ζ}/π ∫₀^∞ exp(-√u t²) cos(t³/3) dt` on `(2, 8]` (the series
/// loses digits to cancellation there), and the Poincaré asymptotic
/// expansions for `|u| > 8`.
pub fn airy_ai_pair(u: f64) -> Result<(f64, f64)> {
    if !u.is_finite() {
        return Err(Error::domain(format!(
            "Airy argument must be finite, got {u}"
        )));
    }
    if u.abs() > 200.0 {
        return Err(Error::domain(format!(
            "Airy argument |u| must not exceed 200, got {u}"
        )));
    }
    Ok(if u > ASYMPTOTIC_FROM {
        asymptotic_positive(u)
    } else if u > SERIES_UPPER {
        laplace_integral(u)
    } else if u >= -ASYMPTOTIC_FROM {
        maclaurin(u)
    } else {
        asymptotic_negative(-u)
    })
}

fn maclaurin(z: f64) -> (f64, f64) {
    let z3 = z * z * z;
    // f, g and their derivatives; Ai = c1 f - c2 g.
    let (mut f, mut a) = (1.0, 1.0);
    let (mut g, mut b) = (z, z);
    let (mut fp, mut d) = (z * z / 2.0, z * z / 2.0);
    let (mut gp, mut e) = (1.0, 1.0);
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        a *= z3 / ((k3 - 1.0) * k3);
        b *= z3 / (k3 * (k3 + 1.0));
        e *= z3 / (k3 * (k3 - 2.0));
        if k >= 2 {
            d *= z3 / ((k3 - 1.0) * (k3 - 3.0));
            fp += d;
        }
        f += a;
        g += b;
        gp += e;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if a.abs() + b.abs() + d.abs() + e.abs() <= 1e-17 * scale {
            break;
        }
    }
    (
        AI_0 * f - NEG_AI_PRIME_0 * g,
        AI_0 * fp - NEG_AI_PRIME_0 * gp,
    )
}

fn laplace_integral(x: f64) -> (f64, f64) {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let rule = RULE.get_or_init(|| GaussLegendre::new(32));
    let sx = x.sqrt();
    // exp(-√x t²) < 1e-20 beyond this point.
    let upper = (46.0 / sx).sqrt();
    let g = rule.integrate_composite(0.0, upper, 12, |t| {
        (-sx * t * t).exp() * (t * t * t / 3.0).cos()
    });
    let gp = rule.integrate_composite(0.0, upper, 12, |t| {
        -t * t / (2.0 * sx) * (-sx * t * t).exp() * (t * t * t / 3.0).cos()
    });
    let zeta = 2.0 / 3.0 * x * sx;
    let pref = (-zeta).exp() / PI;
    (pref * g, pref * (gp - sx * g))
}

/// Coefficients u_k of the Airy asymptotic series, with the matching v_k.
fn asymptotic_coefficients() -> &'static [(f64, f64)] {
    static COEFFS: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut out = vec![(1.0, 1.0)];
        let mut u = 1.0;
        for k in 1..40 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
            out.push((u, v));
        }
        out
    })
}

/// Sums Σ (-1)^k c_k / ζ^k (optionally over even/odd k only), stopping at the smallest term.
fn asymptotic_sum(
    zeta: f64,
    coeff: impl Fn(usize) -> f64,
    indices: impl Iterator<Item = usize>,
    alternate: bool,
) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for (j, k) in indices.enumerate() {
        let sign = if alternate && j % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * coeff(k) / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn asymptotic_positive(x: f64) -> (f64, f64) {
    let c = asymptotic_coefficients();
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let su = asymptotic_sum(
        zeta,
        |k| if k % 2 == 0 { c[k].0 } else { -c[k].0 },
        0..c.len(),
        false,
    );
    let sv = asymptotic_sum(
        zeta,
        |k| if k % 2 == 0 { c[k].1 } else { -c[k].1 },
        0..c.len(),
        false,
    );
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    (e * x.powf(-0.25) * su, -e * x.powf(0.25) * sv)
}

fn asymptotic_negative(x: f64) -> (f64, f64) {
    let c = asymptotic_coefficients();
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let even = |sel: fn(&(f64, f64)) -> f64| {
        asymptotic_sum(zeta, |k| sel(&c[k]), (0..c.len()).step_by(2), true)
    };
    let odd = |sel: fn(&(f64, f64)) -> f64| {
        asymptotic_sum(zeta, |k| sel(&c[k]), (1..c.len()).step_by(2), true)
    };
    let (ue, uo) = (even(|p| p.0), odd(|p| p.0));
    let (ve, vo) = (even(|p| p.1), odd(|p| p.1));
    let phase = zeta - PI / 4.0;
    let (s, co) = phase.sin_cos();
    let ai = (co * ue + s * uo) / (PI.sqrt() * x.powf(0.25));
    let aip = x.powf(0.25) / PI.sqrt() * (s * ve - co * vo);
    (ai, aip)
}

/// Standard normal CDF Φ(x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density φ(x).
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}
