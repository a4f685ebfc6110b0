//! Limiting law of the ratio statistic T = λ̂₁ / λ̂_K.

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::rmt_dist::{tw2_cdf, tw2_pdf};
use crate::special::{normal_cdf, normal_pdf};
use crate::spiked_model::DetectorDesign;

/// Half-width of the denominator integration window, in units of its spread.
const SUPPORT_HALF_WIDTH: f64 = 12.0;
/// Maximum change allowed when the quadrature node count is doubled.
const SELF_CHECK_TOLERANCE: f64 = 1e-8;
/// Relative margin above 1 + √c required for the Gaussian spike law.
const CRITICAL_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Noise only.
    H0,
    /// Signal plus noise.
    H1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    TracyWidom,
    Gaussian,
}

/// Law of `center + (scale / rate) · L`, with `L` drawn from `kind`.
///
/// A negative `scale` reflects the standard law, as for the smallest
/// eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub kind: ComponentKind,
    pub center: f64,
    pub scale: f64,
    /// N^{2/3} for Tracy-Widom fluctuations, N^{1/2} for Gaussian ones.
    pub rate: f64,
}

impl Component {
    /// Standard deviation-like width `|scale| / rate`.
    pub fn spread(&self) -> f64 {
        self.scale.abs() / self.rate
    }

    fn standardize(&self, z: f64) -> f64 {
        (z - self.center) * self.rate / self.scale
    }

    pub fn cdf(&self, z: f64) -> f64 {
        let s = self.standardize(z);
        let base = match self.kind {
            ComponentKind::TracyWidom => tw2_cdf(s),
            ComponentKind::Gaussian => normal_cdf(s),
        };
        if self.scale > 0.0 {
            base
        } else {
            1.0 - base
        }
    }

    pub fn pdf(&self, z: f64) -> f64 {
        let s = self.standardize(z);
        let base = match self.kind {
            ComponentKind::TracyWidom => tw2_pdf(s),
            ComponentKind::Gaussian => normal_pdf(s),
        };
        base * self.rate / self.scale.abs()
    }

    /// Integration window `[max(0, center − 12·spread), center + 12·spread]`.
    pub fn support(&self) -> (f64, f64) {
        let w = SUPPORT_HALF_WIDTH * self.spread();
        ((self.center - w).max(0.0), self.center + w)
    }
}

/// μ₊(c) = (√c + 1)².
pub fn mu_plus(c: f64) -> f64 {
    (c.sqrt() + 1.0).powi(2)
}

/// μ₋(c) = (√c − 1)².
pub fn mu_minus(c: f64) -> f64 {
    (c.sqrt() - 1.0).powi(2)
}

/// ν₊(c) = (√c + 1)(c^{−1/2} + 1)^{1/3}.
pub fn nu_plus(c: f64) -> f64 {
    (c.sqrt() + 1.0) * (1.0 / c.sqrt() + 1.0).cbrt()
}

/// ν₋(c) = (√c − 1)(c^{−1/2} − 1)^{1/3}; negative on (0, 1).
pub fn nu_minus(c: f64) -> f64 {
    (c.sqrt() - 1.0) * (1.0 / c.sqrt() - 1.0).cbrt()
}

/// μ_s(t₁, c) = t₁ (1 + c / (t₁ − 1)).
pub fn mu_spike(t1: f64, c: f64) -> f64 {
    t1 * (1.0 + c / (t1 - 1.0))
}

/// ν_s(t₁, c) = t₁ √(1 − c / (t₁ − 1)²).
pub fn nu_spike(t1: f64, c: f64) -> f64 {
    t1 * (1.0 - c / (t1 - 1.0).powi(2)).sqrt()
}

/// Limiting law of T under one hypothesis, assuming independent numerator and
/// denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioLaw {
    pub hypothesis: Hypothesis,
    pub numerator: Component,
    pub denominator: Component,
    pub design: DetectorDesign,
    /// Largest spike eigenvalue (ℋ₁ only).
    pub t1: Option<f64>,
}

impl RatioLaw {
    /// Noise-only law: Tracy-Widom fluctuations of both extremes around μ±(c).
    pub fn h0(design: &DetectorDesign) -> Result<Self> {
        let c = design.c();
        let rate = (design.samples() as f64).powf(2.0 / 3.0);
        let law = RatioLaw {
            hypothesis: Hypothesis::H0,
            numerator: Component {
                kind: ComponentKind::TracyWidom,
                center: mu_plus(c),
                scale: nu_plus(c),
                rate,
            },
            denominator: Component {
                kind: ComponentKind::TracyWidom,
                center: mu_minus(c),
                scale: nu_minus(c),
                rate,
            },
            design: *design,
            t1: None,
        };
        law.check_quadrature()?;
        Ok(law)
    }

    /// Signal law for an identifiable simple spike `t1`: Gaussian largest
    /// eigenvalue around μ_s(t₁, c), smallest eigenvalue of the (K−P)-dimensional
    /// noise bulk (aspect ratio c′).
    pub fn h1(design: &DetectorDesign, t1: f64) -> Result<Self> {
        let c = design.c();
        let critical = design.critical_spike();
        if !t1.is_finite() || t1 < critical * (1.0 + CRITICAL_MARGIN) {
            return Err(Error::NotIdentifiable { t1, critical });
        }
        let cp = design.c_prime();
        let n = design.samples() as f64;
        let law = RatioLaw {
            hypothesis: Hypothesis::H1,
            numerator: Component {
                kind: ComponentKind::Gaussian,
                center: mu_spike(t1, c),
                scale: nu_spike(t1, c),
                rate: n.sqrt(),
            },
            denominator: Component {
                kind: ComponentKind::TracyWidom,
                center: mu_minus(cp),
                scale: nu_minus(cp),
                rate: n.powf(2.0 / 3.0),
            },
            design: *design,
            t1: Some(t1),
        };
        law.check_quadrature()?;
        Ok(law)
    }

    /// Builds the law for `hypothesis`; `t1` is required under ℋ₁.
    pub fn new(design: &DetectorDesign, hypothesis: Hypothesis, t1: Option<f64>) -> Result<Self> {
        match (hypothesis, t1) {
            (Hypothesis::H0, _) => Self::h0(design),
            (Hypothesis::H1, Some(t1)) => Self::h1(design, t1),
            (Hypothesis::H1, None) => {
                Err(Error::domain("the signal law needs a spike eigenvalue t1"))
            }
        }
    }

    /// Ratio of the component centres, a rough location of the law.
    pub fn center_ratio(&self) -> f64 {
        self.numerator.center / self.denominator.center
    }

    /// F_T(γ) = ∫ f_{l_K}(x) F_{l_1}(γ x) dx, zero for γ ≤ 1.
    pub fn cdf(&self, gamma: f64) -> f64 {
        self.cdf_with(GaussLegendre::n256(), gamma)
    }

    fn cdf_with(&self, rule: &GaussLegendre, gamma: f64) -> f64 {
        if gamma <= 1.0 {
            return 0.0;
        }
        let (a, b) = self.denominator.support();
        let v = rule.integrate(a, b, |x| {
            self.denominator.pdf(x) * self.numerator.cdf(gamma * x)
        });
        v.clamp(0.0, 1.0)
    }

    /// Ratio density f_T(t) = ∫ x f_{l_1}(t x) f_{l_K}(x) dx for t > 1.
    pub fn pdf(&self, t: f64) -> f64 {
        if t <= 1.0 {
            return 0.0;
        }
        let (a, b) = self.denominator.support();
        GaussLegendre::n256()
            .integrate(a, b, |x| {
                x * self.numerator.pdf(t * x) * self.denominator.pdf(x)
            })
            .max(0.0)
    }

    /// Largest change in the CDF when the rule is doubled from 256 to 512 nodes,
    /// probed around the bulk of the law.
    pub fn quadrature_drift(&self) -> f64 {
        let r = self.center_ratio();
        let width = r
            * (self.numerator.spread() / self.numerator.center
                + self.denominator.spread() / self.denominator.center);
        (-4..=4)
            .map(|k| (r + k as f64 * width).max(1.0 + 1e-9))
            .map(|g| {
                (self.cdf_with(GaussLegendre::n256(), g) - self.cdf_with(GaussLegendre::n512(), g))
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    fn check_quadrature(&self) -> Result<()> {
        let drift = self.quadrature_drift();
        if drift.is_finite() && drift < SELF_CHECK_TOLERANCE {
            Ok(())
        } else {
            Err(Error::numeric(format!(
                "ratio-law quadrature is unresolved: doubling the nodes moved the CDF by {drift:e}"
            )))
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_nan() || gamma < 1.0 {
        return Err(Error::domain(format!(
            "threshold gamma must be at least 1, got {gamma}"
        )));
    }
    Ok(())
}

/// P_fa(γ) = 1 − F_{T|ℋ₀}(γ).
pub fn pfa(gamma: f64, design: &DetectorDesign) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(1.0 - RatioLaw::h0(design)?.cdf(gamma))
}

/// P_md(γ) = F_{T|ℋ₁}(γ) for the spike `t1`, using c′ = (K − P)/N from `design`.
pub fn pmd(gamma: f64, design: &DetectorDesign, t1: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(RatioLaw::h1(design, t1)?.cdf(gamma))
}
