//! Largest-eigenvalue laws of the 1×1 and 2×2 Gaussian Unitary Ensemble.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{normal_cdf, normal_pdf};

/// Law of the largest eigenvalue of a k×k GUE, for k ∈ {1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GueFiniteLaw {
    order: u32,
}

impl GueFiniteLaw {
    pub fn new(order: u32) -> Result<Self> {
        match order {
            1 | 2 => Ok(GueFiniteLaw { order }),
            k => Err(Error::UnsupportedOrder(k)),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let e = normal_cdf(x);
        if self.order == 1 {
            return e;
        }
        let phi = normal_pdf(x);
        // E² - x φ E - φ², with φ² = e^{-x²}/(2π).
        (e * e - x * phi * e - (-x * x).exp() / (2.0 * PI)).clamp(0.0, 1.0)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let phi = normal_pdf(x);
        if self.order == 1 {
            return phi;
        }
        phi * (1.0 + x * x) * normal_cdf(x) + x * (-x * x).exp() / (2.0 * PI)
    }
}

pub fn gue_cdf(order: u32, x: f64) -> Result<f64> {
    Ok(GueFiniteLaw::new(order)?.cdf(x))
}

pub fn gue_pdf(order: u32, x: f64) -> Result<f64> {
    Ok(GueFiniteLaw::new(order)?.pdf(x))
}
