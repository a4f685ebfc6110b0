//! Analytical performance of the largest-to-smallest eigenvalue ratio detector.
//!
//! The crate is organised around the detection workflow:
//!
//! * [`rmt_dist`] evaluates the Tracy-Widom law of order 2 (through the
//!   Painlevé II representation) and the finite GUE laws of order 1 and 2.
//! * [`spiked_model`] holds the sensing geometry and primary-signal scenarios
//!   and computes spike eigenvalues, SNR bookkeeping and identifiability.
//! * [`detection_perf`] combines both into the limiting law of the ratio
//!   statistic, giving false-alarm and missed-detection probabilities,
//!   thresholds, ROC curves and look-up tables.
//! * [`mc_sim`] is the Monte Carlo harness used to validate every formula.
//!
//! [`linalg`], [`quadrature`] and [`special`] are the numerical building blocks.

pub mod detection_perf;
pub mod error;
pub mod fmt;
pub mod linalg;
pub mod mc_sim;
pub mod quadrature;
pub mod rmt_dist;
pub mod special;
pub mod spiked_model;

pub use detection_perf::{
    build_lut, pfa, pmd, roc, threshold_from_pfa, threshold_from_pmd, Hypothesis, RatioLaw,
    ThresholdTable,
};
pub use error::{Error, Result};
pub use rmt_dist::{gue_cdf, gue_pdf, tw2_cdf, tw2_pdf, tw2_quantile, TracyWidomTable};
pub use spiked_model::{DetectorDesign, Modulation, Scenario};
