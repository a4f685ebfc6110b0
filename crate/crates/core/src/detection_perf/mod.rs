//! False-alarm and missed-detection probabilities of the eigenvalue-ratio test.

mod law;
mod threshold;

pub use law::{
    mu_minus, mu_plus, mu_spike, nu_minus, nu_plus, nu_spike, pfa, pmd, Component, ComponentKind,
    Hypothesis, RatioLaw,
};
pub use threshold::{
    build_lut, roc, threshold_for_law, threshold_from_pfa, threshold_from_pmd, write_roc_csv,
    ThresholdRow, ThresholdTable,
};
