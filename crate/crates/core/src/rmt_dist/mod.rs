//! Limiting eigenvalue laws: Tracy-Widom (β = 2) and the finite GUE laws.

mod gue;
pub(crate) mod ode;
mod tracy_widom;

pub use gue::{gue_cdf, gue_pdf, GueFiniteLaw};
pub use tracy_widom::{
    tw2_cdf, tw2_pdf, tw2_quantile, TracyWidomTable, BOUNDARY, DEFAULT_TOLERANCE, LEFT_EDGE,
};
