//! Monte Carlo harness: draws received samples, forms R(N) = Y Yᴴ / N and
//! records its extreme eigenvalues and their ratio.

mod ecdf;
mod generate;
mod rng;
mod trials;

pub use ecdf::{cdf_comparison, ks_distance, write_cdf_comparison, EmpiricalCdf, MIN_KS_SAMPLES};
pub use generate::{
    gen_channel, gen_channel_per_source, gen_noise, gen_signal, rayleigh_scenario, srrc_taps,
    SRRC_ROLLOFF, SRRC_SAMPLES_PER_SYMBOL, SRRC_SPAN_SYMBOLS,
};
pub use rng::{splitmix64, trial_seed, SampleStream};
pub use trials::{
    received_samples, run_trials, run_trials_with, sample_covariance, TrialBatch, TrialInput,
    TrialOptions,
};
