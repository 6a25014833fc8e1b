//! Simulation, densities, inference and Monte-Carlo experiments for a
//! one-dimensional Ornstein-Uhlenbeck process driven by a Brownian motion
//! and a compensated unit-jump Poisson process,
//!
//! ```text
//! X_t = x0 - theta * int_0^t X_s ds + sigma * B_t + (N_t - lambda * t).
//! ```
//!
//! The explicit solution makes both simulation and the transition density
//! exact: one step is a Poisson number of uniformly placed jumps plus a
//! Gaussian, and the density is a Poisson-weighted Gaussian mixture. On top
//! of those primitives the crate provides the exact discrete-observation
//! likelihood with closed-form score, maximum-likelihood fitting, and an
//! experiment harness that checks the Gaussian-shift limit of local
//! log-likelihood ratios, the efficiency of the MLE against the inverse
//! Fisher matrix, and long-run ergodic averages.

// indexed loops over parallel fixed-size arrays read better in the
// 3-parameter matrix algebra than zipped iterators
#![allow(clippy::needless_range_loop)]

pub mod density;
pub mod error;
pub mod inference;
pub mod io;
pub mod lan;
pub mod model;
pub mod quad;
pub mod rng;
pub mod simulate;
pub mod stats;

pub use density::{
    jump_posterior, log_density_grad, misclassification_scan, q0, qj_given_times, qj_marginal,
    transition_density, JTruncation, JumpPosterior, MisclassificationRates, Mixture, MixtureConfig,
    J_CAP,
};
pub use error::{Error, Result};
pub use inference::{
    auto_init, fit_mle, log_likelihood, log_likelihood_ratio, loglik_and_score,
    observed_information, score, FitConfig, FitReport, InitStrategy, ParamBounds,
};
pub use lan::{
    run_efficiency, run_ergodic, run_lan, EfficiencyReport, ErgodicReport, LanExperimentConfig,
    LanReport, RunMetadata, StandardErrors, TestFunction,
};
pub use model::{
    fisher_matrix, invariant_moments, lan_limit_moments, rate_matrix, DiscretePath, FisherInfo,
    JumpRecord, LocalAlternative, ModelParams, SamplingScheme,
};
pub use rng::{RngStream, RNG_ALGORITHM};
pub use simulate::{conditional_mean_var, sample_transition, simulate_path, TransitionDraw};
