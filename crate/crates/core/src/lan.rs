//! Monte-Carlo experiments: the distributional limit of the log-likelihood
//! ratio under local alternatives, the efficiency of the MLE against the
//! inverse Fisher matrix, and long-run ergodic averages.
//!
//! Replications are independent tasks, one RNG stream per replication, and
//! every aggregate is reduced in replication order, so reports are
//! bit-identical regardless of how the work is scheduled.

use rayon::prelude::*;
use serde::Serialize;

use crate::density::MixtureConfig;
use crate::error::{Error, Result};
use crate::inference::{fit_mle, log_likelihood_ratio, FitConfig};
use crate::model::{
    invariant_moments, lan_limit_moments, rate_matrix, LocalAlternative, ModelParams,
    SamplingScheme,
};
use crate::rng::{RngStream, RNG_ALGORITHM};
use crate::simulate::simulate_path;
use crate::stats::{ks_critical_value, ks_statistic_normal, mean_and_variance};

/// Configuration of one log-likelihood-ratio experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LanExperimentConfig {
    pub params0: ModelParams,
    pub z: LocalAlternative,
    pub scheme: SamplingScheme,
    pub reps: usize,
    pub seed: u64,
    pub mixture: MixtureConfig,
}

impl LanExperimentConfig {
    /// Validates the replication budget and that the perturbed parameters
    /// stay positive under the scheme's rates.
    pub fn validate(&self) -> Result<ModelParams> {
        if self.reps < 100 {
            return Err(Error::invalid("reps", self.reps as f64, "must be >= 100"));
        }
        self.z.perturb(self.params0, self.scheme)
    }
}

/// Provenance block shared by the experiment reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub rng: &'static str,
    pub reps: usize,
    pub reps_used: usize,
    pub failures: usize,
}

/// Monte-Carlo standard errors of the reported sample moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardErrors {
    pub mean: f64,
    pub variance: f64,
}

/// Outcome of [`run_lan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanReport {
    /// One log-likelihood-ratio value per replication.
    pub sample: Vec<f64>,
    pub empirical_mean: f64,
    pub empirical_var: f64,
    pub predicted_mean: f64,
    pub predicted_var: f64,
    /// KS statistic of the sample against the predicted Gaussian; absent
    /// when the predicted law is degenerate (z = 0).
    pub ks_statistic: Option<f64>,
    /// Asymptotic KS critical value at significance 1e-3 (diagnostic only).
    pub ks_critical_1e3: Option<f64>,
    pub degenerate: bool,
    pub standard_errors: StandardErrors,
    pub config: LanExperimentConfig,
    pub perturbed: ModelParams,
    pub metadata: RunMetadata,
}

/// Simulate under the base parameters and aggregate the log-likelihood
/// ratios against the locally perturbed alternative.
pub fn run_lan(config: &LanExperimentConfig) -> Result<LanReport> {
    let perturbed = config.validate()?;
    let base = config.params0;
    let results: Vec<Result<f64>> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let stream = RngStream::new(config.seed, rep as u64);
            let path = simulate_path(base, config.scheme, stream, false)?;
            log_likelihood_ratio(&path, base, perturbed, config.mixture)
        })
        .collect();
    let mut sample = Vec::with_capacity(config.reps);
    for (rep, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => sample.push(v),
            Err(e) => {
                return Err(Error::Replication {
                    index: rep,
                    source: Box::new(e),
                })
            }
        }
    }

    let (empirical_mean, empirical_var) = mean_and_variance(&sample);
    let (predicted_mean, predicted_var) = lan_limit_moments(base, config.z);
    let ks_statistic = ks_statistic_normal(&sample, predicted_mean, predicted_var);
    let degenerate = ks_statistic.is_none();
    let reps = config.reps;
    Ok(LanReport {
        empirical_mean,
        empirical_var,
        predicted_mean,
        predicted_var,
        ks_statistic,
        ks_critical_1e3: (!degenerate).then(|| ks_critical_value(1e-3, reps)),
        degenerate,
        standard_errors: StandardErrors {
            mean: (empirical_var / reps as f64).sqrt(),
            variance: empirical_var * (2.0 / (reps as f64 - 1.0)).sqrt(),
        },
        sample,
        config: *config,
        perturbed,
        metadata: RunMetadata {
            seed: config.seed,
            rng: RNG_ALGORITHM,
            reps,
            reps_used: reps,
            failures: 0,
        },
    })
}

/// Outcome of [`run_efficiency`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyReport {
    /// Mean of the rate-normalized estimation errors, per coordinate.
    pub normalized_mean: [f64; 3],
    /// Empirical covariance of the rate-normalized errors.
    pub empirical_cov: [[f64; 3]; 3],
    /// Diagonal of the inverse asymptotic Fisher matrix at the truth.
    pub gamma_inv_diag: [f64; 3],
    /// Empirical covariance diagonal over `gamma_inv_diag`.
    pub cov_ratio: [f64; 3],
    /// Per-coordinate z-scores of the normalized mean against zero.
    pub z_scores: [f64; 3],
    /// Replication indices excluded for non-convergence.
    pub excluded: Vec<usize>,
    pub params0: ModelParams,
    pub scheme: SamplingScheme,
    pub metadata: RunMetadata,
}

/// Repeatedly simulate and fit, then compare the covariance of
/// `phi_n * (estimate - truth)` with the inverse Fisher matrix.
///
/// Replications that do not converge are excluded and counted; more than
/// 5% of them aborts the experiment.
pub fn run_efficiency(
    params0: ModelParams,
    scheme: SamplingScheme,
    reps: usize,
    seed: u64,
    fit: &FitConfig,
) -> Result<EfficiencyReport> {
    if reps < 100 {
        return Err(Error::invalid("reps", reps as f64, "must be >= 100"));
    }
    let rate = rate_matrix(scheme);
    let truth = params0.to_array();
    let results: Vec<Result<(bool, [f64; 3])>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let stream = RngStream::new(seed, rep as u64);
            let path = simulate_path(params0, scheme, stream, false)?;
            let report = fit_mle(&path, fit)?;
            let est = report.estimate.to_array();
            let mut err = [0.0; 3];
            for i in 0..3 {
                err[i] = rate[i] * (est[i] - truth[i]);
            }
            Ok((report.converged, err))
        })
        .collect();

    let mut used: Vec<[f64; 3]> = Vec::with_capacity(reps);
    let mut excluded = Vec::new();
    for (rep, r) in results.into_iter().enumerate() {
        match r {
            Ok((true, err)) => used.push(err),
            Ok((false, _)) => excluded.push(rep),
            Err(e) => {
                return Err(Error::Replication {
                    index: rep,
                    source: Box::new(e),
                })
            }
        }
    }
    if excluded.len() * 20 > reps {
        return Err(Error::TooManyFailures {
            failed: excluded.len(),
            total: reps,
        });
    }

    let m = used.len() as f64;
    let mut normalized_mean = [0.0; 3];
    for err in &used {
        for i in 0..3 {
            normalized_mean[i] += err[i] / m;
        }
    }
    let mut empirical_cov = [[0.0; 3]; 3];
    for err in &used {
        for i in 0..3 {
            for j in 0..3 {
                empirical_cov[i][j] +=
                    (err[i] - normalized_mean[i]) * (err[j] - normalized_mean[j]) / (m - 1.0);
            }
        }
    }
    let gamma = crate::model::fisher_matrix(params0);
    let mut gamma_inv_diag = [0.0; 3];
    let mut cov_ratio = [0.0; 3];
    let mut z_scores = [0.0; 3];
    for i in 0..3 {
        gamma_inv_diag[i] = 1.0 / gamma[i][i];
        cov_ratio[i] = empirical_cov[i][i] / gamma_inv_diag[i];
        z_scores[i] = normalized_mean[i] / (empirical_cov[i][i] / m).sqrt();
    }

    Ok(EfficiencyReport {
        normalized_mean,
        empirical_cov,
        gamma_inv_diag,
        cov_ratio,
        z_scores,
        metadata: RunMetadata {
            seed,
            rng: RNG_ALGORITHM,
            reps,
            reps_used: used.len(),
            failures: excluded.len(),
        },
        excluded,
        params0,
        scheme,
    })
}

/// Named test functions for the discrete ergodic average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    Identity,
    Square,
    Abs,
    Cube,
}

impl TestFunction {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            TestFunction::Identity => x,
            TestFunction::Square => x * x,
            TestFunction::Abs => x.abs(),
            TestFunction::Cube => x * x * x,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Identity => "identity",
            TestFunction::Square => "square",
            TestFunction::Abs => "abs",
            TestFunction::Cube => "cube",
        }
    }
}

impl std::str::FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(TestFunction::Identity),
            "square" => Ok(TestFunction::Square),
            "abs" => Ok(TestFunction::Abs),
            "cube" => Ok(TestFunction::Cube),
            other => Err(Error::UnknownTestFunction(other.to_string())),
        }
    }
}

/// Outcome of [`run_ergodic`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicReport {
    pub g: TestFunction,
    /// `(1/n) sum g(X_{t_k})`, k = 0..n-1.
    pub average: f64,
    /// Invariant-measure prediction where known (identity, square).
    pub predicted: Option<f64>,
    pub params0: ModelParams,
    pub scheme: SamplingScheme,
    pub metadata: RunMetadata,
}

/// Simulate one long path and average `g` along it.
pub fn run_ergodic(
    params0: ModelParams,
    scheme: SamplingScheme,
    g: TestFunction,
    seed: u64,
) -> Result<ErgodicReport> {
    let path = simulate_path(params0, scheme, RngStream::new(seed, 0), false)?;
    let n = scheme.n();
    let average = path.values()[..n].iter().map(|&x| g.apply(x)).sum::<f64>() / n as f64;
    let (inv_mean, inv_second) = invariant_moments(params0);
    let predicted = match g {
        TestFunction::Identity => Some(inv_mean),
        TestFunction::Square => Some(inv_second),
        TestFunction::Abs | TestFunction::Cube => None,
    };
    Ok(ErgodicReport {
        g,
        average,
        predicted,
        params0,
        scheme,
        metadata: RunMetadata {
            seed,
            rng: RNG_ALGORITHM,
            reps: 1,
            reps_used: 1,
            failures: 0,
        },
    })
}
