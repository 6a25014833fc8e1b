//! Domain types for the jump Ornstein-Uhlenbeck model
//!
//! The process solves
//!
//! ```text
//! X_t = x0 - theta * int_0^t X_s ds + sigma * B_t + (N_t - lambda * t)
//! ```
//!
//! with `B` a Brownian motion and `N` an independent unit-jump Poisson
//! process of intensity `lambda`. All three parameters are strictly
//! positive, which makes the process ergodic. This module holds the shared
//! value types plus the closed-form asymptotic quantities: the Fisher
//! information matrix of the high-frequency experiment, the per-parameter
//! convergence rates, the limiting log-likelihood-ratio moments and the
//! first two invariant-measure moments.

use serde::Serialize;

use crate::error::{Error, Result};

/// The strictly positive parameter triple (theta, sigma, lambda).
///
/// `theta` is the mean-reversion rate, `sigma` the diffusion scale and
/// `lambda` the jump intensity. Construction rejects non-positive or
/// non-finite components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    theta: f64,
    sigma: f64,
    lambda: f64,
}

impl ModelParams {
    pub fn new(theta: f64, sigma: f64, lambda: f64) -> Result<Self> {
        check_positive("theta", theta)?;
        check_positive("sigma", sigma)?;
        check_positive("lambda", lambda)?;
        Ok(ModelParams {
            theta,
            sigma,
            lambda,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.theta, self.sigma, self.lambda]
    }

    pub fn from_array(a: [f64; 3]) -> Result<Self> {
        ModelParams::new(a[0], a[1], a[2])
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::invalid(name, value, "must be finite and > 0"));
    }
    Ok(())
}

/// Equidistant observation scheme: `n` steps of size `delta` starting at `x0`.
///
/// Observation times are `t_k = k * delta` for `k = 0..=n`. The step size is
/// restricted to `(0, 1]`, matching the high-frequency regime to which the
/// asymptotic quantities below apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingScheme {
    n: usize,
    delta: f64,
    x0: f64,
}

impl SamplingScheme {
    pub fn new(n: usize, delta: f64, x0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", 0.0, "must be >= 1"));
        }
        if !delta.is_finite() || delta <= 0.0 || delta > 1.0 {
            return Err(Error::invalid("delta", delta, "must be in (0, 1]"));
        }
        if !x0.is_finite() {
            return Err(Error::invalid("x0", x0, "must be finite"));
        }
        Ok(SamplingScheme { n, delta, x0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Observation time `t_k = k * delta`.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.delta
    }

    /// Total observation horizon `n * delta`.
    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta
    }
}

/// Local perturbation directions (u, v, w) for (theta, sigma, lambda).
///
/// The perturbed parameters under a scheme are
/// `theta + u / sqrt(n*delta)`, `sigma + v / sqrt(n)`,
/// `lambda + w / sqrt(n*delta)`; positivity of the result is checked at the
/// point of use via [`LocalAlternative::perturb`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalAlternative {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl LocalAlternative {
    pub fn new(u: f64, v: f64, w: f64) -> Result<Self> {
        for (name, value) in [("u", u), ("v", v), ("w", w)] {
            if !value.is_finite() {
                return Err(Error::invalid(name, value, "must be finite"));
            }
        }
        Ok(LocalAlternative { u, v, w })
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    /// Parameters moved along the local directions at the scheme's rates.
    ///
    /// Fails if any perturbed component leaves (0, inf).
    pub fn perturb(&self, params: ModelParams, scheme: SamplingScheme) -> Result<ModelParams> {
        let rate = rate_matrix(scheme);
        ModelParams::new(
            params.theta() + self.u / rate[0],
            params.sigma() + self.v / rate[1],
            params.lambda() + self.w / rate[2],
        )
    }
}

/// Latent jump structure of a simulated path: one entry per interval with
/// the ordered absolute jump times inside `(t_k, t_{k+1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpRecord {
    times: Vec<Vec<f64>>,
}

impl JumpRecord {
    pub(crate) fn from_interval_times(times: Vec<Vec<f64>>) -> Self {
        JumpRecord { times }
    }

    pub fn intervals(&self) -> usize {
        self.times.len()
    }

    /// Jump count in interval `k`.
    pub fn count(&self, k: usize) -> usize {
        self.times[k].len()
    }

    /// Ordered jump times in interval `k`.
    pub fn times(&self, k: usize) -> &[f64] {
        &self.times[k]
    }

    /// Total jump count over all intervals.
    pub fn total(&self) -> usize {
        self.times.iter().map(Vec::len).sum()
    }
}

/// Discretely observed path on the equidistant grid, optionally with the
/// latent jump record kept by the simulator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretePath {
    scheme: SamplingScheme,
    values: Vec<f64>,
    latent: Option<JumpRecord>,
}

impl DiscretePath {
    pub fn new(
        scheme: SamplingScheme,
        values: Vec<f64>,
        latent: Option<JumpRecord>,
    ) -> Result<Self> {
        if values.len() != scheme.n() + 1 {
            return Err(Error::invalid(
                "values",
                values.len() as f64,
                "length must equal n + 1",
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("values", *bad, "must all be finite"));
        }
        if let Some(rec) = &latent {
            if rec.intervals() != scheme.n() {
                return Err(Error::invalid(
                    "latent",
                    rec.intervals() as f64,
                    "jump record must have one entry per interval",
                ));
            }
        }
        Ok(DiscretePath {
            scheme,
            values,
            latent,
        })
    }

    pub fn scheme(&self) -> SamplingScheme {
        self.scheme
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn latent(&self) -> Option<&JumpRecord> {
        self.latent.as_ref()
    }

    /// Number of transition intervals (`n`).
    pub fn intervals(&self) -> usize {
        self.scheme.n()
    }
}

/// Asymptotic Fisher information of Theorem-style high-frequency limits
/// together with the per-parameter rate vector.
///
/// `gamma` is diagonal with entries
/// `(sigma^2+1)/(2*theta*sigma^2)`, `2/sigma^2`, `(1+sigma^2/lambda)/sigma^2`
/// and `rate` is `(sqrt(n*delta), sqrt(n), sqrt(n*delta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherInfo {
    pub gamma: [[f64; 3]; 3],
    pub rate: [f64; 3],
}

impl FisherInfo {
    pub fn new(params: ModelParams, scheme: SamplingScheme) -> Self {
        FisherInfo {
            gamma: fisher_matrix(params),
            rate: rate_matrix(scheme),
        }
    }

    /// Diagonal of `gamma`.
    pub fn gamma_diag(&self) -> [f64; 3] {
        [self.gamma[0][0], self.gamma[1][1], self.gamma[2][2]]
    }

    /// Diagonal of `gamma^{-1}` (gamma is diagonal).
    pub fn gamma_inv_diag(&self) -> [f64; 3] {
        let d = self.gamma_diag();
        [1.0 / d[0], 1.0 / d[1], 1.0 / d[2]]
    }
}

/// Asymptotic Fisher information matrix at the given parameters:
/// `(1/sigma^2) * diag((sigma^2+1)/(2*theta), 2, 1 + sigma^2/lambda)`.
pub fn fisher_matrix(params: ModelParams) -> [[f64; 3]; 3] {
    let (t, s, l) = (params.theta(), params.sigma(), params.lambda());
    let s2 = s * s;
    let mut m = [[0.0; 3]; 3];
    m[0][0] = (s2 + 1.0) / (2.0 * t * s2);
    m[1][1] = 2.0 / s2;
    m[2][2] = (1.0 + s2 / l) / s2;
    m
}

/// Per-parameter normalization rates `(sqrt(n*delta), sqrt(n), sqrt(n*delta))`.
pub fn rate_matrix(scheme: SamplingScheme) -> [f64; 3] {
    let nd = (scheme.n() as f64 * scheme.delta()).sqrt();
    let n = (scheme.n() as f64).sqrt();
    [nd, n, nd]
}

/// Mean and variance of the limiting Gaussian shift experiment for the
/// log-likelihood ratio along direction `z`: mean `-z' G z / 2`,
/// variance `z' G z`.
pub fn lan_limit_moments(params: ModelParams, z: LocalAlternative) -> (f64, f64) {
    let g = fisher_matrix(params);
    let zv = z.to_array();
    let mut quad = 0.0;
    for i in 0..3 {
        quad += g[i][i] * zv[i] * zv[i];
    }
    (-0.5 * quad, quad)
}

/// First two moments of the invariant measure: mean 0 and second moment
/// `(sigma^2 + 1) / (2 * theta)`.
pub fn invariant_moments(params: ModelParams) -> (f64, f64) {
    let second = (params.sigma() * params.sigma() + 1.0) / (2.0 * params.theta());
    (0.0, second)
}
