//! Exact transition and path simulation.
//!
//! The explicit solution of the SDE makes one-step sampling exact: given
//! `X_{t_k} = x`, draw the jump count `j ~ Poisson(lambda*delta)`, the jump
//! times as `j` sorted uniforms on the interval, and then the conditionally
//! Gaussian endpoint
//!
//! ```text
//! X_{t_{k+1}} | j, u_1..u_j  ~  N( x e^{-theta d}
//!                                  - (lambda/theta)(1 - e^{-theta d})
//!                                  + sum_i e^{-theta (d - u_i)},
//!                                  sigma^2 (1 - e^{-2 theta d}) / (2 theta) )
//! ```
//!
//! No Euler discretization is involved anywhere, so simulated paths follow
//! the discrete-observation law exactly.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{DiscretePath, JumpRecord, ModelParams, SamplingScheme};
use crate::rng::RngStream;

/// One exact draw from the transition law, with the latent jump structure.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDraw {
    pub x_next: f64,
    pub jump_count: usize,
    /// Ordered jump offsets inside (0, delta), one per jump.
    pub jump_offsets: Vec<f64>,
}

/// Conditional mean and variance of the next observation given the current
/// value and the jump offsets inside the interval.
///
/// The variance does not depend on `x` or on the jumps. Offsets may touch
/// the interval endpoints (the conditional law extends continuously there);
/// anything outside `[0, delta]` is rejected.
pub fn conditional_mean_var(
    params: ModelParams,
    delta: f64,
    x: f64,
    jump_offsets: &[f64],
) -> Result<(f64, f64)> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::invalid("delta", delta, "must be finite and > 0"));
    }
    for &u in jump_offsets {
        if !u.is_finite() || u < 0.0 || u > delta {
            return Err(Error::OffsetOutOfRange { offset: u, delta });
        }
    }
    let theta = params.theta();
    let decay = (-theta * delta).exp();
    // (lambda/theta) * (e^{-theta d} - 1) = -(lambda/theta)(1 - e^{-theta d})
    let compensator = params.lambda() / theta * (-theta * delta).exp_m1();
    // summed in sorted order so the mean is exactly permutation-invariant
    let mut ordered = jump_offsets.to_vec();
    ordered.sort_by(|a, b| a.partial_cmp(b).expect("finite offsets"));
    let jumps: f64 = ordered.iter().map(|&u| (-theta * (delta - u)).exp()).sum();
    let mean = x * decay + compensator + jumps;
    let var = params.sigma() * params.sigma() * (-(-2.0 * theta * delta).exp_m1()) / (2.0 * theta);
    Ok((mean, var))
}

/// Poisson sampling: multiplicative inversion for small means, the library's
/// large-mean rejection sampler above.
pub(crate) fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    debug_assert!(mean >= 0.0);
    if mean == 0.0 {
        return 0;
    }
    if mean <= 10.0 {
        let limit = (-mean).exp();
        let mut count = 0usize;
        let mut product: f64 = rng.random();
        while product > limit {
            count += 1;
            product *= rng.random::<f64>();
        }
        count
    } else {
        let draw: f64 = Poisson::new(mean).expect("valid mean").sample(rng);
        draw as usize
    }
}

/// Draw one exact transition from `x` over a step of length `delta`.
pub fn sample_transition<R: Rng + ?Sized>(
    params: ModelParams,
    delta: f64,
    x: f64,
    rng: &mut R,
) -> Result<TransitionDraw> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::invalid("delta", delta, "must be finite and > 0"));
    }
    let jump_count = sample_poisson(params.lambda() * delta, rng);
    let mut jump_offsets: Vec<f64> = (0..jump_count)
        .map(|_| rng.random_range(0.0..delta))
        .collect();
    jump_offsets.sort_by(|a, b| a.partial_cmp(b).expect("finite offsets"));
    let (mean, var) = conditional_mean_var(params, delta, x, &jump_offsets)?;
    let gauss: f64 = rng.sample(StandardNormal);
    let x_next = mean + var.sqrt() * gauss;
    Ok(TransitionDraw {
        x_next,
        jump_count,
        jump_offsets,
    })
}

/// Simulate a full path under the scheme, one exact transition per step.
///
/// With `keep_latent` the per-interval jump times (absolute, inside
/// `(t_k, t_{k+1})`) are recorded on the returned path.
pub fn simulate_path(
    params: ModelParams,
    scheme: SamplingScheme,
    stream: RngStream,
    keep_latent: bool,
) -> Result<DiscretePath> {
    let mut rng = stream.rng();
    let n = scheme.n();
    let delta = scheme.delta();
    let mut values = Vec::with_capacity(n + 1);
    values.push(scheme.x0());
    let mut latent = keep_latent.then(|| Vec::with_capacity(n));
    let mut x = scheme.x0();
    for k in 0..n {
        let draw = sample_transition(params, delta, x, &mut rng)?;
        if !draw.x_next.is_finite() {
            return Err(Error::invalid(
                "x_next",
                draw.x_next,
                "non-finite simulated value",
            ));
        }
        x = draw.x_next;
        values.push(x);
        if let Some(rec) = latent.as_mut() {
            let t_k = scheme.time(k);
            rec.push(draw.jump_offsets.iter().map(|&u| t_k + u).collect());
        }
    }
    DiscretePath::new(scheme, values, latent.map(JumpRecord::from_interval_times))
}
