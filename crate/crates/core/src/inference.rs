//! Exact discrete-observation likelihood and maximum-likelihood fitting.
//!
//! The observations form a Markov chain, so the log-likelihood is the sum
//! of `log p(delta, X_{t_k}, X_{t_{k+1}})` over intervals, with `p` the
//! Poisson-mixture transition density. The score sums the per-interval
//! closed-form gradients. Fitting maximizes the likelihood by BFGS over
//! `(ln theta, ln sigma, ln lambda)`, which keeps every iterate strictly
//! positive without constraint handling.
//!
//! Per-interval terms are evaluated in fixed-size chunks farmed out to the
//! thread pool and reduced in chunk order, so results are bit-identical
//! regardless of scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::density::{Mixture, MixtureConfig};
use crate::error::{Error, Result};
use crate::model::{fisher_matrix, rate_matrix, DiscretePath, ModelParams};

/// Fixed reduction granularity; part of the determinism contract.
const CHUNK: usize = 1024;

/// Initial point for the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InitStrategy {
    /// Method-of-moments start: theta from the lag-1 autocorrelation,
    /// sigma^2 from realized quadratic variation net of the jump
    /// contribution, lambda from posterior-expected jump counts.
    Auto,
    Given(ModelParams),
}

/// Box constraints on the parameters, inside (0, inf)^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamBounds {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl ParamBounds {
    pub fn new(lower: [f64; 3], upper: [f64; 3]) -> Result<Self> {
        for i in 0..3 {
            if !(lower[i] > 0.0 && lower[i] < upper[i] && upper[i].is_finite()) {
                return Err(Error::invalid(
                    "bounds",
                    lower[i],
                    "need 0 < lower < upper < inf per coordinate",
                ));
            }
        }
        Ok(ParamBounds { lower, upper })
    }
}

/// Optimizer and likelihood configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitConfig {
    pub max_iter: usize,
    pub grad_tol: f64,
    pub init: InitStrategy,
    pub bounds: Option<ParamBounds>,
    pub mixture: MixtureConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iter: 200,
            grad_tol: 1e-8,
            init: InitStrategy::Auto,
            bounds: None,
            mixture: MixtureConfig::default(),
        }
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub estimate: ModelParams,
    pub loglik: f64,
    /// Euclidean norm of the score at the estimate.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Plug-in covariance `phi_n^{-1} Gamma(estimate)^{-1} phi_n^{-1}`.
    pub asymptotic_cov: [[f64; 3]; 3],
    /// Square roots of the covariance diagonal.
    pub stderr: [f64; 3],
}

fn chunk_ranges(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .step_by(CHUNK)
        .map(|a| (a, (a + CHUNK).min(n)))
        .collect()
}

/// Log-likelihood of the path under `params`: the Markov sum of
/// per-interval log transition densities.
pub fn log_likelihood(
    path: &DiscretePath,
    params: ModelParams,
    config: MixtureConfig,
) -> Result<f64> {
    let mix = Mixture::new(params, path.scheme().delta(), config)?;
    let xs = path.values();
    let partials: Vec<Result<f64>> = chunk_ranges(path.intervals())
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = 0.0;
            for k in a..b {
                let term = mix.log_density(xs[k], xs[k + 1]);
                if !term.is_finite() {
                    return Err(Error::NonFiniteTerm { interval: k });
                }
                acc += term;
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    for p in partials {
        total += p?;
    }
    Ok(total)
}

/// Log-likelihood ratio `log L(alt) - log L(base)`, accumulated pairwise
/// per interval to limit cancellation between the two big sums.
pub fn log_likelihood_ratio(
    path: &DiscretePath,
    base: ModelParams,
    alt: ModelParams,
    config: MixtureConfig,
) -> Result<f64> {
    let delta = path.scheme().delta();
    let mix_base = Mixture::new(base, delta, config)?;
    let mix_alt = Mixture::new(alt, delta, config)?;
    let xs = path.values();
    let partials: Vec<Result<f64>> = chunk_ranges(path.intervals())
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = 0.0;
            for k in a..b {
                let t_alt = mix_alt.log_density(xs[k], xs[k + 1]);
                let t_base = mix_base.log_density(xs[k], xs[k + 1]);
                if !t_alt.is_finite() || !t_base.is_finite() {
                    return Err(Error::NonFiniteTerm { interval: k });
                }
                acc += t_alt - t_base;
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    for p in partials {
        total += p?;
    }
    Ok(total)
}

/// Score (gradient of the log-likelihood) at `params`.
pub fn score(path: &DiscretePath, params: ModelParams, config: MixtureConfig) -> Result<[f64; 3]> {
    Ok(loglik_and_score(path, params, config)?.1)
}

/// One-pass log-likelihood and score.
pub fn loglik_and_score(
    path: &DiscretePath,
    params: ModelParams,
    config: MixtureConfig,
) -> Result<(f64, [f64; 3])> {
    let mix = Mixture::new(params, path.scheme().delta(), config)?;
    let xs = path.values();
    let partials: Vec<Result<(f64, [f64; 3])>> = chunk_ranges(path.intervals())
        .par_iter()
        .map(|&(a, b)| {
            let mut value = 0.0;
            let mut grad = [0.0; 3];
            for k in a..b {
                let (lp, g) = mix.log_density_grad(xs[k], xs[k + 1]);
                if !lp.is_finite() || g.iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFiniteTerm { interval: k });
                }
                value += lp;
                for i in 0..3 {
                    grad[i] += g[i];
                }
            }
            Ok((value, grad))
        })
        .collect();
    let mut value = 0.0;
    let mut grad = [0.0; 3];
    for p in partials {
        let (v, g) = p?;
        value += v;
        for i in 0..3 {
            grad[i] += g[i];
        }
    }
    Ok((value, grad))
}

/// Observed information: numeric Hessian of the negative log-likelihood by
/// central second differences with steps `1e-4 * (1 + |param|)`, mirrored
/// to be exactly symmetric.
pub fn observed_information(
    path: &DiscretePath,
    params: ModelParams,
    config: MixtureConfig,
) -> Result<[[f64; 3]; 3]> {
    let base = params.to_array();
    let f = |p: [f64; 3]| -> Result<f64> {
        Ok(-log_likelihood(path, ModelParams::from_array(p)?, config)?)
    };
    let mut h = [0.0; 3];
    for i in 0..3 {
        // keep the negative perturbation strictly positive
        h[i] = (1e-4 * (1.0 + base[i].abs())).min(0.5 * base[i]);
    }
    let f0 = f(base)?;
    let mut hess = [[0.0; 3]; 3];
    for i in 0..3 {
        let mut hi = base;
        hi[i] += h[i];
        let mut lo = base;
        lo[i] -= h[i];
        let d = (f(hi)? - 2.0 * f0 + f(lo)?) / (h[i] * h[i]);
        if !d.is_finite() {
            return Err(Error::NonFiniteTerm { interval: 0 });
        }
        hess[i][i] = d;
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let mut pp = base;
            pp[i] += h[i];
            pp[j] += h[j];
            let mut pm = base;
            pm[i] += h[i];
            pm[j] -= h[j];
            let mut mp = base;
            mp[i] -= h[i];
            mp[j] += h[j];
            let mut mm = base;
            mm[i] -= h[i];
            mm[j] -= h[j];
            let d = (f(pp)? - f(pm)? - f(mp)? + f(mm)?) / (4.0 * h[i] * h[j]);
            if !d.is_finite() {
                return Err(Error::NonFiniteTerm { interval: 0 });
            }
            hess[i][j] = d;
            hess[j][i] = d;
        }
    }
    Ok(hess)
}

/// Deterministic method-of-moments initializer (see [`InitStrategy::Auto`]).
pub fn auto_init(path: &DiscretePath, config: MixtureConfig) -> Result<ModelParams> {
    let xs = path.values();
    let n = path.intervals();
    let delta = path.scheme().delta();
    let clip = |v: f64| {
        if v.is_finite() {
            v.clamp(1e-3, 1e3)
        } else {
            1.0
        }
    };

    // theta from the lag-1 autocorrelation of the observations
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..n {
        num += (xs[k] - mean) * (xs[k + 1] - mean);
    }
    for x in xs {
        den += (x - mean) * (x - mean);
    }
    let rho = (num / den).clamp(1e-6, 1.0 - 1e-6);
    let theta = clip(-rho.ln() / delta);

    // robust diffusion scale from the median absolute increment
    let mut incr: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let med = median(&mut incr);
    let mut dev: Vec<f64> = incr.iter().map(|d| (d - med).abs()).collect();
    let sigma_rough = clip(median(&mut dev) / (0.6745 * delta.sqrt()));

    // quadratic variation per unit time estimates sigma^2 + lambda
    let qv_rate = incr.iter().map(|d| d * d).sum::<f64>() / (n as f64 * delta);
    let lambda_rough = clip(qv_rate - sigma_rough * sigma_rough);

    // refine lambda by posterior-expected jump counts, then re-split the
    // quadratic variation
    let rough = ModelParams::new(theta, sigma_rough, lambda_rough)?;
    let mix = Mixture::new(rough, delta, config)?;
    let expected_jumps: f64 = (0..n).map(|k| mix.posterior(xs[k], xs[k + 1]).mean()).sum();
    let lambda = clip(expected_jumps / (n as f64 * delta));
    // keep a sane share of the variation on the diffusion side even when
    // the jump count estimate swallows most of it
    let sigma = clip((qv_rate - lambda).max(0.05 * qv_rate).sqrt());
    ModelParams::new(theta, sigma, lambda)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Maximize the exact likelihood by BFGS over log-parameters.
///
/// Requires at least 10 observation intervals and a non-constant path.
/// Non-convergence within `max_iter` is reported (`converged = false`),
/// not an error.
pub fn fit_mle(path: &DiscretePath, config: &FitConfig) -> Result<FitReport> {
    if path.intervals() < 10 {
        return Err(Error::invalid(
            "n",
            path.intervals() as f64,
            "fit requires at least 10 intervals",
        ));
    }
    let xs = path.values();
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::DegeneratePath);
    }

    let start = match config.init {
        InitStrategy::Given(p) => p,
        InitStrategy::Auto => auto_init(path, config.mixture)?,
    };
    let start = apply_bounds(start, config.bounds)?;

    // objective F(psi) = -loglik(exp(psi)); grad_psi = -score * param
    let eval = |psi: [f64; 3]| -> Result<(f64, [f64; 3], [f64; 3])> {
        let p = ModelParams::new(psi[0].exp(), psi[1].exp(), psi[2].exp())?;
        let (ll, sc) = loglik_and_score(path, p, config.mixture)?;
        let g = [-sc[0] * p.theta(), -sc[1] * p.sigma(), -sc[2] * p.lambda()];
        Ok((-ll, g, sc))
    };
    let value_only = |psi: [f64; 3]| -> Result<f64> {
        let p = ModelParams::new(psi[0].exp(), psi[1].exp(), psi[2].exp())?;
        Ok(-log_likelihood(path, p, config.mixture)?)
    };

    let mut psi = [start.theta().ln(), start.sigma().ln(), start.lambda().ln()];
    // Fisher-scaled diagonal preconditioner: curvature of the objective in
    // log-parameters is roughly rate_i^2 * Gamma_ii * param_i^2, so seeding
    // the inverse Hessian with its inverse keeps the first steps sane
    let precondition = |p: ModelParams| -> [[f64; 3]; 3] {
        let gm = fisher_matrix(p);
        let rate = rate_matrix(path.scheme());
        let a = p.to_array();
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            m[i][i] = 1.0 / (rate[i] * rate[i] * gm[i][i] * a[i] * a[i]).max(1e-12);
        }
        m
    };
    let (mut fval, mut grad, mut sc) = eval(psi)?;
    let mut hinv = precondition(start);
    let mut iterations = 0;

    while norm(&sc) > config.grad_tol && iterations < config.max_iter {
        let mut dir = neg_matvec(&hinv, &grad);
        if dot(&dir, &grad) >= 0.0 {
            hinv = precondition(ModelParams::new(psi[0].exp(), psi[1].exp(), psi[2].exp())?);
            dir = neg_matvec(&hinv, &grad);
        }
        let slope = dot(&dir, &grad);

        // Armijo backtracking with halving; strict decrease, so a stall at
        // the objective's floating-point resolution terminates the fit
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-12 {
            let trial = [
                psi[0] + alpha * dir[0],
                psi[1] + alpha * dir[1],
                psi[2] + alpha * dir[2],
            ];
            if trial == psi {
                break;
            }
            if let Ok(ft) = value_only(trial) {
                if ft.is_finite() && ft < fval + 1e-4 * alpha * slope && ft < fval {
                    accepted = Some(trial);
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some(mut new_psi) = accepted else {
            // The objective is flat at floating-point resolution while the
            // score can still be resolved; finish with Newton steps on the
            // score (finite-difference Jacobian of the psi-gradient).
            while norm(&sc) > config.grad_tol && iterations < config.max_iter {
                let h = 1e-6;
                let mut jac = [[0.0; 3]; 3];
                let mut ok = true;
                for j in 0..3 {
                    let mut bumped = psi;
                    bumped[j] += h;
                    match eval(bumped) {
                        Ok((_, gb, _)) => {
                            for i in 0..3 {
                                jac[i][j] = (gb[i] - grad[i]) / h;
                            }
                        }
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                let Some(step) = (if ok { solve3(&jac, &neg(&grad)) } else { None }) else {
                    break;
                };
                let mut improved = false;
                let mut a = 1.0;
                for _ in 0..8 {
                    let trial = [
                        psi[0] + a * step[0],
                        psi[1] + a * step[1],
                        psi[2] + a * step[2],
                    ];
                    if trial == psi {
                        break;
                    }
                    if let Ok((f_t, g_t, sc_t)) = eval(trial) {
                        if f_t.is_finite() && norm(&sc_t) < 0.9 * norm(&sc) {
                            psi = trial;
                            fval = f_t;
                            grad = g_t;
                            sc = sc_t;
                            iterations += 1;
                            improved = true;
                            break;
                        }
                    }
                    a *= 0.5;
                }
                if !improved {
                    break;
                }
            }
            break;
        };

        // project into the box, in log coordinates
        let mut projected = false;
        if let Some(b) = config.bounds {
            for i in 0..3 {
                let lo = b.lower[i].ln();
                let hi = b.upper[i].ln();
                let clamped = new_psi[i].clamp(lo, hi);
                if clamped != new_psi[i] {
                    projected = true;
                    new_psi[i] = clamped;
                }
            }
        }

        let (f_new, g_new, sc_new) = eval(new_psi)?;
        let s = sub(&new_psi, &psi);
        let y = sub(&g_new, &grad);
        if projected {
            hinv = precondition(ModelParams::new(
                new_psi[0].exp(),
                new_psi[1].exp(),
                new_psi[2].exp(),
            )?);
        } else {
            let sy = dot(&s, &y);
            if norm(&s) > 1e-9 && sy > 1e-10 * norm(&s) * norm(&y) {
                hinv = bfgs_update(&hinv, &s, &y, sy);
            }
        }
        psi = new_psi;
        fval = f_new;
        grad = g_new;
        sc = sc_new;
        iterations += 1;
    }

    let estimate = ModelParams::new(psi[0].exp(), psi[1].exp(), psi[2].exp())?;
    let grad_norm = norm(&sc);
    let converged = grad_norm <= config.grad_tol;

    let gamma = fisher_matrix(estimate);
    let rate = rate_matrix(path.scheme());
    let mut asymptotic_cov = [[0.0; 3]; 3];
    let mut stderr = [0.0; 3];
    for i in 0..3 {
        asymptotic_cov[i][i] = 1.0 / (gamma[i][i] * rate[i] * rate[i]);
        stderr[i] = asymptotic_cov[i][i].sqrt();
    }

    Ok(FitReport {
        estimate,
        loglik: -fval,
        grad_norm,
        iterations,
        converged,
        asymptotic_cov,
        stderr,
    })
}

fn apply_bounds(p: ModelParams, bounds: Option<ParamBounds>) -> Result<ModelParams> {
    match bounds {
        None => Ok(p),
        Some(b) => {
            let a = p.to_array();
            ModelParams::new(
                a[0].clamp(b.lower[0], b.upper[0]),
                a[1].clamp(b.lower[1], b.upper[1]),
                a[2].clamp(b.lower[2], b.upper[2]),
            )
        }
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn neg(v: &[f64; 3]) -> [f64; 3] {
    [-v[0], -v[1], -v[2]]
}

/// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = *a;
    let mut rhs = *b;
    for col in 0..3 {
        let mut pivot = col;
        for row in (col + 1)..3 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

fn neg_matvec(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = -(m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2]);
    }
    out
}

/// Inverse-Hessian BFGS update `(I - r s y') H (I - r y s') + r s s'`.
fn bfgs_update(h: &[[f64; 3]; 3], s: &[f64; 3], y: &[f64; 3], sy: f64) -> [[f64; 3]; 3] {
    let r = 1.0 / sy;
    let mut hy = [0.0; 3];
    for i in 0..3 {
        hy[i] = h[i][0] * y[0] + h[i][1] * y[1] + h[i][2] * y[2];
    }
    let yhy = dot(y, &hy);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = h[i][j] - r * (hy[i] * s[j] + s[i] * hy[j])
                + r * r * yhy * s[i] * s[j]
                + r * s[i] * s[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SamplingScheme;
    use crate::rng::RngStream;
    use crate::simulate::simulate_path;
    use approx::assert_relative_eq;

    fn params111() -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0).unwrap()
    }

    fn cfg() -> MixtureConfig {
        MixtureConfig::default()
    }

    #[test]
    fn single_step_likelihood_equals_log_density() {
        let scheme = SamplingScheme::new(1, 0.1, 0.2).unwrap();
        let path = DiscretePath::new(scheme, vec![0.2, 0.5], None).unwrap();
        let ll = log_likelihood(&path, params111(), cfg()).unwrap();
        let mix = Mixture::new(params111(), 0.1, cfg()).unwrap();
        assert_relative_eq!(ll, mix.log_density(0.2, 0.5), max_relative = 1e-15);
    }

    #[test]
    fn likelihood_is_not_shift_invariant() {
        let scheme = SamplingScheme::new(2, 0.1, 0.0).unwrap();
        let path = DiscretePath::new(scheme, vec![0.0, 0.3, -0.1], None).unwrap();
        let shifted = DiscretePath::new(scheme, vec![1.0, 1.3, 0.9], None).unwrap();
        let a = log_likelihood(&path, params111(), cfg()).unwrap();
        let b = log_likelihood(&shifted, params111(), cfg()).unwrap();
        // direct composition of per-interval densities
        let mix = Mixture::new(params111(), 0.1, cfg()).unwrap();
        let direct = mix.log_density(0.0, 0.3) + mix.log_density(0.3, -0.1);
        assert_relative_eq!(a, direct, max_relative = 1e-14);
        assert!((a - b).abs() > 1e-6);
    }

    #[test]
    fn truth_beats_doubled_theta_on_long_path() {
        let scheme = SamplingScheme::new(10_000, 0.05, 0.0).unwrap();
        let path = simulate_path(params111(), scheme, RngStream::new(314, 0), false).unwrap();
        let at_truth = log_likelihood(&path, params111(), cfg()).unwrap();
        let doubled = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let at_doubled = log_likelihood(&path, doubled, cfg()).unwrap();
        assert!(at_truth > at_doubled);
    }

    #[test]
    fn ratio_is_antisymmetric_and_matches_difference() {
        let scheme = SamplingScheme::new(200, 0.05, 0.1).unwrap();
        let path = simulate_path(params111(), scheme, RngStream::new(4, 0), false).unwrap();
        let alt = ModelParams::new(1.2, 0.9, 1.4).unwrap();
        let ab = log_likelihood_ratio(&path, params111(), alt, cfg()).unwrap();
        let ba = log_likelihood_ratio(&path, alt, params111(), cfg()).unwrap();
        assert_eq!(ab, -ba);
        let la = log_likelihood(&path, alt, cfg()).unwrap();
        let lb = log_likelihood(&path, params111(), cfg()).unwrap();
        assert!((ab - (la - lb)).abs() < 1e-10);
        // identical parameters: exactly zero
        let zero = log_likelihood_ratio(&path, params111(), params111(), cfg()).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn score_matches_finite_differences_on_seeded_path() {
        let scheme = SamplingScheme::new(50, 0.1, 0.0).unwrap();
        let path = simulate_path(params111(), scheme, RngStream::new(11, 0), false).unwrap();
        let at = ModelParams::new(0.8, 1.1, 1.3).unwrap();
        let sc = score(&path, at, cfg()).unwrap();
        let base = at.to_array();
        for i in 0..3 {
            let h = 1e-5 * (1.0 + base[i].abs());
            let mut hi = base;
            hi[i] += h;
            let mut lo = base;
            lo[i] -= h;
            let f_hi = log_likelihood(&path, ModelParams::from_array(hi).unwrap(), cfg()).unwrap();
            let f_lo = log_likelihood(&path, ModelParams::from_array(lo).unwrap(), cfg()).unwrap();
            let fd = (f_hi - f_lo) / (2.0 * h);
            let scale = sc[i].abs().max(fd.abs()).max(1e-8);
            assert!(
                (sc[i] - fd).abs() / scale < 1e-4,
                "component {i}: {} vs {}",
                sc[i],
                fd
            );
        }
    }

    #[test]
    fn score_averages_to_zero_at_truth() {
        let scheme = SamplingScheme::new(200, 0.05, 0.0).unwrap();
        let reps = 200;
        let mut sums = [0.0f64; 3];
        let mut sq = [0.0f64; 3];
        for r in 0..reps {
            let path =
                simulate_path(params111(), scheme, RngStream::new(550, r as u64), false).unwrap();
            let sc = score(&path, params111(), cfg()).unwrap();
            for i in 0..3 {
                sums[i] += sc[i];
                sq[i] += sc[i] * sc[i];
            }
        }
        for i in 0..3 {
            let mean = sums[i] / reps as f64;
            let var = sq[i] / reps as f64 - mean * mean;
            let se = (var / reps as f64).sqrt();
            assert!(mean.abs() < 4.0 * se, "component {i}: mean {mean}, se {se}");
        }
    }

    #[test]
    fn fit_recovers_parameters_on_fixture() {
        let truth = ModelParams::new(1.0, 0.5, 2.0).unwrap();
        let scheme = SamplingScheme::new(5000, 0.05, 0.0).unwrap();
        let path = simulate_path(truth, scheme, RngStream::new(1234, 0), false).unwrap();
        let report = fit_mle(&path, &FitConfig::default()).unwrap();
        assert!(report.converged, "no convergence: {report:?}");
        let est = report.estimate.to_array();
        let tru = truth.to_array();
        for i in 0..3 {
            assert!(
                (est[i] - tru[i]).abs() < 3.0 * report.stderr[i],
                "coordinate {i}: {} vs {} +- {}",
                est[i],
                tru[i],
                report.stderr[i]
            );
        }
        // the reported score norm honors the convergence tolerance
        assert!(report.grad_norm <= 1e-8);

        // refitting from the estimate terminates immediately
        let again = fit_mle(
            &path,
            &FitConfig {
                init: InitStrategy::Given(report.estimate),
                ..FitConfig::default()
            },
        )
        .unwrap();
        assert!(again.iterations <= 2);
        assert!(again.converged);
    }

    #[test]
    fn fit_is_deterministic() {
        let scheme = SamplingScheme::new(600, 0.05, 0.0).unwrap();
        let path = simulate_path(params111(), scheme, RngStream::new(21, 0), false).unwrap();
        let a = fit_mle(&path, &FitConfig::default()).unwrap();
        let b = fit_mle(&path, &FitConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn solve3_inverts_a_known_system() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, -1.0], [0.0, -1.0, 2.0]];
        let x = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += a[i][j] * x[j];
            }
        }
        let got = solve3(&a, &b).unwrap();
        for i in 0..3 {
            assert_relative_eq!(got[i], x[i], max_relative = 1e-12);
        }
        // singular matrix is refused
        let singular = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]];
        assert!(solve3(&singular, &b).is_none());
    }

    #[test]
    fn bounds_constrain_the_estimate() {
        let scheme = SamplingScheme::new(400, 0.05, 0.0).unwrap();
        let path = simulate_path(params111(), scheme, RngStream::new(13, 0), false).unwrap();
        let bounds = ParamBounds::new([0.1, 0.1, 2.0], [10.0, 10.0, 5.0]).unwrap();
        let config = FitConfig {
            bounds: Some(bounds),
            ..FitConfig::default()
        };
        let report = fit_mle(&path, &config).unwrap();
        let est = report.estimate.to_array();
        for i in 0..3 {
            assert!(est[i] >= bounds.lower[i] * (1.0 - 1e-12));
            assert!(est[i] <= bounds.upper[i] * (1.0 + 1e-12));
        }
        // lambda's true value (1) is excluded, so it lands on the wall
        assert_relative_eq!(est[2], 2.0, max_relative = 1e-9);

        assert!(ParamBounds::new([0.0, 0.1, 0.1], [1.0, 1.0, 1.0]).is_err());
        assert!(ParamBounds::new([0.5, 0.1, 0.1], [0.4, 1.0, 1.0]).is_err());
    }

    #[test]
    fn fit_rejects_short_or_constant_paths() {
        let scheme = SamplingScheme::new(5, 0.1, 0.0).unwrap();
        let path = DiscretePath::new(scheme, vec![0.0, 0.1, 0.2, 0.1, 0.0, 0.1], None).unwrap();
        assert!(fit_mle(&path, &FitConfig::default()).is_err());

        let scheme = SamplingScheme::new(12, 0.1, 0.5).unwrap();
        let flat = DiscretePath::new(scheme, vec![0.5; 13], None).unwrap();
        assert!(matches!(
            fit_mle(&flat, &FitConfig::default()),
            Err(Error::DegeneratePath)
        ));
    }

    #[test]
    fn stderr_scales_with_the_rate_matrix() {
        // double n at fixed delta; the half-length path is a prefix of the
        // full one so the two estimates track each other closely
        let truth = params111();
        let scheme_2 = SamplingScheme::new(200_000, 0.01, 0.0).unwrap();
        let path_2 = simulate_path(truth, scheme_2, RngStream::new(66, 0), false).unwrap();
        let scheme_1 = SamplingScheme::new(100_000, 0.01, 0.0).unwrap();
        let path_1 =
            DiscretePath::new(scheme_1, path_2.values()[..100_001].to_vec(), None).unwrap();
        let r1 = fit_mle(&path_1, &FitConfig::default()).unwrap();
        let r2 = fit_mle(&path_2, &FitConfig::default()).unwrap();
        let expected = 1.0 / 2f64.sqrt();
        for i in 0..3 {
            let ratio = r2.stderr[i] / r1.stderr[i];
            assert!(
                (ratio / expected - 1.0).abs() < 0.05,
                "coordinate {i}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn observed_information_is_symmetric_and_positive_definite_at_mle() {
        let scheme = SamplingScheme::new(800, 0.05, 0.0).unwrap();
        let path = simulate_path(params111(), scheme, RngStream::new(77, 0), false).unwrap();
        let report = fit_mle(&path, &FitConfig::default()).unwrap();
        let h = observed_information(&path, report.estimate, cfg()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h[i][j], h[j][i]);
            }
        }
        // leading principal minors positive
        let m1 = h[0][0];
        let m2 = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let m3 = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1])
            - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
            + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
        assert!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0, "minors: {m1} {m2} {m3}");
    }

    #[test]
    fn normalized_observed_information_approaches_fisher() {
        let scheme = SamplingScheme::new(10_000, 0.02, 0.0).unwrap();
        let path = simulate_path(params111(), scheme, RngStream::new(1, 0), false).unwrap();
        let h = observed_information(&path, params111(), cfg()).unwrap();
        let rate = rate_matrix(scheme);
        let gamma = fisher_matrix(params111());
        for i in 0..3 {
            let normalized = h[i][i] / (rate[i] * rate[i]);
            assert!(
                (normalized / gamma[i][i] - 1.0).abs() < 0.15,
                "coordinate {i}: {normalized} vs {}",
                gamma[i][i]
            );
        }
    }
}
