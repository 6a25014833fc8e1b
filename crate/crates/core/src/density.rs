//! Jump-conditioned transition densities and the Poisson mixture.
//!
//! Conditional on `j` jumps at offsets `u_1..u_j` inside a step of length
//! `d`, the transition is Gaussian with variance
//! `v = sigma^2 (1 - e^{-2 theta d}) / (2 theta)` and mean
//! `x e^{-theta d} - (lambda/theta)(1 - e^{-theta d}) + sum_i e^{-theta (d - u_i)}`.
//! Marginalizing the offsets (order statistics of uniforms, or equivalently
//! the plain product measure divided by `d^j`) gives `q_j`, and the
//! transition density is the Poisson-weighted mixture
//!
//! ```text
//! p(d, x, y) = sum_{j>=0} q_j(d, x, y) e^{-lambda d} (lambda d)^j / j!
//! ```
//!
//! truncated where the Poisson tail, scaled by the Gaussian peak height,
//! drops below a configured epsilon.
//!
//! Everything here runs off one precomputed table per `(params, delta,
//! config)`: per jump count a list of quadrature nodes carrying a weight,
//! the jump-shift value and its theta-derivative. The offset integrals use
//! a Gauss-Legendre tensor rule for `j <= 3` and deterministic Halton
//! averaging for `j >= 4`. Evaluation, gradients, posterior and CDF all
//! walk that table in log-space, skipping mixture terms whose best case is
//! more than `e^{-46}` below the leading one.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::quad::{halton_points, GaussLegendre, HALTON_MAX_DIM};
use crate::rng::RngStream;
use crate::simulate::sample_transition;

/// Hard cap on the mixture truncation order.
pub const J_CAP: usize = 64;

/// Relative log-magnitude below which mixture terms are skipped (~1e-20).
const PRUNE_LOG: f64 = 46.0;

/// Truncation selector for the Poisson mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JTruncation {
    /// Smallest `J` whose Poisson tail, times the Gaussian peak height,
    /// is below `tail_epsilon` (capped at [`J_CAP`]).
    Auto,
    /// Fixed number of jump terms (`0..=j`, at most [`J_CAP`]).
    Fixed(usize),
}

/// Tuning knobs for mixture evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureConfig {
    j_max: JTruncation,
    tail_epsilon: f64,
    quadrature_order: usize,
    mc_nodes: usize,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        MixtureConfig {
            j_max: JTruncation::Auto,
            tail_epsilon: 1e-12,
            quadrature_order: 32,
            mc_nodes: 4096,
        }
    }
}

impl MixtureConfig {
    pub fn new(
        j_max: JTruncation,
        tail_epsilon: f64,
        quadrature_order: usize,
        mc_nodes: usize,
    ) -> Result<Self> {
        if let JTruncation::Fixed(j) = j_max {
            if j > J_CAP {
                return Err(Error::invalid("j_max", j as f64, "must be <= 64"));
            }
        }
        if !(tail_epsilon > 0.0 && tail_epsilon < 1e-6) {
            return Err(Error::invalid(
                "tail_epsilon",
                tail_epsilon,
                "must be in (0, 1e-6)",
            ));
        }
        if quadrature_order < 8 {
            return Err(Error::invalid(
                "quadrature_order",
                quadrature_order as f64,
                "must be >= 8",
            ));
        }
        if mc_nodes == 0 {
            return Err(Error::invalid("mc_nodes", 0.0, "must be >= 1"));
        }
        Ok(MixtureConfig {
            j_max,
            tail_epsilon,
            quadrature_order,
            mc_nodes,
        })
    }

    /// Replace the truncation selector; fixed orders saturate at [`J_CAP`].
    pub fn with_j_max(mut self, j_max: JTruncation) -> Self {
        self.j_max = match j_max {
            JTruncation::Fixed(j) => JTruncation::Fixed(j.min(J_CAP)),
            auto => auto,
        };
        self
    }

    pub fn j_max(&self) -> JTruncation {
        self.j_max
    }

    pub fn tail_epsilon(&self) -> f64 {
        self.tail_epsilon
    }

    pub fn quadrature_order(&self) -> usize {
        self.quadrature_order
    }

    pub fn mc_nodes(&self) -> usize {
        self.mc_nodes
    }
}

/// Posterior distribution of the interval jump count given one transition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpPosterior {
    probabilities: Vec<f64>,
}

impl JumpPosterior {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Most probable jump count; ties break toward the smaller count.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (j, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = j;
            }
        }
        best
    }

    /// Posterior expected jump count.
    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(j, &p)| j as f64 * p)
            .sum()
    }
}

#[derive(Debug, Clone)]
struct QNode {
    weight: f64,
    shift: f64,
    /// d(shift)/d(theta), nodes held fixed.
    dshift: f64,
}

#[derive(Debug, Clone)]
struct JumpTerm {
    shift_min: f64,
    shift_max: f64,
    nodes: Vec<QNode>,
}

/// Precomputed transition-density evaluator for one `(params, delta, config)`.
#[derive(Debug, Clone)]
pub struct Mixture {
    params: ModelParams,
    delta: f64,
    decay: f64,
    drift: f64,
    var: f64,
    d_decay_dtheta: f64,
    d_drift_dtheta: f64,
    d_drift_dlambda: f64,
    d_var_dtheta: f64,
    d_var_dsigma: f64,
    log_norm: f64,
    log_pois: Vec<f64>,
    terms: Vec<JumpTerm>,
    capped: bool,
}

#[derive(Debug, Default, Clone, Copy)]
struct EvalSums {
    scale: f64,
    total: f64,
    /// sum of e * r with r = y - mean(node)
    r1: f64,
    /// sum of e * r^2
    r2: f64,
    /// sum of e * r * dshift
    rdshift: f64,
    /// sum of j * (term subtotal)
    jweighted: f64,
}

impl Mixture {
    pub fn new(params: ModelParams, delta: f64, config: MixtureConfig) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::invalid("delta", delta, "must be finite and > 0"));
        }
        let theta = params.theta();
        let sigma = params.sigma();
        let lambda = params.lambda();

        let decay = (-theta * delta).exp();
        let drift = lambda / theta * (-theta * delta).exp_m1();
        let var = sigma * sigma * (-(-2.0 * theta * delta).exp_m1()) / (2.0 * theta);

        let d_decay_dtheta = -delta * decay;
        let d_drift_dtheta =
            -lambda * delta * decay / theta + lambda * (1.0 - decay) / (theta * theta);
        let d_drift_dlambda = (-theta * delta).exp_m1() / theta;
        let d_var_dtheta =
            sigma * sigma * delta * (-2.0 * theta * delta).exp() / theta - var / theta;
        let d_var_dsigma = 2.0 * var / sigma;

        let mean_jumps = lambda * delta;
        let (j_max, capped) = match config.j_max {
            JTruncation::Fixed(j) => (j.min(J_CAP), false),
            JTruncation::Auto => {
                let peak = 1.0 / (2.0 * std::f64::consts::PI * var).sqrt();
                auto_truncation(mean_jumps, peak, config.tail_epsilon)
            }
        };

        let log_mean = mean_jumps.ln();
        let mut log_pois = Vec::with_capacity(j_max + 1);
        let mut log_fact = 0.0;
        for j in 0..=j_max {
            if j > 0 {
                log_fact += (j as f64).ln();
            }
            log_pois.push(-mean_jumps + j as f64 * log_mean - log_fact);
        }

        let mut terms = Vec::with_capacity(j_max + 1);
        terms.push(JumpTerm {
            shift_min: 0.0,
            shift_max: 0.0,
            nodes: vec![QNode {
                weight: 1.0,
                shift: 0.0,
                dshift: 0.0,
            }],
        });
        if j_max >= 1 {
            let rule = GaussLegendre::new(config.quadrature_order);
            // per-offset shift contribution z(u) = e^{-theta (delta - u)}
            let base: Vec<(f64, f64, f64)> = rule
                .scaled(0.0, delta)
                .into_iter()
                .map(|(u, w)| {
                    let z = (-theta * (delta - u)).exp();
                    (w / delta, z, -(delta - u) * z)
                })
                .collect();
            for j in 1..=j_max {
                let nodes = if j <= 3 {
                    tensor_nodes(&base, j)
                } else {
                    qmc_nodes(theta, delta, j, config.mc_nodes)
                };
                terms.push(JumpTerm {
                    shift_min: j as f64 * decay,
                    shift_max: j as f64,
                    nodes,
                });
            }
        }

        Ok(Mixture {
            params,
            delta,
            decay,
            drift,
            var,
            d_decay_dtheta,
            d_drift_dtheta,
            d_drift_dlambda,
            d_var_dtheta,
            d_var_dsigma,
            log_norm: -0.5 * (2.0 * std::f64::consts::PI * var).ln(),
            log_pois,
            terms,
            capped,
        })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Resolved truncation order (inclusive).
    pub fn j_max(&self) -> usize {
        self.terms.len() - 1
    }

    /// True when the AUTO rule hit [`J_CAP`] before meeting `tail_epsilon`.
    pub fn capped(&self) -> bool {
        self.capped
    }

    /// Conditional variance of the transition (independent of x and jumps).
    pub fn var(&self) -> f64 {
        self.var
    }

    /// Conditional mean given no jumps.
    pub fn mean_no_jump(&self, x: f64) -> f64 {
        x * self.decay + self.drift
    }

    /// Best-case log magnitude of term `j` at displacement `d` from the
    /// no-jump mean, up to factors shared by all terms.
    #[inline]
    fn term_bound(&self, j: usize, d: f64, inv2v: f64) -> f64 {
        let term = &self.terms[j];
        let gap = if d < term.shift_min {
            term.shift_min - d
        } else if d > term.shift_max {
            d - term.shift_max
        } else {
            0.0
        };
        self.log_pois[j] - gap * gap * inv2v
    }

    fn eval(&self, x: f64, y: f64, grad: bool, mut per_j: Option<&mut Vec<f64>>) -> EvalSums {
        let d = y - self.mean_no_jump(x);
        let inv2v = 0.5 / self.var;
        let m = self.terms.len();
        let mut bounds = [0.0f64; J_CAP + 1];
        let mut scale = f64::NEG_INFINITY;
        for j in 0..m {
            bounds[j] = self.term_bound(j, d, inv2v);
            if bounds[j] > scale {
                scale = bounds[j];
            }
        }
        if let Some(buf) = per_j.as_deref_mut() {
            buf.clear();
            buf.resize(m, 0.0);
        }
        let mut sums = EvalSums {
            scale,
            ..EvalSums::default()
        };
        let mut total = 0.0;
        for j in 0..m {
            if bounds[j] < scale - PRUNE_LOG {
                continue;
            }
            let log_w = self.log_pois[j] - scale;
            let mut t = 0.0;
            if grad {
                for node in &self.terms[j].nodes {
                    let r = d - node.shift;
                    let e = node.weight * (log_w - r * r * inv2v).exp();
                    t += e;
                    sums.r1 += e * r;
                    sums.r2 += e * r * r;
                    sums.rdshift += e * r * node.dshift;
                }
            } else {
                for node in &self.terms[j].nodes {
                    let r = d - node.shift;
                    t += node.weight * (log_w - r * r * inv2v).exp();
                }
            }
            total += t;
            sums.jweighted += j as f64 * t;
            if let Some(buf) = per_j.as_deref_mut() {
                buf[j] = t;
            }
        }
        sums.total = total;
        if !(sums.total > 0.0 && sums.total.is_finite()) {
            // The bound-based scale can be unreachable by the discrete
            // nodes when the variance is many orders below the node
            // spacing; redo the pass with the exact node-wise maximum.
            return self.eval_exact_scale(d, inv2v, grad, per_j);
        }
        sums
    }

    /// Exact log-sum-exp over all nodes; the robust fallback for extreme
    /// inputs where the fast bound-scaled pass under- or overflows.
    fn eval_exact_scale(
        &self,
        d: f64,
        inv2v: f64,
        grad: bool,
        mut per_j: Option<&mut Vec<f64>>,
    ) -> EvalSums {
        let mut amax = f64::NEG_INFINITY;
        for (j, term) in self.terms.iter().enumerate() {
            for node in &term.nodes {
                let r = d - node.shift;
                let a = self.log_pois[j] + node.weight.ln() - (r * inv2v) * r;
                if a > amax {
                    amax = a;
                }
            }
        }
        let mut sums = EvalSums {
            scale: amax,
            ..EvalSums::default()
        };
        if let Some(buf) = per_j.as_deref_mut() {
            buf.clear();
            buf.resize(self.terms.len(), 0.0);
        }
        if !amax.is_finite() {
            sums.total = f64::NAN;
            return sums;
        }
        for (j, term) in self.terms.iter().enumerate() {
            let mut t = 0.0;
            for node in &term.nodes {
                let r = d - node.shift;
                let a = self.log_pois[j] + node.weight.ln() - (r * inv2v) * r;
                if a - amax <= -746.0 {
                    continue;
                }
                let e = (a - amax).exp();
                t += e;
                if grad {
                    sums.r1 += e * r;
                    sums.r2 += e * r * r;
                    sums.rdshift += e * r * node.dshift;
                }
            }
            sums.total += t;
            sums.jweighted += j as f64 * t;
            if let Some(buf) = per_j.as_deref_mut() {
                buf[j] = t;
            }
        }
        sums
    }

    /// Transition density `p(delta, x, y)`.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        self.log_density(x, y).exp()
    }

    /// `log p(delta, x, y)`.
    pub fn log_density(&self, x: f64, y: f64) -> f64 {
        let sums = self.eval(x, y, false, None);
        sums.total.ln() + sums.scale + self.log_norm
    }

    /// `log p` together with its gradient in `(theta, sigma, lambda)`.
    ///
    /// Each mixture term is differentiated in closed form with the
    /// quadrature nodes held fixed, so the gradient is exactly the
    /// derivative of the value [`Mixture::log_density`] computes.
    pub fn log_density_grad(&self, x: f64, y: f64) -> (f64, [f64; 3]) {
        let sums = self.eval(x, y, true, None);
        let t = sums.total;
        let v = self.var;
        let logp = t.ln() + sums.scale + self.log_norm;

        // d log N / d mu = r / v, d log N / d v = (r^2 - v) / (2 v^2)
        let curvature = sums.r2 / (2.0 * v * v) - t / (2.0 * v);
        let dmu_dtheta = x * self.d_decay_dtheta + self.d_drift_dtheta;
        let g_theta =
            ((sums.r1 * dmu_dtheta + sums.rdshift) / v + curvature * self.d_var_dtheta) / t;
        let g_sigma = curvature * self.d_var_dsigma / t;
        let lambda = self.params.lambda();
        // sum over j of (j/lambda - delta) * T_j
        let pois_part = sums.jweighted / lambda - self.delta * t;
        let g_lambda = (pois_part + sums.r1 / v * self.d_drift_dlambda) / t;
        (logp, [g_theta, g_sigma, g_lambda])
    }

    /// Posterior distribution of the jump count given the transition (x, y).
    pub fn posterior(&self, x: f64, y: f64) -> JumpPosterior {
        let mut per_j = Vec::new();
        let sums = self.eval(x, y, false, Some(&mut per_j));
        let probabilities = per_j.iter().map(|&t| t / sums.total).collect();
        JumpPosterior { probabilities }
    }

    /// CDF of the transition law in `y`.
    pub fn cdf(&self, x: f64, y: f64) -> f64 {
        let d = y - self.mean_no_jump(x);
        let sd = self.var.sqrt();
        let mut total = 0.0;
        for (j, term) in self.terms.iter().enumerate() {
            let pi_j = self.log_pois[j].exp();
            if pi_j == 0.0 {
                continue;
            }
            // a term saturates to pi_j (or 0) once the whole shift range is
            // more than 8 standard deviations below (or above) y
            if (d - term.shift_max) / sd > 8.0 {
                total += pi_j;
            } else if (d - term.shift_min) / sd > -8.0 {
                let mut f = 0.0;
                for node in &term.nodes {
                    f += node.weight * normal_cdf((d - node.shift) / sd);
                }
                total += pi_j * f;
            }
        }
        total.clamp(0.0, 1.0)
    }

    /// Quantile of the transition law in `y`, by bisection on the CDF.
    pub fn quantile(&self, x: f64, prob: f64) -> f64 {
        assert!(prob > 0.0 && prob < 1.0, "prob must be in (0,1)");
        let sd = self.var.sqrt();
        let mut lo = self.mean_no_jump(x) - 10.0 * sd;
        let mut hi = self.mean_no_jump(x) + self.j_max() as f64 + 10.0 * sd;
        while self.cdf(x, lo) > prob {
            lo -= 10.0 * sd + 1.0;
        }
        while self.cdf(x, hi) < prob {
            hi += 10.0 * sd + 1.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo < 1e-13 * (1.0 + mid.abs()) {
                break;
            }
            if self.cdf(x, mid) < prob {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// AUTO truncation: smallest J with `P(Pois(m) > J) * peak < eps`, capped.
fn auto_truncation(mean: f64, peak: f64, eps: f64) -> (usize, bool) {
    if mean >= J_CAP as f64 {
        return (J_CAP, true);
    }
    let budget = eps / peak.max(f64::MIN_POSITIVE);
    let mut pi = (-mean).exp();
    for j in 0..J_CAP {
        // tail mass strictly beyond j, summed upward until it stabilizes
        let mut tail = 0.0;
        let mut term = pi;
        let mut i = j;
        while i < j + 400 {
            i += 1;
            term *= mean / i as f64;
            tail += term;
            if term < 1e-3 * tail.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        if tail < budget {
            return (j, false);
        }
        pi *= mean / (j + 1) as f64;
    }
    (J_CAP, true)
}

/// Tensor-product nodes for the j-fold offset integral, j <= 3.
fn tensor_nodes(base: &[(f64, f64, f64)], j: usize) -> Vec<QNode> {
    let mut nodes = Vec::with_capacity(base.len().pow(j as u32));
    match j {
        1 => {
            for &(w, z, dz) in base {
                nodes.push(QNode {
                    weight: w,
                    shift: z,
                    dshift: dz,
                });
            }
        }
        2 => {
            for &(w1, z1, d1) in base {
                for &(w2, z2, d2) in base {
                    nodes.push(QNode {
                        weight: w1 * w2,
                        shift: z1 + z2,
                        dshift: d1 + d2,
                    });
                }
            }
        }
        3 => {
            for &(w1, z1, d1) in base {
                for &(w2, z2, d2) in base {
                    for &(w3, z3, d3) in base {
                        nodes.push(QNode {
                            weight: w1 * w2 * w3,
                            shift: z1 + z2 + z3,
                            dshift: d1 + d2 + d3,
                        });
                    }
                }
            }
        }
        _ => unreachable!("tensor rule only used for j <= 3"),
    }
    nodes
}

/// Deterministic quasi-Monte-Carlo nodes for the j-fold integral, j >= 4.
fn qmc_nodes(theta: f64, delta: f64, j: usize, count: usize) -> Vec<QNode> {
    let dim = j.min(HALTON_MAX_DIM);
    let points = halton_points(dim, count);
    let w = 1.0 / count as f64;
    points
        .into_iter()
        .map(|p| {
            let mut shift = 0.0;
            let mut dshift = 0.0;
            for i in 0..j {
                let u = p[i % dim] * delta;
                let z = (-theta * (delta - u)).exp();
                shift += z;
                dshift -= (delta - u) * z;
            }
            QNode {
                weight: w,
                shift,
                dshift,
            }
        })
        .collect()
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Density of the transition given no jump: Gaussian around the no-jump mean.
pub fn q0(params: ModelParams, delta: f64, x: f64, y: f64) -> Result<f64> {
    let (mean, var) = crate::simulate::conditional_mean_var(params, delta, x, &[])?;
    Ok(gaussian_pdf(y, mean, var))
}

/// Density of the transition given jumps at the given offsets.
///
/// The offsets need not be sorted; the value is symmetric in them.
pub fn qj_given_times(
    params: ModelParams,
    delta: f64,
    x: f64,
    y: f64,
    jump_offsets: &[f64],
) -> Result<f64> {
    let (mean, var) = crate::simulate::conditional_mean_var(params, delta, x, jump_offsets)?;
    Ok(gaussian_pdf(y, mean, var))
}

/// Density of the transition given exactly `j >= 1` jumps, offsets
/// marginalized out by quadrature over the uniform jump-time law.
pub fn qj_marginal(
    params: ModelParams,
    delta: f64,
    x: f64,
    y: f64,
    j: usize,
    config: MixtureConfig,
) -> Result<f64> {
    if j < 1 {
        return Err(Error::invalid("j", j as f64, "must be >= 1"));
    }
    if j > J_CAP {
        return Err(Error::invalid("j", j as f64, "must be <= 64"));
    }
    let mix = Mixture::new(params, delta, config.with_j_max(JTruncation::Fixed(j)))?;
    let term = &mix.terms[j];
    let inv2v = 0.5 / mix.var;
    let d = y - mix.mean_no_jump(x);
    // single-term evaluation in a stable frame around the closest shift
    let gap = if d < term.shift_min {
        term.shift_min - d
    } else if d > term.shift_max {
        d - term.shift_max
    } else {
        0.0
    };
    let scale = -gap * gap * inv2v;
    let mut total = 0.0;
    for node in &term.nodes {
        let r = d - node.shift;
        total += node.weight * (-r * r * inv2v - scale).exp();
    }
    Ok((total.ln() + scale + mix.log_norm).exp())
}

/// The Poisson-mixture transition density `p(delta, x, y)`.
pub fn transition_density(
    params: ModelParams,
    delta: f64,
    x: f64,
    y: f64,
    config: MixtureConfig,
) -> Result<f64> {
    Ok(Mixture::new(params, delta, config)?.density(x, y))
}

/// Gradient of `log p(delta, x, y)` in `(theta, sigma, lambda)`.
pub fn log_density_grad(
    params: ModelParams,
    delta: f64,
    x: f64,
    y: f64,
    config: MixtureConfig,
) -> Result<[f64; 3]> {
    Ok(Mixture::new(params, delta, config)?
        .log_density_grad(x, y)
        .1)
}

/// Bayes posterior over the interval jump count given the transition (x, y).
pub fn jump_posterior(
    params: ModelParams,
    delta: f64,
    x: f64,
    y: f64,
    config: MixtureConfig,
) -> Result<JumpPosterior> {
    Ok(Mixture::new(params, delta, config)?.posterior(x, y))
}

/// Monte-Carlo misclassification rates of the posterior-mode jump count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisclassificationRates {
    pub delta: f64,
    pub reps: usize,
    /// Rate of {true count 0, classified >= 1}.
    pub zero_as_jump: f64,
    /// Rate of {true count 1, classified != 1}.
    pub one_missed: f64,
    /// Rate of {true count >= 2} (regardless of classification).
    pub two_or_more: f64,
    /// Rate of any mismatch between posterior mode and true count.
    pub any_mismatch: f64,
}

/// Scan posterior-mode misclassification over step sizes.
///
/// For each step, simulates `reps` consecutive transitions with the latent
/// jump counts retained, classifies each interval by the posterior mode
/// (ties toward the smaller count) and tallies the mismatch events. Step
/// `i` draws from stream `stream_id + i` of the given seed.
pub fn misclassification_scan(
    params: ModelParams,
    deltas: &[f64],
    reps: usize,
    stream: RngStream,
    config: MixtureConfig,
) -> Result<Vec<MisclassificationRates>> {
    if reps < 100 {
        return Err(Error::invalid("reps", reps as f64, "must be >= 100"));
    }
    deltas
        .iter()
        .enumerate()
        .map(|(i, &delta)| {
            let mix = Mixture::new(params, delta, config)?;
            let mut rng = stream.with_stream(stream.stream_id() + i as u64).rng();
            let mut x = 0.0;
            let mut zero_as_jump = 0usize;
            let mut one_missed = 0usize;
            let mut two_or_more = 0usize;
            let mut any = 0usize;
            for _ in 0..reps {
                let draw = sample_transition(params, delta, x, &mut rng)?;
                let mode = mix.posterior(x, draw.x_next).mode();
                match draw.jump_count {
                    0 if mode >= 1 => zero_as_jump += 1,
                    1 if mode != 1 => one_missed += 1,
                    _ => {}
                }
                if draw.jump_count >= 2 {
                    two_or_more += 1;
                }
                if mode != draw.jump_count {
                    any += 1;
                }
                x = draw.x_next;
            }
            let r = reps as f64;
            Ok(MisclassificationRates {
                delta,
                reps,
                zero_as_jump: zero_as_jump as f64 / r,
                one_missed: one_missed as f64 / r,
                two_or_more: two_or_more as f64 / r,
                any_mismatch: any as f64 / r,
            })
        })
        .collect()
}

fn gaussian_pdf(y: f64, mean: f64, var: f64) -> f64 {
    let r = y - mean;
    (-r * r / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}
