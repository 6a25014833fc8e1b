//! Quadrature rules used by the jump-conditioned density integrals.
//!
//! Gauss-Legendre nodes are computed by Newton iteration on the Legendre
//! recurrence; the Halton sequence supplies deterministic low-discrepancy
//! points for the higher-dimensional jump-time integrals.

/// Gauss-Legendre rule of a given order on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be >= 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Tricomi-style initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_pair(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights scaled to the interval (a, b).
    pub fn scaled(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (mid + half * x, half * w))
            .collect()
    }

    /// Integrate `f` over (a, b).
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.scaled(a, b).iter().map(|&(x, w)| w * f(x)).sum()
    }
}

/// Legendre polynomial P_n and its derivative at x.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// First 64 primes; Halton bases for up to 64 dimensions.
const PRIMES: [u32; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311,
];

/// Maximum dimension supported by [`halton_points`].
pub const HALTON_MAX_DIM: usize = PRIMES.len();

/// Radical inverse of `index` in the given base, in (0, 1) for index >= 1.
fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut fraction = inv;
    let mut result = 0.0;
    while index > 0 {
        result += (index % b) as f64 * fraction;
        index /= b;
        fraction *= inv;
    }
    result
}

/// `count` Halton points in (0, 1)^dim, skipping a short burn-in prefix.
pub fn halton_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    assert!(
        (1..=HALTON_MAX_DIM).contains(&dim),
        "dimension out of range"
    );
    const BURN_IN: u64 = 64;
    (0..count as u64)
        .map(|i| {
            (0..dim)
                .map(|d| radical_inverse(BURN_IN + 1 + i, PRIMES[d]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_order_nodes_match_known_values() {
        let q = GaussLegendre::new(2);
        let r = 1.0 / 3f64.sqrt();
        assert_relative_eq!(q.nodes[0], -r, max_relative = 1e-14);
        assert_relative_eq!(q.nodes[1], r, max_relative = 1e-14);
        assert_relative_eq!(q.weights[0], 1.0, max_relative = 1e-14);

        let q = GaussLegendre::new(3);
        assert_relative_eq!(q.nodes[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(q.weights[1], 8.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // order n is exact through degree 2n-1
        for order in [4usize, 8, 16, 32] {
            let q = GaussLegendre::new(order);
            let deg = 2 * order - 1;
            let exact = (3f64.powi(deg as i32 + 1) - 1.0) / (deg as f64 + 1.0);
            let got = q.integrate(1.0, 3.0, |x| x.powi(deg as i32));
            assert_relative_eq!(got, exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let q = GaussLegendre::new(32);
        let total: f64 = q.scaled(0.0, 0.25).iter().map(|&(_, w)| w).sum();
        assert_relative_eq!(total, 0.25, max_relative = 1e-14);
    }

    #[test]
    fn integrates_smooth_function() {
        let q = GaussLegendre::new(24);
        let got = q.integrate(0.0, 1.0, f64::exp);
        assert_relative_eq!(got, std::f64::consts::E - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn halton_points_lie_strictly_inside() {
        let pts = halton_points(5, 1000);
        assert_eq!(pts.len(), 1000);
        for p in &pts {
            assert_eq!(p.len(), 5);
            for &c in p {
                assert!(c > 0.0 && c < 1.0);
            }
        }
    }

    #[test]
    fn halton_first_dimension_is_equidistributed() {
        let pts = halton_points(1, 4096);
        let mean: f64 = pts.iter().map(|p| p[0]).sum::<f64>() / 4096.0;
        assert_relative_eq!(mean, 0.5, max_relative = 1e-2);
    }
}
