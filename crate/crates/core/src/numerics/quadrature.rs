//! Gaussian quadrature rules used by the noise-average integrals.

use super::NumericsError;

/// Weight-function family of a [`QuadratureRule`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// Unit weight on a finite interval `[a, b]`.
    Legendre,
    /// Weight `exp(-t^2)` on the whole real line.
    Hermite,
}

/// Nodes and positive weights of a Gaussian quadrature rule.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule: `Σ_i w_i g(x_i)`.
    ///
    /// For a Legendre rule this approximates `∫_a^b g(x) dx`; for a Hermite
    /// rule it approximates `∫ exp(-t^2) g(t) dt`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

/// Gauss-Legendre rule of the given order on `[a, b]`, exact for polynomials
/// up to degree `2*order - 1`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<QuadratureRule, NumericsError> {
    if order == 0 {
        return Err(NumericsError::ZeroOrder);
    }
    if a >= b || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::BadInterval { a, b });
    }

    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    // Newton iteration on P_n, seeded with the Chebyshev-like estimate of the
    // i-th root. Roots come in symmetric pairs, so only half are solved for.
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp;
        let mut iter = 0;
        loop {
            // Legendre recurrence: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
            let mut p0 = 1.0;
            let mut p1 = z;
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * z * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            // P'_n(z) from P_n and P_{n-1}
            dp = (n as f64) * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            iter += 1;
            if dz.abs() < 1e-15 || iter >= 100 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = mid - half * z;
        nodes[n - 1 - i] = mid + half * z;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    if n % 2 == 1 {
        // Newton may leave the central root at 1e-16-level instead of 0.
        nodes[n / 2] = mid;
    }

    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::Legendre,
    })
}

/// Gauss-Hermite rule of the given order for `∫ exp(-t^2) g(t) dt`.
///
/// Nodes and weights come from the Golub-Welsch eigendecomposition of the
/// Jacobi matrix, whose off-diagonal entries are `sqrt(k/2)`.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule, NumericsError> {
    if order == 0 {
        return Err(NumericsError::ZeroOrder);
    }
    let n = order;
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = off;
        jacobi[(k, k - 1)] = off;
    }
    let eigen = jacobi
        .symmetric_eigen();
    let sqrt_pi = std::f64::consts::PI.sqrt();

    let mut pairs: Vec<(f64, f64)> = eigen
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let v0 = eigen.eigenvectors[(0, i)];
            (t, sqrt_pi * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::Hermite,
    })
}
