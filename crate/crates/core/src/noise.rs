//! Phase-noise weight functions: densities, characteristic functions,
//! noise-average integrals and random sampling.

use crate::numerics::{gauss_hermite, gauss_legendre};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Default node count for the noise-average quadratures; overridable per
/// instance with [`PhaseNoise::with_quad_order`].
pub const DEFAULT_QUAD_ORDER: usize = 201;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("noise parameter must be a finite value >= 0, got {0}")]
    BadParameter(f64),
}

/// Noise family and its parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseKind {
    /// No dephasing: a Dirac delta at zero phase.
    None,
    /// Flat window over `[-gamma/2, gamma/2]`; `gamma` is the full width.
    Uniform { gamma: f64 },
    /// Zero-mean normal with standard deviation `sigma`.
    Gaussian { sigma: f64 },
}

/// A phase-noise model `f(phi)`.
///
/// Zero-width uniform and gaussian models degenerate to the delta and
/// behave exactly like [`PhaseNoise::none`].
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseNoise {
    kind: NoiseKind,
    quad_order: usize,
}

impl PhaseNoise {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            quad_order: DEFAULT_QUAD_ORDER,
        }
    }

    /// Uniform window of full width `gamma` (support `[-gamma/2, gamma/2]`).
    pub fn uniform(gamma: f64) -> Result<Self, NoiseError> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(NoiseError::BadParameter(gamma));
        }
        Ok(Self {
            kind: NoiseKind::Uniform { gamma },
            quad_order: DEFAULT_QUAD_ORDER,
        })
    }

    /// Gaussian of standard deviation `sigma`.
    pub fn gaussian(sigma: f64) -> Result<Self, NoiseError> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(NoiseError::BadParameter(sigma));
        }
        Ok(Self {
            kind: NoiseKind::Gaussian { sigma },
            quad_order: DEFAULT_QUAD_ORDER,
        })
    }

    pub fn with_quad_order(mut self, order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        self.quad_order = order;
        self
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    /// True when the model is a point mass at zero phase.
    pub fn is_delta(&self) -> bool {
        match self.kind {
            NoiseKind::None => true,
            NoiseKind::Uniform { gamma } => gamma == 0.0,
            NoiseKind::Gaussian { sigma } => sigma == 0.0,
        }
    }

    /// Density `f(phi)`, or `None` for the delta-like models where no
    /// density exists (use [`integrate`](Self::integrate) or
    /// [`sample`](Self::sample) instead).
    pub fn pdf(&self, phi: f64) -> Option<f64> {
        if self.is_delta() {
            return None;
        }
        match self.kind {
            NoiseKind::None => None,
            NoiseKind::Uniform { gamma } => {
                Some(if phi.abs() <= 0.5 * gamma { 1.0 / gamma } else { 0.0 })
            }
            NoiseKind::Gaussian { sigma } => {
                let z = phi / sigma;
                Some((-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt()))
            }
        }
    }

    /// `∫ dphi f(phi) g(phi)` at the instance's quadrature order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.integrate_with_order(self.quad_order, g)
    }

    /// Same as [`integrate`](Self::integrate) with an explicit node count.
    pub fn integrate_with_order<F: Fn(f64) -> f64>(&self, order: usize, g: F) -> f64 {
        if self.is_delta() {
            return g(0.0);
        }
        match self.kind {
            NoiseKind::None => g(0.0),
            NoiseKind::Uniform { gamma } => {
                let rule = gauss_legendre(order, -0.5 * gamma, 0.5 * gamma)
                    .expect("valid uniform window");
                rule.integrate(g) / gamma
            }
            NoiseKind::Gaussian { sigma } => {
                // Hermite rule absorbs the gaussian weight exactly; the
                // change of variable is phi = sqrt(2) sigma t.
                let rule = gauss_hermite(order).expect("valid order");
                let scale = std::f64::consts::SQRT_2 * sigma;
                rule.integrate(|t| g(scale * t)) / std::f64::consts::PI.sqrt()
            }
        }
    }

    /// Characteristic function `F(k) = ∫ dphi f(phi) e^{i k phi}`, which is
    /// real for these even, zero-mean models.
    pub fn characteristic(&self, k: i64) -> f64 {
        if k == 0 || self.is_delta() {
            return 1.0;
        }
        match self.kind {
            NoiseKind::None => 1.0,
            NoiseKind::Uniform { gamma } => {
                let u = 0.5 * gamma * k as f64;
                u.sin() / u
            }
            NoiseKind::Gaussian { sigma } => {
                let sk = sigma * k as f64;
                (-0.5 * sk * sk).exp()
            }
        }
    }

    /// Draws one noise phase.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.is_delta() {
            return 0.0;
        }
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Uniform { gamma } => rng.random_range(-0.5 * gamma..=0.5 * gamma),
            NoiseKind::Gaussian { sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                sigma * z
            }
        }
    }
}

/// Gaussian standard deviation with the same variance as a uniform window
/// of full width `gamma`: `sigma = gamma / (2 sqrt(3))`.
pub fn matched_sigma(gamma: f64) -> f64 {
    gamma / (2.0 * 3.0_f64.sqrt())
}
