//! Helstrom bound for dephased BPSK coherent states.
//!
//! The difference operator of the two noisy hypotheses is built in a
//! truncated Fock basis and its trace norm gives the minimum error
//! probability allowed by quantum mechanics.

use crate::noise::PhaseNoise;
use crate::numerics::log_factorial;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HelstromError {
    #[error("signal amplitude must be > 0, got {0}")]
    BadAmplitude(f64),
    #[error("Fock truncation must be at least 1, got {0}")]
    BadDimension(usize),
    #[error("symmetric eigensolver did not converge")]
    EigenFailed,
}

/// Dephased difference operator in the Fock basis, real symmetric with a
/// checkerboard sparsity pattern: entries vanish whenever `n + m` is even.
#[derive(Clone, Debug)]
pub struct FockOperator {
    entries: DMatrix<f64>,
}

impl FockOperator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, n: usize, m: usize) -> f64 {
        self.entries[(n, m)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Fock truncation large enough that the neglected Poisson(beta^2) tail is
/// below 1e-12.
pub fn default_dim(beta: f64) -> usize {
    let nbar = beta * beta;
    (nbar + 10.0 * (nbar + 1.0).sqrt() + 10.0).ceil() as usize
}

/// Builds the difference operator for signal amplitude `beta` under the
/// given phase noise, truncated to `dim` Fock states.
///
/// Entry-wise, for odd `n + m`,
/// `Λ_nm = F(n-m) e^{-beta^2} beta^{n+m} / sqrt(n! m!)`,
/// with `F` the characteristic function of the noise; even `n + m`
/// entries vanish. Magnitudes are assembled in log space.
pub fn build_lambda(
    beta: f64,
    noise: &PhaseNoise,
    dim: usize,
) -> Result<FockOperator, HelstromError> {
    if beta <= 0.0 || !beta.is_finite() {
        return Err(HelstromError::BadAmplitude(beta));
    }
    if dim < 1 {
        return Err(HelstromError::BadDimension(dim));
    }

    let log_beta = beta.ln();
    let nbar = beta * beta;
    let mut entries = DMatrix::<f64>::zeros(dim, dim);
    for n in 0..dim {
        for m in (n + 1)..dim {
            if (n + m) % 2 == 0 {
                continue;
            }
            let log_mag = -nbar + (n + m) as f64 * log_beta
                - 0.5 * (log_factorial(n as u64) + log_factorial(m as u64));
            let value = noise.characteristic((n as i64) - (m as i64)) * log_mag.exp();
            entries[(n, m)] = value;
            entries[(m, n)] = value;
        }
    }
    Ok(FockOperator { entries })
}

/// Helstrom bound `P_e = (1 - Σ_i |λ_i|) / 2` from the eigenvalues of the
/// difference operator, clamped to `[0, 1/2]`.
///
/// Eigenvalues below 1e-14 in magnitude are treated as numerical noise
/// around the checkerboard kernel and dropped.
pub fn helstrom_bound(op: &FockOperator) -> Result<f64, HelstromError> {
    let eigen = op
        .entries
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(HelstromError::EigenFailed)?;
    let trace_norm: f64 = eigen
        .eigenvalues
        .iter()
        .map(|&l| l.abs())
        .filter(|&a| a >= 1e-14)
        .sum();
    Ok((0.5 * (1.0 - trace_norm)).clamp(0.0, 0.5))
}

/// Convenience wrapper: bound at the default truncation for `beta`.
pub fn helstrom_error(beta: f64, noise: &PhaseNoise) -> Result<f64, HelstromError> {
    helstrom_bound(&build_lambda(beta, noise, default_dim(beta))?)
}

/// Noise-free Helstrom bound for pure `|±beta⟩`, used as the closed-form
/// reference: `(1 - sqrt(1 - e^{-4 beta^2})) / 2`.
pub fn pure_state_bound(beta: f64) -> f64 {
    0.5 * (1.0 - (1.0 - (-4.0 * beta * beta).exp()).sqrt())
}
