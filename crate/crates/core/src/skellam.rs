//! Photon-number-resolving receiver with a low-intensity local oscillator.
//!
//! Both beam-splitter outputs are measured by PNR detectors; the count
//! difference follows a Skellam law whose Poisson means carry the BPSK
//! interference term. Discrimination by sign of the difference, with a
//! fair coin on ties, gives the analytic error probabilities here.

use crate::calibration::DetectorCalibration;
use crate::noise::PhaseNoise;
use crate::numerics::{bessel_i_scaled_upto, log_factorial};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SkellamError {
    #[error("signal amplitude must be > 0, got {0}")]
    BadSignal(f64),
    #[error("LO amplitude must be >= 0, got {0}")]
    BadLo(f64),
    #[error("transmissivity must lie strictly inside (0, 1), got {0}")]
    BadTransmissivity(f64),
    #[error("prior must lie in [0, 1], got {0}")]
    BadPrior(f64),
}

/// Transmitted bit of the BPSK alphabet: `One` encodes `|+beta⟩`,
/// `Zero` encodes `|-beta⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    /// Interference sign: +1 for `|+beta⟩`, -1 for `|-beta⟩`.
    pub fn sign(self) -> f64 {
        match self {
            Bit::One => 1.0,
            Bit::Zero => -1.0,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Bit::Zero),
            1 => Some(Bit::One),
            _ => None,
        }
    }
}

/// Ideal interferometric discrimination setup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscriminationProblem {
    beta: f64,
    alpha: f64,
    tau: f64,
    phi: f64,
    eta1: f64,
}

impl DiscriminationProblem {
    /// Signal amplitude `beta`, LO amplitude `alpha`, beam-splitter
    /// transmissivity `tau`, LO phase `phi`, equal priors.
    pub fn new(beta: f64, alpha: f64, tau: f64, phi: f64) -> Result<Self, SkellamError> {
        Self::with_prior(beta, alpha, tau, phi, 0.5)
    }

    /// Same with an explicit prior `eta1` for the `|+beta⟩` hypothesis.
    pub fn with_prior(
        beta: f64,
        alpha: f64,
        tau: f64,
        phi: f64,
        eta1: f64,
    ) -> Result<Self, SkellamError> {
        if beta <= 0.0 || !beta.is_finite() {
            return Err(SkellamError::BadSignal(beta));
        }
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(SkellamError::BadLo(alpha));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(SkellamError::BadTransmissivity(tau));
        }
        if !(0.0..=1.0).contains(&eta1) {
            return Err(SkellamError::BadPrior(eta1));
        }
        Ok(Self {
            beta,
            alpha,
            tau,
            phi,
            eta1,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }
}

/// Mean photon numbers at the two beam-splitter outputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputMeans {
    pub mu_c: f64,
    pub mu_d: f64,
}

/// Where the Poisson means come from: the ideal beam-splitter model or the
/// fringe amplitudes fitted from a calibration run.
#[derive(Clone, Debug)]
pub enum MeansSource {
    Ideal(DiscriminationProblem),
    Calibrated {
        cal: DetectorCalibration,
        /// Measurement phase of the error-probability evaluation.
        phi: f64,
    },
}

impl MeansSource {
    /// Output means when the cosine of the interference term is evaluated
    /// at `effective_phase` (already containing any noise shift).
    pub fn means_at_phase(&self, bit: Bit, effective_phase: f64) -> OutputMeans {
        match self {
            MeansSource::Ideal(p) => {
                let cross =
                    2.0 * (p.tau * (1.0 - p.tau)).sqrt() * p.alpha * p.beta * effective_phase.cos();
                let s = bit.sign();
                let mu_c = p.alpha * p.alpha * (1.0 - p.tau) + p.beta * p.beta * p.tau + s * cross;
                let mu_d = p.alpha * p.alpha * p.tau + p.beta * p.beta * (1.0 - p.tau) - s * cross;
                OutputMeans {
                    mu_c: mu_c.max(0.0),
                    mu_d: mu_d.max(0.0),
                }
            }
            MeansSource::Calibrated { cal, .. } => {
                // bit 0 is realized by shifting the LO phase by pi; port d
                // is anti-phased with port c.
                let theta = match bit {
                    Bit::One => effective_phase,
                    Bit::Zero => effective_phase + std::f64::consts::PI,
                };
                let c = theta.cos();
                let mu_c = cal.a_c * cal.a_c + cal.b_c * cal.b_c + 2.0 * cal.a_c * cal.b_c * c;
                let mu_d = cal.a_d * cal.a_d + cal.b_d * cal.b_d - 2.0 * cal.a_d * cal.b_d * c;
                OutputMeans {
                    mu_c: mu_c.max(0.0),
                    mu_d: mu_d.max(0.0),
                }
            }
        }
    }

    /// Measurement phase at which error probabilities are evaluated.
    pub fn measurement_phase(&self) -> f64 {
        match self {
            MeansSource::Ideal(p) => p.phi,
            MeansSource::Calibrated { phi, .. } => *phi,
        }
    }

    /// Prior of the `|+beta⟩` hypothesis.
    pub fn eta1(&self) -> f64 {
        match self {
            MeansSource::Ideal(p) => p.eta1,
            MeansSource::Calibrated { .. } => 0.5,
        }
    }

    /// Signal amplitude entering the Helstrom and homodyne references.
    ///
    /// For a calibrated source this is the total signal energy seen at the
    /// splitter, `sqrt(b_c^2 + b_d^2)`: referencing a single port's portion
    /// would place the quantum bound above the receiver curves.
    pub fn signal_amplitude(&self) -> f64 {
        match self {
            MeansSource::Ideal(p) => p.beta,
            MeansSource::Calibrated { cal, .. } => {
                (cal.b_c * cal.b_c + cal.b_d * cal.b_d).sqrt()
            }
        }
    }
}

/// Poisson means of the ideal model for the given bit, with the LO phase
/// shifted by `phase_shift` (the noise substitution `phi -> phi - shift`).
pub fn poisson_means(p: &DiscriminationProblem, bit: Bit, phase_shift: f64) -> OutputMeans {
    MeansSource::Ideal(*p).means_at_phase(bit, p.phi - phase_shift)
}

/// Poisson means from fitted fringe amplitudes at LO phase `phi`, shifted
/// by `phase_shift`.
pub fn calibrated_means(
    cal: &DetectorCalibration,
    bit: Bit,
    phi: f64,
    phase_shift: f64,
) -> OutputMeans {
    MeansSource::Calibrated {
        cal: cal.clone(),
        phi,
    }
    .means_at_phase(bit, phi - phase_shift)
}

/// Skellam probability `P(n_c - n_d = y)` for independent Poisson counts
/// with the given means.
///
/// Evaluated in log space with the scaled Bessel function; a dark port
/// degenerates to a plain Poisson law.
pub fn skellam_pmf(means: &OutputMeans, y: i64) -> f64 {
    let (mu_c, mu_d) = (means.mu_c, means.mu_d);
    debug_assert!(mu_c >= 0.0 && mu_d >= 0.0);
    if mu_d == 0.0 {
        return poisson_pmf(mu_c, y);
    }
    if mu_c == 0.0 {
        return poisson_pmf(mu_d, -y);
    }
    // -(mu_c + mu_d) + 2 sqrt(mu_c mu_d) = -(sqrt(mu_c) - sqrt(mu_d))^2
    let root = mu_c.sqrt() - mu_d.sqrt();
    let arg = 2.0 * (mu_c * mu_d).sqrt();
    let scaled = crate::numerics::bessel_i_scaled(y, arg);
    if scaled == 0.0 {
        return 0.0;
    }
    let log_p = -root * root + 0.5 * y as f64 * (mu_c.ln() - mu_d.ln()) + scaled.ln();
    log_p.exp()
}

fn poisson_pmf(mu: f64, y: i64) -> f64 {
    if mu == 0.0 {
        return if y == 0 { 1.0 } else { 0.0 };
    }
    if y < 0 {
        return 0.0;
    }
    (-mu + y as f64 * mu.ln() - log_factorial(y as u64)).exp()
}

/// Error probability of the sign decision when the sent hypothesis makes
/// port c the bright one: `Σ_{y<=-1} S_y + S_0 / 2`.
///
/// The summed side is always the light tail (the heavy side is obtained
/// from normalization), truncated where a Chernoff bound on the residual
/// mass drops below 1e-13.
pub fn error_given_means(means: &OutputMeans) -> f64 {
    let (mu_c, mu_d) = (means.mu_c, means.mu_d);
    if mu_d == 0.0 {
        // the difference is never negative; only the y = 0 tie can err
        return 0.5 * (-mu_c).exp();
    }
    if mu_c == 0.0 {
        return 1.0 - 0.5 * (-mu_d).exp();
    }
    if mu_c >= mu_d {
        negative_tail(mu_c, mu_d) + 0.5 * skellam_pmf(means, 0)
    } else {
        // negative side is the bulk: take it from normalization
        1.0 - negative_tail(mu_d, mu_c) - 0.5 * skellam_pmf(means, 0)
    }
}

/// Mirror decision error: probability of `Δ >= 1` plus half the tie, the
/// error event when the sent hypothesis makes port d the bright one.
pub fn error_given_means_mirror(means: &OutputMeans) -> f64 {
    error_given_means(&OutputMeans {
        mu_c: means.mu_d,
        mu_d: means.mu_c,
    })
}

/// `P(Y <= -1)` for a Skellam with `mu_c >= mu_d > 0`.
fn negative_tail(mu_c: f64, mu_d: f64) -> f64 {
    let cutoff = tail_cutoff(mu_c, mu_d);
    let arg = 2.0 * (mu_c * mu_d).sqrt();
    let scaled = bessel_i_scaled_upto(cutoff as usize, arg);
    let root = mu_c.sqrt() - mu_d.sqrt();
    let base = -root * root;
    let half_log_ratio = 0.5 * (mu_c.ln() - mu_d.ln());
    // ascending magnitudes: from the far tail toward y = -1
    let mut acc = 0.0;
    for k in (1..=cutoff).rev() {
        let s = scaled[k as usize];
        if s > 0.0 {
            acc += (base - k as f64 * half_log_ratio + s.ln()).exp();
        }
    }
    acc
}

/// Smallest `k` whose Chernoff bound on `P(Y <= -k)` is below 1e-13.
fn tail_cutoff(mu_c: f64, mu_d: f64) -> i64 {
    let mut k = (4.0 * (mu_c + mu_d).sqrt()).ceil() as i64 + 8;
    while chernoff_neg_tail(mu_c, mu_d, k) > 1e-13 {
        k *= 2;
        if k > 1 << 24 {
            break;
        }
    }
    k
}

/// Chernoff bound `P(Y <= -k) <= exp(mu_c (1/u - 1) + mu_d (u - 1) - k ln u)`
/// with the optimal tilt `u = (k + sqrt(k^2 + 4 mu_c mu_d)) / (2 mu_d)`.
fn chernoff_neg_tail(mu_c: f64, mu_d: f64, k: i64) -> f64 {
    let kf = k as f64;
    let u = (kf + (kf * kf + 4.0 * mu_c * mu_d).sqrt()) / (2.0 * mu_d);
    (mu_c * (1.0 / u - 1.0) + mu_d * (u - 1.0) - kf * u.ln()).exp()
}

/// Error probability at a fixed effective phase, averaged over the two
/// hypotheses with their priors.
///
/// For the ideal balanced splitter the two conditional errors coincide and
/// this reduces to the bright-port tail sum alone.
pub fn skellam_error_at_phase(src: &MeansSource, effective_phase: f64) -> f64 {
    let eta1 = src.eta1();
    let m1 = src.means_at_phase(Bit::One, effective_phase);
    let m0 = src.means_at_phase(Bit::Zero, effective_phase);
    eta1 * error_given_means(&m1) + (1.0 - eta1) * error_given_means_mirror(&m0)
}

/// Noise-averaged error probability of the PNR receiver: the fixed-phase
/// error integrated against the noise density, with the measurement phase
/// taken from the source.
pub fn skellam_error(src: &MeansSource, noise: &PhaseNoise) -> f64 {
    let phi = src.measurement_phase();
    noise.integrate(|phase_shift| skellam_error_at_phase(src, phi - phase_shift))
}
