//! Special functions and quadrature primitives shared by all receivers.

mod bessel;
mod quadrature;

pub use bessel::{bessel_i_scaled, bessel_i_scaled_upto};
pub use quadrature::{gauss_hermite, gauss_legendre, QuadratureRule, RuleKind};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError {
    #[error("quadrature order must be at least 1")]
    ZeroOrder,
    #[error("invalid integration interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
}

/// `ln(n!)`.
///
/// Exact factorials for `n <= 20`, `lgamma(n + 1)` beyond.
pub fn log_factorial(n: u64) -> f64 {
    const EXACT: [u64; 21] = [
        1,
        1,
        2,
        6,
        24,
        120,
        720,
        5040,
        40320,
        362880,
        3628800,
        39916800,
        479001600,
        6227020800,
        87178291200,
        1307674368000,
        20922789888000,
        355687428096000,
        6402373705728000,
        121645100408832000,
        2432902008176640000,
    ];
    if n <= 20 {
        (EXACT[n as usize] as f64).ln()
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
