//! Exponentially scaled modified Bessel functions of the first kind.
//!
//! Everything here works with `e^{-x} I_n(x)`: the Skellam weights need
//! orders up to a few hundred at arguments up to ~10^3, where the bare
//! `I_n` overflows long before the distribution values become small.

use super::log_factorial;

/// Below this argument the power series is used directly; Miller's
/// recurrence would divide by a near-zero argument.
const SERIES_ONLY_BELOW: f64 = 1e-8;

/// Rescaling threshold for the backward recurrence.
const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_FACTOR: f64 = 1e-250;

/// `e^{-x} I_{|order|}(x)` for integer order and `x >= 0`.
///
/// Integer-order `I` is even in the order, so negative orders fold onto
/// positive ones.
pub fn bessel_i_scaled(order: i64, x: f64) -> f64 {
    assert!(x >= 0.0 && x.is_finite(), "argument must be finite and >= 0");
    let n = order.unsigned_abs() as usize;
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_ONLY_BELOW {
        return scaled_series(n, x);
    }
    scaled_all(n, x)[n]
}

/// `e^{-x} I_k(x)` for every `k` in `0..=n_max`, as a vector.
///
/// One backward-recurrence pass serves all orders, which is what the
/// Skellam tail sums want.
pub fn bessel_i_scaled_upto(n_max: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "argument must be finite and >= 0");
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    if x < SERIES_ONLY_BELOW {
        return (0..=n_max).map(|n| scaled_series(n, x)).collect();
    }
    scaled_all(n_max, x)
}

/// Miller's backward recurrence with on-the-fly rescaling, normalized by
/// the identity `e^{-x} [I_0(x) + 2 Σ_{k>=1} I_k(x)] = 1`.
fn scaled_all(n_max: usize, x: f64) -> Vec<f64> {
    let start = start_order(n_max, x);
    let mut out = vec![0.0; n_max + 1];

    let mut above = 0.0_f64; // unnormalized I_{k+1}
    let mut cur = 1e-250_f64; // unnormalized I_k, k = start
    let mut norm = 0.0_f64; // accumulates I_0 + 2 Σ_{k>=1} I_k

    for k in (1..=start).rev() {
        if k <= n_max {
            out[k] = cur;
        }
        norm += 2.0 * cur;
        let below = above + (2.0 * k as f64 / x) * cur;
        above = cur;
        cur = below;
        if cur > RESCALE_ABOVE {
            cur *= RESCALE_FACTOR;
            above *= RESCALE_FACTOR;
            norm *= RESCALE_FACTOR;
            for v in out.iter_mut() {
                *v *= RESCALE_FACTOR;
            }
        }
    }
    out[0] = cur;
    norm += cur;

    let inv = 1.0 / norm;
    for v in out.iter_mut() {
        *v *= inv;
    }
    out
}

/// Starting order for the backward recurrence, high enough that the seed
/// order carries no weight at double precision.
fn start_order(n_max: usize, x: f64) -> usize {
    let top = (n_max as f64).max(x);
    n_max.max(x.ceil() as usize) + 40 + (3.0 * top.sqrt()).ceil() as usize
}

/// Scaled power series `e^{-x} Σ_k (x/2)^{n+2k} / (k! (n+k)!)`.
///
/// All terms are positive, so there is no cancellation; used for tiny
/// arguments and as the small-x reference in tests.
pub(crate) fn scaled_series(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let h = 0.5 * x;
    let log_t0 = n as f64 * h.ln() - log_factorial(n as u64) - x;
    if log_t0 < -746.0 {
        return 0.0;
    }
    let mut term = log_t0.exp();
    let mut sum = term;
    let h2 = h * h;
    for k in 1..500 {
        term *= h2 / (k as f64 * (k + n) as f64);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}
