//! Ideal strong-local-oscillator homodyne discrimination.
//!
//! Under phase noise the quadrature of `|±beta⟩` is smeared into
//! `p(x; ±beta) = (1/sqrt(pi)) ∫ dphi f(phi) exp(-(x ∓ sqrt(2) beta cos phi)^2)`
//! and the sign-threshold decision errs with probability
//! `∫ dphi f(phi) erfc(sqrt(2) beta cos phi) / 2`.

use crate::noise::PhaseNoise;
use crate::numerics::erfc;

/// Which hypothesis the density describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Noise-averaged quadrature density of one hypothesis.
#[derive(Clone, Debug)]
pub struct QuadratureDensity {
    beta: f64,
    noise: PhaseNoise,
    sign: Sign,
}

impl QuadratureDensity {
    pub fn new(beta: f64, noise: PhaseNoise, sign: Sign) -> Self {
        assert!(beta > 0.0 && beta.is_finite(), "amplitude must be > 0");
        Self { beta, noise, sign }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let s = self.sign.factor();
        let amp = std::f64::consts::SQRT_2 * self.beta;
        self.noise.integrate(|phi| {
            let d = x - s * amp * phi.cos();
            (-d * d).exp()
        }) / std::f64::consts::PI.sqrt()
    }

    /// First moment, in closed form through the characteristic function.
    pub fn mean(&self) -> f64 {
        self.sign.factor() * std::f64::consts::SQRT_2 * self.beta * self.noise.characteristic(1)
    }

    /// Variance, in closed form through the characteristic function.
    pub fn variance(&self) -> f64 {
        let b2 = self.beta * self.beta;
        let f1 = self.noise.characteristic(1);
        let f2 = self.noise.characteristic(2);
        0.5 + b2 * (1.0 + f2) - 2.0 * b2 * f1 * f1
    }
}

/// Error probability of the ideal homodyne receiver, the inner quadrature
/// integrals reduced to `erfc` before the noise average.
pub fn homodyne_error(beta: f64, noise: &PhaseNoise) -> f64 {
    assert!(beta > 0.0 && beta.is_finite(), "amplitude must be > 0");
    let amp = std::f64::consts::SQRT_2 * beta;
    noise
        .integrate(|phi| 0.5 * erfc(amp * phi.cos()))
        .clamp(0.0, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss_legendre;
    use approx::assert_abs_diff_eq;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn noise_free_density_values() {
        let beta = 1.0;
        let d = QuadratureDensity::new(beta, PhaseNoise::none(), Sign::Plus);
        let peak = std::f64::consts::SQRT_2 * beta;
        assert_abs_diff_eq!(d.pdf(peak), 1.0 / SQRT_PI, epsilon = 1e-14);
        assert_abs_diff_eq!(d.pdf(0.0), (-2.0_f64).exp() / SQRT_PI, epsilon = 1e-14);
    }

    #[test]
    fn hypothesis_parity() {
        let noise = PhaseNoise::uniform(0.8).unwrap();
        let plus = QuadratureDensity::new(1.3, noise.clone(), Sign::Plus);
        let minus = QuadratureDensity::new(1.3, noise, Sign::Minus);
        for &x in &[-2.5, -0.4, 0.0, 0.9, 3.1] {
            assert_abs_diff_eq!(plus.pdf(x), minus.pdf(-x), epsilon = 1e-14);
        }
    }

    #[test]
    fn full_dephasing_symmetrizes_the_density() {
        let noise = PhaseNoise::uniform(2.0 * std::f64::consts::PI)
            .unwrap()
            .with_quad_order(401);
        let d = QuadratureDensity::new(1.0, noise, Sign::Plus);
        for &x in &[0.3, 1.0, 2.2] {
            assert_abs_diff_eq!(d.pdf(x), d.pdf(-x), epsilon = 1e-9);
        }
    }

    #[test]
    fn density_is_normalized() {
        for noise in [
            PhaseNoise::none(),
            PhaseNoise::uniform(1.5).unwrap(),
            PhaseNoise::gaussian(0.5).unwrap(),
        ] {
            let d = QuadratureDensity::new(1.2, noise, Sign::Plus);
            let rule = gauss_legendre(400, -14.0, 14.0).unwrap();
            let total = rule.integrate(|x| d.pdf(x));
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn density_moments_match_closed_forms() {
        for noise in [
            PhaseNoise::none(),
            PhaseNoise::uniform(1.1).unwrap(),
            PhaseNoise::gaussian(0.35).unwrap(),
        ] {
            let d = QuadratureDensity::new(0.9, noise, Sign::Plus);
            let rule = gauss_legendre(400, -12.0, 12.0).unwrap();
            let mean = rule.integrate(|x| x * d.pdf(x));
            assert_abs_diff_eq!(mean, d.mean(), epsilon = 1e-9);
            let var = rule.integrate(|x| (x - mean) * (x - mean) * d.pdf(x));
            assert_abs_diff_eq!(var, d.variance(), epsilon = 1e-9);
        }
    }

    #[test]
    fn noise_free_error_value() {
        let got = homodyne_error(1.0, &PhaseNoise::none());
        assert_abs_diff_eq!(got, 0.022_750_131_948_179_2, epsilon = 1e-12);
    }

    #[test]
    fn limits() {
        assert_abs_diff_eq!(
            homodyne_error(1e-9, &PhaseNoise::none()),
            0.5,
            epsilon = 1e-8
        );
        let full = PhaseNoise::uniform(2.0 * std::f64::consts::PI).unwrap();
        for beta in [0.5, 1.0, 2.0] {
            assert_abs_diff_eq!(homodyne_error(beta, &full), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_two_dimensional_quadrature() {
        // The direct route: integrate the smeared densities over the two
        // error half-lines, with no erfc shortcut.
        for &beta in &[0.5, 1.0, 2.0] {
            for &gamma in &[0.0, 0.5, 1.0, 2.0] {
                let noise = PhaseNoise::uniform(gamma).unwrap();
                let plus = QuadratureDensity::new(beta, noise.clone(), Sign::Plus);
                let minus = QuadratureDensity::new(beta, noise.clone(), Sign::Minus);
                let span = std::f64::consts::SQRT_2 * beta + 9.0;
                let neg = gauss_legendre(300, -span, 0.0).unwrap();
                let pos = gauss_legendre(300, 0.0, span).unwrap();
                let direct =
                    0.5 * (neg.integrate(|x| plus.pdf(x)) + pos.integrate(|x| minus.pdf(x)));
                let closed = homodyne_error(beta, &noise);
                assert_abs_diff_eq!(closed, direct, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn matched_models_coincide_at_zero_noise() {
        let uni = homodyne_error(1.0, &PhaseNoise::uniform(0.0).unwrap());
        let gauss = homodyne_error(1.0, &PhaseNoise::gaussian(0.0).unwrap());
        assert_abs_diff_eq!(uni, gauss, epsilon = 1e-12);
    }

    #[test]
    fn monotone_in_noise_strength() {
        for beta in [0.5, 1.0, 2.0] {
            let mut prev = -1.0;
            for i in 0..=20 {
                let gamma = i as f64 * std::f64::consts::PI / 20.0;
                let pe = homodyne_error(beta, &PhaseNoise::uniform(gamma).unwrap());
                assert!(pe >= prev - 1e-12);
                prev = pe;
            }
            let mut prev = -1.0;
            for i in 0..=20 {
                let sigma = i as f64 * 0.9 / 20.0;
                let pe = homodyne_error(beta, &PhaseNoise::gaussian(sigma).unwrap());
                assert!(pe >= prev - 1e-12);
                prev = pe;
            }
        }
    }
}
