//! Error-probability curves over noise-parameter grids, and the photocount
//! difference distribution with its homodyne overlay.
//!
//! Grid points are independent, so the sweep dispatches them to the worker
//! pool and reassembles results in grid order.

use crate::exec;
use crate::helstrom::{self, HelstromError};
use crate::homodyne::{self, QuadratureDensity, Sign};
use crate::montecarlo::{self, derive_seed};
use crate::noise::{matched_sigma, PhaseNoise};
use crate::skellam::{self, Bit, MeansSource};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("noise grid must be strictly increasing")]
    BadGrid,
    #[error(transparent)]
    Helstrom(#[from] HelstromError),
}

/// Which noise family the grid parameter refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepNoise {
    /// Grid values are uniform widths `gamma`.
    Uniform,
    /// Grid values are gaussian standard deviations `sigma`.
    Gaussian,
}

impl SweepNoise {
    fn build(self, param: f64, quad_order: usize) -> PhaseNoise {
        let noise = match self {
            SweepNoise::Uniform => PhaseNoise::uniform(param),
            SweepNoise::Gaussian => PhaseNoise::gaussian(param),
        };
        noise.expect("grid validated nonnegative").with_quad_order(quad_order)
    }
}

/// Monte Carlo settings of a sweep.
#[derive(Clone, Copy, Debug)]
pub struct McSettings {
    pub shots: usize,
    pub reps: usize,
    pub seed: u64,
}

/// Evaluation knobs shared by every grid point.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub noise: SweepNoise,
    /// Fock truncation override for the Helstrom column; `None` picks the
    /// amplitude-dependent default.
    pub helstrom_dim: Option<usize>,
    pub quad_order: usize,
    pub mc: Option<McSettings>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            noise: SweepNoise::Uniform,
            helstrom_dim: None,
            quad_order: crate::noise::DEFAULT_QUAD_ORDER,
            mc: None,
        }
    }
}

/// One row of an error curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub noise_param: f64,
    pub p_helstrom: f64,
    pub p_homodyne: f64,
    pub p_skellam: f64,
    /// `(mean, stderr)` of the Monte Carlo estimate when requested.
    pub mc: Option<(f64, f64)>,
}

/// The three analytic error probabilities at one noise setting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryTriple {
    pub p_helstrom: f64,
    pub p_homodyne: f64,
    pub p_skellam: f64,
}

/// Paired uniform/gaussian curves at matched variance.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchedPoint {
    pub gamma: f64,
    pub uniform: TheoryTriple,
    pub gaussian: TheoryTriple,
}

fn theory_at(
    src: &MeansSource,
    noise: &PhaseNoise,
    helstrom_dim: Option<usize>,
) -> Result<TheoryTriple, HelstromError> {
    let beta = src.signal_amplitude();
    let dim = helstrom_dim.unwrap_or_else(|| helstrom::default_dim(beta));
    let p_helstrom = helstrom::helstrom_bound(&helstrom::build_lambda(beta, noise, dim)?)?;
    let p_homodyne = homodyne::homodyne_error(beta, noise);
    let p_skellam = skellam::skellam_error(src, noise);
    Ok(TheoryTriple {
        p_helstrom,
        p_homodyne,
        p_skellam,
    })
}

fn check_grid(grid: &[f64]) -> Result<(), SweepError> {
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    let nonnegative = grid.first().is_none_or(|&g| g >= 0.0);
    if grid.is_empty() || !increasing || !nonnegative {
        return Err(SweepError::BadGrid);
    }
    Ok(())
}

fn curve_point(
    src: &MeansSource,
    cfg: &SweepConfig,
    grid_index: usize,
    param: f64,
) -> Result<CurvePoint, SweepError> {
    let noise = cfg.noise.build(param, cfg.quad_order);
    let theory = theory_at(src, &noise, cfg.helstrom_dim)?;
    let mc = cfg.mc.map(|mc| {
        let res = montecarlo::run_experiment(
            src,
            &noise,
            mc.shots,
            mc.reps,
            derive_seed(mc.seed, grid_index as u64),
        );
        (res.mean_error, res.stderr)
    });
    Ok(CurvePoint {
        noise_param: param,
        p_helstrom: theory.p_helstrom,
        p_homodyne: theory.p_homodyne,
        p_skellam: theory.p_skellam,
        mc,
    })
}

/// Computes the error curve over a strictly increasing grid of noise
/// parameters; grid points run on the worker pool.
pub fn error_curve(
    src: &MeansSource,
    cfg: &SweepConfig,
    grid: &[f64],
) -> Result<Vec<CurvePoint>, SweepError> {
    check_grid(grid)?;
    exec::map_indexed(grid.len(), |i| curve_point(src, cfg, i, grid[i]))
        .into_iter()
        .collect()
}

/// Sequential twin of [`error_curve`], bit-identical to it.
pub fn error_curve_seq(
    src: &MeansSource,
    cfg: &SweepConfig,
    grid: &[f64],
) -> Result<Vec<CurvePoint>, SweepError> {
    check_grid(grid)?;
    grid.iter()
        .enumerate()
        .map(|(i, &g)| curve_point(src, cfg, i, g))
        .collect()
}

/// Uniform-vs-gaussian comparison: for every grid `gamma`, the gaussian
/// column is evaluated at the variance-matched `sigma = gamma / (2 sqrt 3)`.
pub fn matched_curves(
    src: &MeansSource,
    cfg: &SweepConfig,
    grid: &[f64],
) -> Result<Vec<MatchedPoint>, SweepError> {
    check_grid(grid)?;
    exec::map_indexed(grid.len(), |i| {
        let gamma = grid[i];
        let uniform = SweepNoise::Uniform.build(gamma, cfg.quad_order);
        let gaussian = SweepNoise::Gaussian.build(matched_sigma(gamma), cfg.quad_order);
        Ok(MatchedPoint {
            gamma,
            uniform: theory_at(src, &uniform, cfg.helstrom_dim)?,
            gaussian: theory_at(src, &gaussian, cfg.helstrom_dim)?,
        })
    })
    .into_iter()
    .collect()
}

/// One row of the photocount-difference distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionRow {
    pub y: i64,
    pub pmf: f64,
    pub mc_frequency: Option<f64>,
    pub homodyne_overlay: f64,
}

/// Distribution of the count difference under the bit-1 hypothesis at the
/// source's measurement phase, optionally smeared by noise, with Monte
/// Carlo frequencies and the rescaled homodyne density.
///
/// The overlay convention: the continuous quadrature density is mapped to
/// count-difference units by the affine transform matching the mean and
/// variance of the discrete distribution.
pub fn distribution(
    src: &MeansSource,
    noise: &PhaseNoise,
    mc: Option<McSettings>,
) -> Vec<DistributionRow> {
    let phi = src.measurement_phase();
    let pmf_at = |y: i64| noise.integrate(|shift| {
        skellam::skellam_pmf(&src.means_at_phase(Bit::One, phi - shift), y)
    });

    // seed range from the noise-free means, then extend until both flanks
    // are below threshold
    let central = src.means_at_phase(Bit::One, phi);
    let spread = 8.0 * (central.mu_c + central.mu_d).sqrt() + 6.0;
    let mut lo = ((central.mu_c - central.mu_d) - spread).floor() as i64;
    let mut hi = ((central.mu_c - central.mu_d) + spread).ceil() as i64;
    const FLOOR: f64 = 1e-12;
    while pmf_at(lo) > FLOOR && lo > -100_000 {
        lo -= 8;
    }
    while pmf_at(hi) > FLOOR && hi < 100_000 {
        hi += 8;
    }

    let ys: Vec<i64> = (lo..=hi).collect();
    let pmf: Vec<f64> = exec::map_indexed(ys.len(), |i| pmf_at(ys[i]));

    // discrete moments for the overlay transform
    let total: f64 = pmf.iter().sum();
    let mean: f64 = ys.iter().zip(&pmf).map(|(&y, &p)| y as f64 * p).sum::<f64>() / total;
    let var: f64 = ys
        .iter()
        .zip(&pmf)
        .map(|(&y, &p)| (y as f64 - mean) * (y as f64 - mean) * p)
        .sum::<f64>()
        / total;
    let density = QuadratureDensity::new(src.signal_amplitude(), noise.clone(), Sign::Plus);
    let scale = (var / density.variance()).sqrt();
    let x_mean = density.mean();
    let overlay =
        |y: i64| density.pdf(x_mean + (y as f64 - mean) / scale) / scale;

    let frequencies = mc.map(|mc| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(mc.seed);
        let mut counts = vec![0u64; ys.len()];
        let n = mc.shots * mc.reps;
        for _ in 0..n {
            let shift = noise.sample(&mut rng);
            let means = src.means_at_phase(Bit::One, phi - shift);
            let shot = montecarlo::simulate_shot(&means, &mut rng);
            let delta = shot.n_c as i64 - shot.n_d as i64;
            if (lo..=hi).contains(&delta) {
                counts[(delta - lo) as usize] += 1;
            }
        }
        counts
            .into_iter()
            .map(|c| c as f64 / n as f64)
            .collect::<Vec<f64>>()
    });

    ys.iter()
        .enumerate()
        .map(|(i, &y)| DistributionRow {
            y,
            pmf: pmf[i],
            mc_frequency: frequencies.as_ref().map(|f| f[i]),
            homodyne_overlay: overlay(y),
        })
        .collect()
}
