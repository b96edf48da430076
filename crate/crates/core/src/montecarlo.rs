//! Shot-by-shot stochastic reproduction of the experiment.
//!
//! Counts are independent Poisson draws at the model means, the decision is
//! the sign of the count difference with a fair coin on ties, and the
//! bootstrap repeats the error estimate over fresh resamples. A single
//! 64-bit seed fans out into one counter-indexed stream per repetition (or
//! per scan position), so results are bit-stable for any worker count.

use crate::exec;
use crate::noise::PhaseNoise;
use crate::skellam::{Bit, MeansSource, OutputMeans};
use crate::DetectorCalibration;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// One laser shot: the photocount pair, the sent bit when known, and the
/// LO/piezo phase the shot was taken at.
#[derive(Clone, Debug, PartialEq)]
pub struct ShotRecord {
    pub n_c: u32,
    pub n_d: u32,
    pub true_bit: Option<Bit>,
    pub phase_tag: f64,
}

/// Bootstrap summary of a simulated experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapResult {
    /// Mean error fraction over the repetitions.
    pub mean_error: f64,
    /// Sample standard deviation of the per-repetition error fractions,
    /// i.e. the bootstrap error bar of a single N_s-shot estimate.
    pub stderr: f64,
    pub n_shots_per_rep: usize,
    pub n_reps: usize,
}

/// Deterministic per-unit stream for a given master seed.
fn stream_rng(seed: u64, unit: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(unit);
    rng
}

fn poisson_draw<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> u32 {
    if mu <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mu).expect("finite positive mean");
    let draw: f64 = dist.sample(rng);
    draw as u32
}

/// Samples one photocount pair from independent Poisson laws at the given
/// means. Bit and phase context is left for the caller to fill in.
pub fn simulate_shot<R: Rng + ?Sized>(means: &OutputMeans, rng: &mut R) -> ShotRecord {
    ShotRecord {
        n_c: poisson_draw(means.mu_c, rng),
        n_d: poisson_draw(means.mu_d, rng),
        true_bit: None,
        phase_tag: 0.0,
    }
}

/// Sign-of-difference decision: bit 1 when port c wins, bit 0 when port d
/// wins, and a fair coin on the inconclusive tie.
pub fn decide<R: Rng + ?Sized>(shot: &ShotRecord, rng: &mut R) -> Bit {
    match shot.n_c.cmp(&shot.n_d) {
        std::cmp::Ordering::Greater => Bit::One,
        std::cmp::Ordering::Less => Bit::Zero,
        std::cmp::Ordering::Equal => {
            if rng.random::<bool>() {
                Bit::One
            } else {
                Bit::Zero
            }
        }
    }
}

fn rep_error_fraction(
    src: &MeansSource,
    noise: &PhaseNoise,
    n_shots: usize,
    seed: u64,
    rep: usize,
) -> f64 {
    let mut rng = stream_rng(seed, rep as u64 + 1);
    let phi = src.measurement_phase();
    let eta1 = src.eta1();
    let mut wrong = 0usize;
    for _ in 0..n_shots {
        let bit = if rng.random::<f64>() < eta1 {
            Bit::One
        } else {
            Bit::Zero
        };
        let shift = noise.sample(&mut rng);
        let means = src.means_at_phase(bit, phi - shift);
        let shot = simulate_shot(&means, &mut rng);
        if decide(&shot, &mut rng) != bit {
            wrong += 1;
        }
    }
    wrong as f64 / n_shots as f64
}

fn bootstrap_from_fractions(fractions: Vec<f64>, n_shots: usize) -> BootstrapResult {
    let n_reps = fractions.len();
    let mean = fractions.iter().sum::<f64>() / n_reps as f64;
    let stderr = if n_reps > 1 {
        let ss: f64 = fractions.iter().map(|e| (e - mean) * (e - mean)).sum();
        (ss / (n_reps - 1) as f64).sqrt()
    } else {
        0.0
    };
    BootstrapResult {
        mean_error: mean,
        stderr,
        n_shots_per_rep: n_shots,
        n_reps,
    }
}

/// Runs `n_reps` independent repetitions of `n_shots` shots each: random
/// bits at the source priors, per-shot noise phases, Poisson counts and
/// sign decisions. Deterministic for a fixed seed.
pub fn run_experiment(
    src: &MeansSource,
    noise: &PhaseNoise,
    n_shots: usize,
    n_reps: usize,
    seed: u64,
) -> BootstrapResult {
    assert!(n_shots >= 1 && n_reps >= 1, "need at least one shot and rep");
    let fractions = exec::map_indexed(n_reps, |rep| {
        rep_error_fraction(src, noise, n_shots, seed, rep)
    });
    bootstrap_from_fractions(fractions, n_shots)
}

/// Sequential twin of [`run_experiment`], bit-identical to it; kept as the
/// baseline for the benchmark suite and determinism checks.
pub fn run_experiment_seq(
    src: &MeansSource,
    noise: &PhaseNoise,
    n_shots: usize,
    n_reps: usize,
    seed: u64,
) -> BootstrapResult {
    assert!(n_shots >= 1 && n_reps >= 1, "need at least one shot and rep");
    let fractions = (0..n_reps)
        .map(|rep| rep_error_fraction(src, noise, n_shots, seed, rep))
        .collect();
    bootstrap_from_fractions(fractions, n_shots)
}

/// Derives an independent sub-seed for an indexed work unit (grid point,
/// file, ...) from a master seed; splitmix64 finalizer.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates a raw piezo scan: `n_positions` phases spanning `[0, 2pi)`,
/// each sampled `shots_per_position` times from the calibrated fringe.
/// Records carry no bit tag (the scan is the bit-1 fringe; bit 0 is the
/// phase-shifted view of the same data).
pub fn synthesize_piezo_scan(
    cal: &DetectorCalibration,
    n_positions: usize,
    shots_per_position: usize,
    seed: u64,
) -> Vec<ShotRecord> {
    assert!(n_positions >= 2, "a scan needs at least two positions");
    let src = MeansSource::Calibrated {
        cal: cal.clone(),
        phi: 0.0,
    };
    let per_position = exec::map_indexed(n_positions, |i| {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / n_positions as f64;
        let means = src.means_at_phase(Bit::One, phi);
        let mut rng = stream_rng(seed, i as u64 + 1);
        (0..shots_per_position)
            .map(|_| ShotRecord {
                phase_tag: phi,
                ..simulate_shot(&means, &mut rng)
            })
            .collect::<Vec<_>>()
    });
    per_position.into_iter().flatten().collect()
}
