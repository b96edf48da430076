//! TOML run configuration: the means source, noise grid and evaluation
//! knobs, with command-line overrides applied on top.

use crate::CliError;
use discrim::noise::DEFAULT_QUAD_ORDER;
use discrim::skellam::DiscriminationProblem;
use discrim::sweep::{McSettings, SweepConfig, SweepNoise};
use discrim::{DetectorCalibration, MeansSource, PhaseNoise};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub problem: Option<ProblemSection>,
    pub calibration: Option<CalibrationSection>,
    pub noise: Option<NoiseSection>,
    pub quadrature: Option<QuadratureSection>,
    pub helstrom: Option<HelstromSection>,
    pub mc: Option<McSection>,
    pub scan: Option<ScanSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub beta: f64,
    pub alpha: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default = "default_prior")]
    pub eta1: f64,
}

fn default_tau() -> f64 {
    0.5
}

fn default_prior() -> f64 {
    0.5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    /// Either the four amplitudes inline ...
    pub a_c: Option<f64>,
    pub a_d: Option<f64>,
    pub b_c: Option<f64>,
    pub b_d: Option<f64>,
    /// ... or a calibration report to load them from.
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub phi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// `uniform`, `gaussian` or `matched` (paired uniform/gaussian sweep).
    pub kind: String,
    /// Sweep grid bounds (inclusive) and point count.
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    /// Single noise value for the distribution command.
    pub param: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub order: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelstromSection {
    pub dim: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub shots: Option<usize>,
    pub reps: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub positions: usize,
    pub shots_per_position: usize,
}

/// Which noise family a sweep runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseSelection {
    Uniform,
    Gaussian,
    /// Uniform grid paired with the variance-matched gaussian.
    Matched,
}

/// Fully validated run settings.
pub struct RunConfig {
    pub source: MeansSource,
    pub noise_kind: NoiseSelection,
    pub grid: Vec<f64>,
    /// Single-point noise for the distribution command.
    pub single_noise: PhaseNoise,
    pub quad_order: usize,
    pub helstrom_dim: Option<usize>,
    pub mc_shots: usize,
    pub mc_reps: usize,
    pub scan_positions: usize,
    pub scan_shots: usize,
}

impl RunConfig {
    pub fn sweep_config(&self, mc: Option<McSettings>) -> SweepConfig {
        SweepConfig {
            noise: match self.noise_kind {
                NoiseSelection::Gaussian => SweepNoise::Gaussian,
                _ => SweepNoise::Uniform,
            },
            helstrom_dim: self.helstrom_dim,
            quad_order: self.quad_order,
            mc,
        }
    }
}

pub fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
}

fn build_source(cfg: &FileConfig) -> Result<MeansSource, CliError> {
    match (&cfg.problem, &cfg.calibration) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "config must contain exactly one of [problem] and [calibration], not both".into(),
        )),
        (None, None) => Err(CliError::Config(
            "config must contain a [problem] or [calibration] section".into(),
        )),
        (Some(p), None) => {
            let problem = DiscriminationProblem::with_prior(p.beta, p.alpha, p.tau, p.phi, p.eta1)
                .map_err(|e| CliError::Config(format!("invalid [problem]: {e}")))?;
            Ok(MeansSource::Ideal(problem))
        }
        (None, Some(c)) => {
            let cal = match (&c.file, c.a_c, c.a_d, c.b_c, c.b_d) {
                (Some(path), None, None, None, None) => crate::output::read_report(path)?,
                (None, Some(a_c), Some(a_d), Some(b_c), Some(b_d)) => {
                    DetectorCalibration::new(a_c, a_d, b_c, b_d)
                        .map_err(|e| CliError::Config(format!("invalid [calibration]: {e}")))?
                }
                _ => {
                    return Err(CliError::Config(
                        "[calibration] needs either all of a_c, a_d, b_c, b_d or a `file` entry"
                            .into(),
                    ))
                }
            };
            Ok(MeansSource::Calibrated { cal, phi: c.phi })
        }
    }
}

fn build_grid(noise: &NoiseSection) -> Result<Vec<f64>, CliError> {
    let (start, stop, points) = match (noise.start, noise.stop, noise.points) {
        (Some(a), Some(b), Some(n)) => (a, b, n),
        _ => {
            return Err(CliError::Config(
                "[noise] needs start, stop and points for a sweep".into(),
            ))
        }
    };
    if points == 0 {
        return Err(CliError::Config("[noise] points must be at least 1".into()));
    }
    if !start.is_finite() || !stop.is_finite() || start < 0.0 || start > stop {
        return Err(CliError::Config(format!(
            "invalid noise grid [{start}, {stop}]: bounds must satisfy 0 <= start <= stop"
        )));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    if start == stop {
        return Err(CliError::Config(
            "a multi-point grid needs start < stop".into(),
        ));
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points).map(|i| start + step * i as f64).collect())
}

/// Validates the file config and applies the flag overrides.
pub fn resolve(
    cfg: FileConfig,
    shots_override: Option<usize>,
    reps_override: Option<usize>,
) -> Result<RunConfig, CliError> {
    let source = build_source(&cfg)?;
    let quad_order = cfg.quadrature.as_ref().map_or(DEFAULT_QUAD_ORDER, |q| q.order);
    if quad_order == 0 {
        return Err(CliError::Config("[quadrature] order must be >= 1".into()));
    }
    let helstrom_dim = match cfg.helstrom.as_ref().map(|h| h.dim) {
        None | Some(0) => None,
        Some(d) => Some(d),
    };

    let (noise_kind, grid, single_noise) = match &cfg.noise {
        None => (NoiseSelection::Uniform, Vec::new(), PhaseNoise::none()),
        Some(section) => {
            let kind = match section.kind.as_str() {
                "uniform" => NoiseSelection::Uniform,
                "gaussian" => NoiseSelection::Gaussian,
                "matched" => NoiseSelection::Matched,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown noise kind `{other}` (expected uniform, gaussian or matched)"
                    )))
                }
            };
            let grid = if section.start.is_some() {
                build_grid(section)?
            } else {
                Vec::new()
            };
            let single = match section.param {
                None => PhaseNoise::none(),
                Some(p) => {
                    let built = match kind {
                        NoiseSelection::Uniform => PhaseNoise::uniform(p),
                        NoiseSelection::Gaussian => PhaseNoise::gaussian(p),
                        NoiseSelection::Matched => {
                            return Err(CliError::Config(
                                "noise param with kind = \"matched\" is ambiguous; use uniform or gaussian".into(),
                            ))
                        }
                    };
                    built.map_err(|e| CliError::Config(format!("invalid noise param: {e}")))?
                }
            };
            (kind, grid, single.with_quad_order(quad_order))
        }
    };

    let mc_shots = shots_override
        .or(cfg.mc.as_ref().and_then(|m| m.shots))
        .unwrap_or(1000);
    let mc_reps = reps_override
        .or(cfg.mc.as_ref().and_then(|m| m.reps))
        .unwrap_or(100);
    if mc_shots == 0 || mc_reps == 0 {
        return Err(CliError::Config("mc shots and reps must be >= 1".into()));
    }

    let (scan_positions, scan_shots) = match &cfg.scan {
        None => (60, 50_000),
        Some(s) => {
            if s.positions < 2 {
                return Err(CliError::Config("[scan] positions must be >= 2".into()));
            }
            if s.shots_per_position == 0 {
                return Err(CliError::Config(
                    "[scan] shots_per_position must be >= 1".into(),
                ));
            }
            (s.positions, s.shots_per_position)
        }
    };

    Ok(RunConfig {
        source,
        noise_kind,
        grid,
        single_noise,
        quad_order,
        helstrom_dim,
        mc_shots,
        mc_reps,
        scan_positions,
        scan_shots,
    })
}
