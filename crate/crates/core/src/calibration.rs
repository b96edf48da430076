//! Piezo-scan ingestion, fringe-parameter extraction and phase retrieval.
//!
//! A scan is a CSV of per-shot photocount pairs grouped by piezo position.
//! The per-position mean counts trace the interference fringe
//! `mu = a^2 + b^2 + 2 a b cos(phi)` from which the effective LO and signal
//! amplitudes `(a, b)` of each output port are recovered, and the relative
//! phase of every position follows from the normalized fringe via arccos.

use crate::montecarlo::ShotRecord;
use crate::noise::PhaseNoise;
use crate::skellam::Bit;
use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::Distribution;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use thiserror::Error;

/// Exact header of the shot CSV schema.
pub const SCAN_CSV_HEADER: &str = "position_index,phase_tag,n_c,n_d,true_bit";

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("cannot read scan: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema mismatch: expected header `{SCAN_CSV_HEADER}`, found `{found}`")]
    Header { found: String },
    #[error("line {line}: expected 5 comma-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: field `{field}` is not a number: `{value}`")]
    BadNumber {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: count `{field}` must be a nonnegative integer, got `{value}`")]
    BadCount {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: true_bit must be empty, 0 or 1, got `{value}`")]
    BadBit { line: usize, value: String },
    #[error("scan is empty")]
    EmptyScan,
    #[error("position {index} has no shots")]
    EmptyPosition { index: usize },
    #[error("port {port} fringe has no modulation")]
    NoModulation { port: Port },
    #[error("no scan records fall under the noise support")]
    InsufficientSupport,
}

/// Detector output port.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Port {
    C,
    D,
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::C => write!(f, "c"),
            Port::D => write!(f, "d"),
        }
    }
}

/// Effective LO (`a`) and signal (`b`) amplitudes per output port.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorCalibration {
    pub a_c: f64,
    pub a_d: f64,
    pub b_c: f64,
    pub b_d: f64,
}

impl DetectorCalibration {
    pub fn new(a_c: f64, a_d: f64, b_c: f64, b_d: f64) -> Result<Self, CalibrationError> {
        for (port, v) in [(Port::C, a_c), (Port::D, a_d), (Port::C, b_c), (Port::D, b_d)] {
            if !v.is_finite() || v < 0.0 {
                return Err(CalibrationError::NoModulation { port });
            }
        }
        Ok(Self { a_c, a_d, b_c, b_d })
    }

    /// Fringe visibility `2ab / (a^2 + b^2)` of one port.
    pub fn visibility(&self, port: Port) -> f64 {
        let (a, b) = match port {
            Port::C => (self.a_c, self.b_c),
            Port::D => (self.a_d, self.b_d),
        };
        if a == 0.0 && b == 0.0 {
            return 0.0;
        }
        2.0 * a * b / (a * a + b * b)
    }
}

/// Per-position aggregate of a scan.
#[derive(Clone, Debug)]
pub struct PositionSummary {
    pub index: usize,
    pub phase_tag: f64,
    pub n_shots: usize,
    pub mean_c: f64,
    pub mean_d: f64,
    /// Second-half minus first-half mean, a drift indicator per port.
    pub drift_c: f64,
    pub drift_d: f64,
}

/// Aggregated scan: one row per piezo position.
#[derive(Clone, Debug)]
pub struct ScanSummary {
    pub positions: Vec<PositionSummary>,
}

impl ScanSummary {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn means(&self, port: Port) -> impl Iterator<Item = f64> + '_ {
        self.positions.iter().map(move |p| match port {
            Port::C => p.mean_c,
            Port::D => p.mean_d,
        })
    }
}

/// Reads and aggregates a scan CSV into per-position summaries.
pub fn ingest_scan(path: &Path) -> Result<ScanSummary, CalibrationError> {
    let records = parse_scan(File::open(path)?)?;
    summarize(&records)
}

/// Reads a scan CSV into raw shot records, dropping the position indices.
pub fn read_scan_csv(path: &Path) -> Result<Vec<ShotRecord>, CalibrationError> {
    Ok(parse_scan(File::open(path)?)?
        .into_iter()
        .map(|(_, rec)| rec)
        .collect())
}

/// Parses the shot CSV schema from any reader into `(position_index, shot)`
/// rows, reporting malformed rows with their line numbers.
pub fn parse_scan<R: Read>(reader: R) -> Result<Vec<(usize, ShotRecord)>, CalibrationError> {
    let mut lines = BufReader::new(reader).lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(CalibrationError::Header { found: String::new() }),
    };
    if header.trim_end_matches('\r') != SCAN_CSV_HEADER {
        return Err(CalibrationError::Header { found: header });
    }

    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = i + 2; // 1-based, after the header
        records.push(parse_row(line, lineno)?);
    }
    Ok(records)
}

fn parse_row(line: &str, lineno: usize) -> Result<(usize, ShotRecord), CalibrationError> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 5 {
        return Err(CalibrationError::FieldCount {
            line: lineno,
            found: fields.len(),
        });
    }
    let index: usize = fields[0].parse().map_err(|_| CalibrationError::BadNumber {
        line: lineno,
        field: "position_index",
        value: fields[0].to_string(),
    })?;
    let phase_tag: f64 = fields[1].parse().map_err(|_| CalibrationError::BadNumber {
        line: lineno,
        field: "phase_tag",
        value: fields[1].to_string(),
    })?;
    let n_c = parse_count(fields[2], "n_c", lineno)?;
    let n_d = parse_count(fields[3], "n_d", lineno)?;
    let true_bit = match fields[4] {
        "" => None,
        "0" => Some(Bit::Zero),
        "1" => Some(Bit::One),
        other => {
            return Err(CalibrationError::BadBit {
                line: lineno,
                value: other.to_string(),
            })
        }
    };
    Ok((
        index,
        ShotRecord {
            n_c,
            n_d,
            true_bit,
            phase_tag,
        },
    ))
}

fn parse_count(s: &str, field: &'static str, lineno: usize) -> Result<u32, CalibrationError> {
    s.parse::<u32>().map_err(|_| CalibrationError::BadCount {
        line: lineno,
        field,
        value: s.to_string(),
    })
}

/// Groups parsed rows by position index and computes per-position means
/// and drift statistics. Gaps in the index range are flagged as empty
/// positions rather than dropped.
pub fn summarize(records: &[(usize, ShotRecord)]) -> Result<ScanSummary, CalibrationError> {
    let max_index = records
        .iter()
        .map(|(i, _)| *i)
        .max()
        .ok_or(CalibrationError::EmptyScan)?;
    let mut groups: Vec<Vec<&ShotRecord>> = vec![Vec::new(); max_index + 1];
    for (i, rec) in records {
        groups[*i].push(rec);
    }

    let mut positions = Vec::with_capacity(groups.len());
    for (index, group) in groups.iter().enumerate() {
        if group.is_empty() {
            return Err(CalibrationError::EmptyPosition { index });
        }
        let n = group.len();
        let mean_c = group.iter().map(|r| r.n_c as f64).sum::<f64>() / n as f64;
        let mean_d = group.iter().map(|r| r.n_d as f64).sum::<f64>() / n as f64;
        let half = n / 2;
        let (drift_c, drift_d) = if half == 0 || n < 2 {
            (0.0, 0.0)
        } else {
            let first_c = group[..half].iter().map(|r| r.n_c as f64).sum::<f64>() / half as f64;
            let first_d = group[..half].iter().map(|r| r.n_d as f64).sum::<f64>() / half as f64;
            let rest = n - half;
            let second_c = group[half..].iter().map(|r| r.n_c as f64).sum::<f64>() / rest as f64;
            let second_d = group[half..].iter().map(|r| r.n_d as f64).sum::<f64>() / rest as f64;
            (second_c - first_c, second_d - first_d)
        };
        positions.push(PositionSummary {
            index,
            phase_tag: group[0].phase_tag,
            n_shots: n,
            mean_c,
            mean_d,
            drift_c,
            drift_d,
        });
    }
    Ok(ScanSummary { positions })
}

/// Writes shot records in the scan CSV schema (LF line endings).
///
/// The position index increments whenever the phase tag changes, so the
/// records are expected grouped by position, as the generators emit them.
pub fn write_scan_csv<W: Write>(mut w: W, records: &[ShotRecord]) -> std::io::Result<()> {
    w.write_all(SCAN_CSV_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    let mut index = 0usize;
    let mut current_tag = None;
    for rec in records {
        match current_tag {
            None => current_tag = Some(rec.phase_tag),
            Some(tag) if tag != rec.phase_tag => {
                index += 1;
                current_tag = Some(rec.phase_tag);
            }
            _ => {}
        }
        let bit = match rec.true_bit {
            None => String::new(),
            Some(b) => format!("{}", b.as_u8()),
        };
        writeln!(
            w,
            "{},{:.16e},{},{},{}",
            index, rec.phase_tag, rec.n_c, rec.n_d, bit
        )?;
    }
    Ok(())
}

/// Least-squares fringe parameters `mu(phi) = A + Bc cos(phi) + Bs sin(phi)`
/// of one port, returned as `(A, amplitude)`.
fn harmonic_fit(summary: &ScanSummary, port: Port) -> Result<(f64, f64), CalibrationError> {
    let n = summary.len() as f64;
    let (mut sc, mut ss, mut scc, mut sss, mut scs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sy, mut syc, mut sys) = (0.0, 0.0, 0.0);
    for (pos, y) in summary.positions.iter().zip(summary.means(port)) {
        let c = pos.phase_tag.cos();
        let s = pos.phase_tag.sin();
        sc += c;
        ss += s;
        scc += c * c;
        sss += s * s;
        scs += c * s;
        sy += y;
        syc += y * c;
        sys += y * s;
    }
    // normal equations of the 3-parameter linear model
    let m = nalgebra::Matrix3::new(n, sc, ss, sc, scc, scs, ss, scs, sss);
    let rhs = nalgebra::Vector3::new(sy, syc, sys);
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or(CalibrationError::NoModulation { port })?;
    let offset = sol[0];
    let amplitude = (sol[1] * sol[1] + sol[2] * sol[2]).sqrt();
    Ok((offset, amplitude))
}

/// Retrieves the relative phase of each position from one port's fringe:
/// means normalized to `[-1, 1]` against the fitted fringe extrema, then
/// arccos, so the result lives on the `[0, pi]` branch.
pub fn retrieve_phase(summary: &ScanSummary, port: Port) -> Result<Vec<f64>, CalibrationError> {
    if summary.is_empty() {
        return Err(CalibrationError::EmptyScan);
    }
    let (offset, amplitude) = harmonic_fit(summary, port)?;
    if amplitude <= 1e-9 * (offset.abs() + 1.0) {
        return Err(CalibrationError::NoModulation { port });
    }
    let mu_max = offset + amplitude;
    let mu_min = offset - amplitude;
    Ok(summary
        .means(port)
        .map(|mu| {
            let normalized = (2.0 * mu - mu_max - mu_min) / (mu_max - mu_min);
            normalized.clamp(-1.0, 1.0).acos()
        })
        .collect())
}

/// Extracts the four fringe amplitudes from a scan.
///
/// Per port, the fitted fringe extrema invert to
/// `a = (sqrt(mu_max) + sqrt(mu_min)) / 2` and
/// `b = (sqrt(mu_max) - sqrt(mu_min)) / 2`, with `a >= b` by convention.
pub fn fit_fringe(summary: &ScanSummary) -> Result<DetectorCalibration, CalibrationError> {
    if summary.is_empty() {
        return Err(CalibrationError::EmptyScan);
    }
    let mut ab = [(0.0, 0.0); 2];
    for (slot, port) in [Port::C, Port::D].into_iter().enumerate() {
        let (offset, amplitude) = harmonic_fit(summary, port)?;
        if amplitude <= 1e-9 * (offset.abs() + 1.0) {
            return Err(CalibrationError::NoModulation { port });
        }
        let mu_max = offset + amplitude;
        let mu_min = (offset - amplitude).max(0.0);
        let a = 0.5 * (mu_max.sqrt() + mu_min.sqrt());
        let b = 0.5 * (mu_max.sqrt() - mu_min.sqrt());
        ab[slot] = (a, b);
    }
    DetectorCalibration::new(ab[0].0, ab[1].0, ab[0].1, ab[1].1)
}

/// RMS residual per port between the calibration's forward fringe and the
/// per-position means, evaluated at the recorded phase tags.
pub fn fringe_residual_rms(summary: &ScanSummary, cal: &DetectorCalibration) -> (f64, f64) {
    let n = summary.len() as f64;
    let (mut ss_c, mut ss_d) = (0.0, 0.0);
    for pos in &summary.positions {
        let c = pos.phase_tag.cos();
        let model_c = cal.a_c * cal.a_c + cal.b_c * cal.b_c + 2.0 * cal.a_c * cal.b_c * c;
        let model_d = cal.a_d * cal.a_d + cal.b_d * cal.b_d - 2.0 * cal.a_d * cal.b_d * c;
        ss_c += (pos.mean_c - model_c) * (pos.mean_c - model_c);
        ss_d += (pos.mean_d - model_d) * (pos.mean_d - model_d);
    }
    ((ss_c / n).sqrt(), (ss_d / n).sqrt())
}

/// Wrapped phase distance to `(-pi, pi]`.
fn wrap_phase(delta: f64) -> f64 {
    delta.sin().atan2(delta.cos())
}

/// Selects `n_select` records (with replacement) whose phase tags are
/// distributed as the noise density around `center_phase`.
///
/// Records are grouped into phase bins; a bin is drawn with probability
/// proportional to `f` at its (wrapped) offset times its population, then
/// a record is drawn uniformly inside it. The delta model always picks the
/// bin nearest to the center.
pub fn assemble_noisy_set<R: Rng + ?Sized>(
    scan: &[ShotRecord],
    noise: &PhaseNoise,
    center_phase: f64,
    n_select: usize,
    rng: &mut R,
) -> Result<Vec<ShotRecord>, CalibrationError> {
    if scan.is_empty() {
        return Err(CalibrationError::EmptyScan);
    }
    // group by identical phase tag, preserving scan order
    let mut bins: Vec<(f64, Vec<&ShotRecord>)> = Vec::new();
    for rec in scan {
        match bins.last_mut() {
            Some((tag, members)) if *tag == rec.phase_tag => members.push(rec),
            _ => bins.push((rec.phase_tag, vec![rec])),
        }
    }

    if noise.is_delta() {
        let nearest = bins
            .iter()
            .min_by(|a, b| {
                wrap_phase(a.0 - center_phase)
                    .abs()
                    .total_cmp(&wrap_phase(b.0 - center_phase).abs())
            })
            .expect("bins nonempty");
        let members = &nearest.1;
        return Ok((0..n_select)
            .map(|_| members[rng.random_range(0..members.len())].clone())
            .collect());
    }

    let weights: Vec<f64> = bins
        .iter()
        .map(|(tag, members)| {
            let offset = wrap_phase(tag - center_phase);
            noise.pdf(offset).unwrap_or(0.0) * members.len() as f64
        })
        .collect();
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(CalibrationError::InsufficientSupport);
    }
    let chooser = WeightedIndex::new(&weights).map_err(|_| CalibrationError::InsufficientSupport)?;
    Ok((0..n_select)
        .map(|_| {
            let members = &bins[chooser.sample(rng)].1;
            members[rng.random_range(0..members.len())].clone()
        })
        .collect())
}
