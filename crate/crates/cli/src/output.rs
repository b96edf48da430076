//! CSV and report writers, and the generated gnuplot scripts.

use crate::CliError;
use discrim::calibration::{fringe_residual_rms, ScanSummary};
use discrim::sweep::{CurvePoint, DistributionRow, MatchedPoint};
use discrim::DetectorCalibration;
use std::io::Write;
use std::path::Path;

pub const CURVE_HEADER: &str = "noise_param,p_helstrom,p_homodyne,p_skellam,mc_mean,mc_stderr";
pub const MATCHED_HEADER: &str = "gamma,p_helstrom_uniform,p_homodyne_uniform,p_skellam_uniform,\
p_helstrom_gaussian,p_homodyne_gaussian,p_skellam_gaussian";
pub const DISTRIBUTION_HEADER: &str = "y,skellam_pmf,mc_frequency,homodyne_overlay";

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn finish<W: Write>(mut w: W, path: &Path) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub fn write_curve_csv(path: &Path, rows: &[CurvePoint]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "{CURVE_HEADER}")?;
        for row in rows {
            let (mc_mean, mc_stderr) = match row.mc {
                Some((m, s)) => (format!("{m:.10e}"), format!("{s:.10e}")),
                None => (String::new(), String::new()),
            };
            writeln!(
                w,
                "{:.10e},{:.10e},{:.10e},{:.10e},{},{}",
                row.noise_param, row.p_helstrom, row.p_homodyne, row.p_skellam, mc_mean, mc_stderr
            )?;
        }
        Ok(())
    };
    emit().map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    finish(w, path)
}

pub fn write_matched_csv(path: &Path, rows: &[MatchedPoint]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "{MATCHED_HEADER}")?;
        for row in rows {
            writeln!(
                w,
                "{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
                row.gamma,
                row.uniform.p_helstrom,
                row.uniform.p_homodyne,
                row.uniform.p_skellam,
                row.gaussian.p_helstrom,
                row.gaussian.p_homodyne,
                row.gaussian.p_skellam
            )?;
        }
        Ok(())
    };
    emit().map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    finish(w, path)
}

pub fn write_distribution_csv(path: &Path, rows: &[DistributionRow]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "{DISTRIBUTION_HEADER}")?;
        for row in rows {
            let freq = match row.mc_frequency {
                Some(f) => format!("{f:.10e}"),
                None => String::new(),
            };
            writeln!(
                w,
                "{},{:.10e},{},{:.10e}",
                row.y, row.pmf, freq, row.homodyne_overlay
            )?;
        }
        Ok(())
    };
    emit().map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    finish(w, path)
}

/// Calibration report as `key = value` lines.
pub fn write_report(
    path: &Path,
    cal: &DetectorCalibration,
    summary: &ScanSummary,
) -> Result<(), CliError> {
    let (rms_c, rms_d) = fringe_residual_rms(summary, cal);
    let max_drift = |f: fn(&discrim::calibration::PositionSummary) -> f64| {
        summary
            .positions
            .iter()
            .map(|p| f(p).abs())
            .fold(0.0_f64, f64::max)
    };
    let shots_total: usize = summary.positions.iter().map(|p| p.n_shots).sum();
    let mut w = create(path)?;
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "a_c = {:.12}", cal.a_c)?;
        writeln!(w, "a_d = {:.12}", cal.a_d)?;
        writeln!(w, "b_c = {:.12}", cal.b_c)?;
        writeln!(w, "b_d = {:.12}", cal.b_d)?;
        writeln!(w, "visibility_c = {:.12}", cal.visibility(discrim::calibration::Port::C))?;
        writeln!(w, "visibility_d = {:.12}", cal.visibility(discrim::calibration::Port::D))?;
        writeln!(w, "residual_rms_c = {rms_c:.6e}")?;
        writeln!(w, "residual_rms_d = {rms_d:.6e}")?;
        writeln!(w, "max_abs_drift_c = {:.6e}", max_drift(|p| p.drift_c))?;
        writeln!(w, "max_abs_drift_d = {:.6e}", max_drift(|p| p.drift_d))?;
        writeln!(w, "positions = {}", summary.len())?;
        writeln!(w, "shots_total = {shots_total}")?;
        Ok(())
    };
    emit().map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    finish(w, path)
}

/// Reads the four amplitudes back from a calibration report.
pub fn read_report(path: &Path) -> Result<DetectorCalibration, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read report {}: {e}", path.display())))?;
    let mut values = [None::<f64>; 4];
    const KEYS: [&str; 4] = ["a_c", "a_d", "b_c", "b_d"];
    for line in text.lines() {
        if let Some((key, value)) = line.split_once('=') {
            if let Some(slot) = KEYS.iter().position(|k| *k == key.trim()) {
                values[slot] = value.trim().parse().ok();
            }
        }
    }
    match values {
        [Some(a_c), Some(a_d), Some(b_c), Some(b_d)] => {
            DetectorCalibration::new(a_c, a_d, b_c, b_d)
                .map_err(|e| CliError::Data(format!("invalid report amplitudes: {e}")))
        }
        _ => Err(CliError::Data(format!(
            "report {} is missing amplitude entries",
            path.display()
        ))),
    }
}

/// Retrieved per-position phases as a small CSV.
pub fn write_phases_csv(
    path: &Path,
    summary: &ScanSummary,
    phases: &[f64],
) -> Result<(), CliError> {
    let mut w = create(path)?;
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "position_index,phase_tag,retrieved_phase")?;
        for (pos, theta) in summary.positions.iter().zip(phases) {
            writeln!(w, "{},{:.16e},{:.16e}", pos.index, pos.phase_tag, theta)?;
        }
        Ok(())
    };
    emit().map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    finish(w, path)
}

/// Gnuplot script for an error-curve CSV (log-scale y, one line per
/// receiver, error bars when the MC columns are populated).
pub fn write_curve_plot(path: &Path, csv: &Path, with_mc: bool, matched: bool) -> Result<(), CliError> {
    let mut w = create(path)?;
    let csv = csv.display();
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "set datafile separator \",\"")?;
        writeln!(w, "set logscale y")?;
        writeln!(w, "set xlabel \"noise parameter\"")?;
        writeln!(w, "set ylabel \"error probability\"")?;
        writeln!(w, "set key left top")?;
        if matched {
            writeln!(
                w,
                "plot \"{csv}\" using 1:2 with lines title \"Helstrom (uniform)\", \\"
            )?;
            writeln!(w, "     \"{csv}\" using 1:5 with lines dashtype 2 title \"Helstrom (gaussian)\", \\")?;
            writeln!(w, "     \"{csv}\" using 1:4 with lines title \"Skellam (uniform)\", \\")?;
            writeln!(
                w,
                "     \"{csv}\" using 1:7 with lines dashtype 2 title \"Skellam (gaussian)\""
            )?;
        } else {
            writeln!(w, "plot \"{csv}\" using 1:2 with lines title \"Helstrom\", \\")?;
            writeln!(w, "     \"{csv}\" using 1:3 with lines title \"homodyne\", \\")?;
            write!(w, "     \"{csv}\" using 1:4 with lines title \"Skellam\"")?;
            if with_mc {
                writeln!(w, ", \\")?;
                writeln!(
                    w,
                    "     \"{csv}\" using 1:5:6 with yerrorbars pointtype 7 title \"Monte Carlo\""
                )?;
            } else {
                writeln!(w)?;
            }
        }
        Ok(())
    };
    emit().map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    finish(w, path)
}

/// Gnuplot script for a distribution CSV.
pub fn write_distribution_plot(path: &Path, csv: &Path, with_mc: bool) -> Result<(), CliError> {
    let mut w = create(path)?;
    let csv = csv.display();
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "set datafile separator \",\"")?;
        writeln!(w, "set xlabel \"photocount difference\"")?;
        writeln!(w, "set ylabel \"probability\"")?;
        writeln!(w, "set style fill solid 0.35")?;
        writeln!(w, "set boxwidth 0.9")?;
        writeln!(w, "plot \"{csv}\" using 1:2 with boxes title \"Skellam\", \\")?;
        write!(
            w,
            "     \"{csv}\" using 1:4 with lines dashtype 2 title \"homodyne overlay\""
        )?;
        if with_mc {
            writeln!(w, ", \\")?;
            writeln!(
                w,
                "     \"{csv}\" using 1:3 with points pointtype 7 title \"Monte Carlo\""
            )?;
        } else {
            writeln!(w)?;
        }
        Ok(())
    };
    emit().map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    finish(w, path)
}
