//! `discrim` - error-probability curves, photocount distributions and
//! synthetic calibration data for BPSK discrimination under phase noise.

mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::NoiseSelection;
use discrim::calibration::{fit_fringe, ingest_scan, retrieve_phase, CalibrationError, Port};
use discrim::montecarlo::synthesize_piezo_scan;
use discrim::sweep::{self, McSettings, SweepError};
use discrim::MeansSource;
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<CalibrationError> for CliError {
    fn from(e: CalibrationError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::BadGrid => CliError::Config(e.to_string()),
            SweepError::Helstrom(inner) => CliError::Numeric(inner.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "discrim",
    about = "BPSK coherent-state discrimination under phase noise",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Master seed for every stochastic output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (per-command default otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit a gnuplot script next to the CSV.
    #[arg(long)]
    plot_script: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    /// Add Monte Carlo columns.
    #[arg(long)]
    mc: bool,
    /// Shots per repetition (overrides [mc] shots).
    #[arg(long)]
    shots: Option<usize>,
    /// Bootstrap repetitions (overrides [mc] reps).
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PortArg {
    C,
    D,
}

#[derive(Subcommand)]
enum Command {
    /// Error-probability curves over a noise-parameter grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Photocount-difference distribution with the homodyne overlay.
    Distributions {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Synthesize a piezo-scan CSV from a calibration.
    Synthesize {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fit fringe amplitudes and retrieve phases from a scan CSV.
    Calibrate {
        /// Scan CSV to ingest.
        scan: PathBuf,
        /// Calibration report path.
        #[arg(long, default_value = "calibration_report.txt")]
        out: PathBuf,
        /// Fringe port used for phase retrieval.
        #[arg(long, value_enum, default_value_t = PortArg::C)]
        port: PortArg,
        /// Optional CSV of retrieved per-position phases.
        #[arg(long)]
        phases_out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sweep { common, mc } => cmd_sweep(common, mc),
        Command::Distributions { common, mc } => cmd_distributions(common, mc),
        Command::Synthesize { common } => cmd_synthesize(common),
        Command::Calibrate {
            scan,
            out,
            port,
            phases_out,
        } => cmd_calibrate(scan, out, port, phases_out),
    }
}

fn mc_settings(run: &config::RunConfig, mc: &McArgs, seed: u64) -> Option<McSettings> {
    mc.mc.then_some(McSettings {
        shots: run.mc_shots,
        reps: run.mc_reps,
        seed,
    })
}

fn cmd_sweep(common: CommonArgs, mc: McArgs) -> Result<(), CliError> {
    let file_cfg = config::load(&common.config)?;
    let run = config::resolve(file_cfg, mc.shots, mc.reps)?;
    if run.grid.is_empty() {
        return Err(CliError::Config(
            "sweep needs a [noise] section with start, stop and points".into(),
        ));
    }
    let out = common.out.unwrap_or_else(|| PathBuf::from("error_curve.csv"));

    match run.noise_kind {
        NoiseSelection::Matched => {
            if mc.mc {
                return Err(CliError::Config(
                    "--mc is not available for the matched-variance sweep".into(),
                ));
            }
            let cfg = run.sweep_config(None);
            let rows = sweep::matched_curves(&run.source, &cfg, &run.grid)?;
            output::write_matched_csv(&out, &rows)?;
            if let Some(script) = &common.plot_script {
                output::write_curve_plot(script, &out, false, true)?;
            }
        }
        NoiseSelection::Uniform | NoiseSelection::Gaussian => {
            let cfg = run.sweep_config(mc_settings(&run, &mc, common.seed));
            let rows = sweep::error_curve(&run.source, &cfg, &run.grid)?;
            output::write_curve_csv(&out, &rows)?;
            if let Some(script) = &common.plot_script {
                output::write_curve_plot(script, &out, mc.mc, false)?;
            }
        }
    }
    Ok(())
}

fn cmd_distributions(common: CommonArgs, mc: McArgs) -> Result<(), CliError> {
    let file_cfg = config::load(&common.config)?;
    let run = config::resolve(file_cfg, mc.shots, mc.reps)?;
    let out = common
        .out
        .unwrap_or_else(|| PathBuf::from("distributions.csv"));
    let settings = mc_settings(&run, &mc, common.seed);
    let rows = sweep::distribution(&run.source, &run.single_noise, settings);
    output::write_distribution_csv(&out, &rows)?;
    if let Some(script) = &common.plot_script {
        output::write_distribution_plot(script, &out, mc.mc)?;
    }
    Ok(())
}

fn cmd_synthesize(common: CommonArgs) -> Result<(), CliError> {
    let file_cfg = config::load(&common.config)?;
    let run = config::resolve(file_cfg, None, None)?;
    let MeansSource::Calibrated { cal, .. } = &run.source else {
        return Err(CliError::Config(
            "synthesize needs a [calibration] source".into(),
        ));
    };
    let out = common.out.unwrap_or_else(|| PathBuf::from("scan.csv"));
    let records = synthesize_piezo_scan(cal, run.scan_positions, run.scan_shots, common.seed);
    let file = std::fs::File::create(&out)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", out.display())))?;
    let mut writer = std::io::BufWriter::new(file);
    discrim::calibration::write_scan_csv(&mut writer, &records)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", out.display())))?;
    use std::io::Write;
    writer
        .flush()
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", out.display())))?;
    Ok(())
}

fn cmd_calibrate(
    scan: PathBuf,
    out: PathBuf,
    port: PortArg,
    phases_out: Option<PathBuf>,
) -> Result<(), CliError> {
    let summary = ingest_scan(&scan)?;
    let cal = fit_fringe(&summary)?;
    output::write_report(&out, &cal, &summary)?;
    if let Some(path) = phases_out {
        let port = match port {
            PortArg::C => Port::C,
            PortArg::D => Port::D,
        };
        let phases = retrieve_phase(&summary, port)?;
        output::write_phases_csv(&path, &summary, &phases)?;
    }
    Ok(())
}
