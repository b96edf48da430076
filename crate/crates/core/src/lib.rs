//! Discrimination of binary phase-shift-keyed coherent states under phase noise.
//!
//! The crate models a BPSK alphabet `{|β⟩, |−β⟩}` sent through a dephasing
//! channel (uniform window of width `γ` or zero-mean gaussian of std `σ`) and
//! evaluates three error-probability figures of merit:
//!
//! * the quantum-mechanical optimum ([`helstrom`]),
//! * ideal strong-local-oscillator homodyne detection ([`homodyne`]),
//! * a homodyne-like receiver built from two photon-number-resolving
//!   detectors whose count difference follows a Skellam law ([`skellam`]).
//!
//! On top of the analytic curves, [`montecarlo`] reproduces the measurement
//! shot by shot with Poissonian detectors and bootstrap error bars, and
//! [`calibration`] extracts fringe amplitudes and phases from piezo-scan
//! photocount records so the same pipeline runs on real or synthetic data.
//!
//! Grid sweeps and Monte Carlo repetitions are data-parallel via rayon when
//! the `parallel` feature (default) is enabled; disabling it falls back to
//! sequential execution with bit-identical results.

pub mod calibration;
mod exec;
pub mod helstrom;
pub mod homodyne;
pub mod montecarlo;
pub mod noise;
pub mod numerics;
pub mod skellam;
pub mod sweep;

pub use calibration::DetectorCalibration;
pub use noise::PhaseNoise;
pub use skellam::{Bit, DiscriminationProblem, MeansSource, OutputMeans};
