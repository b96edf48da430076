//! Acceptance suite: every release-gating property of the toolkit, one
//! test per criterion, each printing a PASS line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use discrim::calibration::{fit_fringe, ingest_scan};
use discrim::helstrom::{build_lambda, helstrom_bound, helstrom_error, pure_state_bound};
use discrim::homodyne::{homodyne_error, QuadratureDensity, Sign};
use discrim::montecarlo::{derive_seed, run_experiment, synthesize_piezo_scan};
use discrim::noise::{matched_sigma, PhaseNoise};
use discrim::numerics::{gauss_legendre, log_factorial};
use discrim::skellam::{skellam_error, skellam_pmf, DiscriminationProblem, OutputMeans};
use discrim::sweep::{error_curve, matched_curves, SweepConfig, SweepNoise};
use discrim::{DetectorCalibration, MeansSource};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;

const EXPERIMENT_1: (f64, f64, f64, f64) = (2.01, 2.07, 1.13, 1.07);
const EXPERIMENT_2: (f64, f64, f64, f64) = (2.74, 2.68, 0.87, 0.85);

fn calibrated_source(cal: (f64, f64, f64, f64)) -> MeansSource {
    MeansSource::Calibrated {
        cal: DetectorCalibration::new(cal.0, cal.1, cal.2, cal.3).unwrap(),
        phi: 0.0,
    }
}

/// Poisson-convolution Skellam oracle, independent of the Bessel route.
fn convolution_pmf(mu_c: f64, mu_d: f64, y: i64) -> f64 {
    let n_max = (mu_c + 10.0 * mu_c.sqrt() + 60.0).ceil() as i64;
    let mut total = 0.0;
    for n in 0.max(y)..=n_max {
        let m = n - y;
        let log_c = -mu_c + n as f64 * mu_c.ln() - log_factorial(n as u64);
        let log_d = -mu_d + m as f64 * mu_d.ln() - log_factorial(m as u64);
        total += (log_c + log_d).exp();
    }
    total
}

#[test]
fn criterion_1_skellam_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    for _ in 0..200 {
        let mu_c = 30.0 - 30.0 * rng.random::<f64>(); // (0, 30]
        let mu_d = 30.0 - 30.0 * rng.random::<f64>();
        let means = OutputMeans { mu_c, mu_d };
        let center = mu_c - mu_d;
        let spread = (10.0 * (mu_c + mu_d).sqrt()).ceil() as i64 + 30;
        let lo = center.floor() as i64 - spread;
        let hi = center.ceil() as i64 + spread;

        let mut total = 0.0;
        let mut mean = 0.0;
        let mut var = 0.0;
        for y in lo..=hi {
            let p = skellam_pmf(&means, y);
            total += p;
            mean += y as f64 * p;
            var += (y as f64 - center) * (y as f64 - center) * p;
            let oracle = convolution_pmf(mu_c, mu_d, y);
            assert!(
                (p - oracle).abs() < 1e-10,
                "pmf({mu_c},{mu_d};{y}) = {p} vs convolution {oracle}"
            );
        }
        assert!((total - 1.0).abs() < 1e-10, "sum {total} for ({mu_c},{mu_d})");
        assert!((mean - center).abs() < 1e-8, "mean {mean} vs {center}");
        assert!(
            (var - (mu_c + mu_d)).abs() < 1e-8,
            "variance {var} vs {}",
            mu_c + mu_d
        );
    }
    println!("criterion 1: PASS - Skellam normalization, moments and convolution oracle (200 mean pairs)");
}

#[test]
fn criterion_2_helstrom_closed_form() {
    for beta in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let matrix_value = helstrom_error(beta, &PhaseNoise::none()).unwrap();
        let closed = pure_state_bound(beta);
        assert!(
            (matrix_value - closed).abs() < 1e-8,
            "beta={beta}: eigen {matrix_value} vs closed form {closed}"
        );
    }
    let full = PhaseNoise::uniform(2.0 * std::f64::consts::PI).unwrap();
    let op = build_lambda(1.0, &full, 48).unwrap();
    assert_eq!(helstrom_bound(&op).unwrap(), 0.5);
    println!("criterion 2: PASS - matrix Helstrom equals the pure-state closed form; full dephasing gives exactly 1/2");
}

#[test]
fn criterion_3_homodyne_reduction() {
    for &beta in &[0.5, 1.0, 1.5, 2.0] {
        for &gamma in &[0.0, 0.5, 1.0, 2.0] {
            let noise = PhaseNoise::uniform(gamma).unwrap();
            let closed = homodyne_error(beta, &noise);
            // direct route: integrate the smeared densities over the two
            // error half-lines
            let plus = QuadratureDensity::new(beta, noise.clone(), Sign::Plus);
            let minus = QuadratureDensity::new(beta, noise.clone(), Sign::Minus);
            let span = std::f64::consts::SQRT_2 * beta + 9.0;
            let neg = gauss_legendre(300, -span, 0.0).unwrap();
            let pos = gauss_legendre(300, 0.0, span).unwrap();
            let direct = 0.5 * (neg.integrate(|x| plus.pdf(x)) + pos.integrate(|x| minus.pdf(x)));
            assert!(
                (closed - direct).abs() < 1e-8,
                "beta={beta} gamma={gamma}: closed {closed} vs 2-D quadrature {direct}"
            );
        }
    }
    let reference = homodyne_error(1.0, &PhaseNoise::none());
    assert!(
        (reference - 0.0227501).abs() < 1e-7,
        "beta=1 noiseless value {reference}"
    );
    println!("criterion 3: PASS - erfc-reduced homodyne error equals the two-dimensional quadrature (4x4 grid)");
}

#[test]
fn criterion_4_quantum_limit_ordering() {
    let grid: Vec<f64> = (0..30)
        .map(|i| i as f64 * std::f64::consts::PI / 29.0)
        .collect();
    let sigma_grid: Vec<f64> = grid.iter().map(|&g| matched_sigma(g)).skip(1).collect();

    for cal in [EXPERIMENT_1, EXPERIMENT_2] {
        let src = calibrated_source(cal);
        for (noise_kind, params) in [
            (SweepNoise::Uniform, grid.clone()),
            (SweepNoise::Gaussian, {
                let mut g = vec![0.0];
                g.extend_from_slice(&sigma_grid);
                g
            }),
        ] {
            let cfg = SweepConfig {
                noise: noise_kind,
                ..SweepConfig::default()
            };
            let curve = error_curve(&src, &cfg, &params).unwrap();
            let mut prev = (-1.0, -1.0, -1.0);
            for row in &curve {
                assert!(
                    row.p_helstrom <= row.p_homodyne + 1e-10,
                    "{cal:?} {noise_kind:?} param {}: H {} > hd {}",
                    row.noise_param,
                    row.p_helstrom,
                    row.p_homodyne
                );
                assert!(
                    row.p_helstrom <= row.p_skellam + 1e-10,
                    "{cal:?} {noise_kind:?} param {}: H {} > sk {}",
                    row.noise_param,
                    row.p_helstrom,
                    row.p_skellam
                );
                assert!(row.p_helstrom >= prev.0 - 1e-10, "helstrom not monotone");
                assert!(row.p_homodyne >= prev.1 - 1e-10, "homodyne not monotone");
                assert!(row.p_skellam >= prev.2 - 1e-10, "skellam not monotone");
                prev = (row.p_helstrom, row.p_homodyne, row.p_skellam);
            }
            // quasi-optimal convergence: the relative excess over the
            // quantum limit shrinks toward large noise
            let first = &curve[0];
            let last = &curve[curve.len() - 1];
            let rel_gap =
                |p_sk: f64, p_h: f64| (p_sk - p_h) / p_h;
            assert!(
                rel_gap(last.p_skellam, last.p_helstrom)
                    < rel_gap(first.p_skellam, first.p_helstrom),
                "{cal:?} {noise_kind:?}: relative gap did not shrink"
            );
        }
    }
    println!("criterion 4: PASS - Helstrom lower-bounds both receivers, all curves monotone, relative gap shrinks");
}

#[test]
fn criterion_5_uniform_vs_gaussian_crossing() {
    let grid: Vec<f64> = (1..=25).map(|i| i as f64 * 2.0 * std::f64::consts::PI / 25.0).collect();
    let src = calibrated_source(EXPERIMENT_1);
    let cfg = SweepConfig::default();
    let rows = matched_curves(&src, &cfg, &grid).unwrap();
    let crossing = rows.iter().find(|row| {
        row.uniform.p_helstrom < row.gaussian.p_helstrom
            && row.uniform.p_skellam < row.gaussian.p_skellam
    });
    let row = crossing.expect("no gamma with uniform strictly below gaussian");
    println!(
        "criterion 5: PASS - at gamma = {:.3} (sigma = {:.3}) uniform noise lies strictly below gaussian (helstrom {:.4e} < {:.4e}, skellam {:.4e} < {:.4e})",
        row.gamma,
        matched_sigma(row.gamma),
        row.uniform.p_helstrom,
        row.gaussian.p_helstrom,
        row.uniform.p_skellam,
        row.gaussian.p_skellam
    );
}

#[test]
fn criterion_6_monte_carlo_agreement() {
    let noises = [
        PhaseNoise::none(),
        PhaseNoise::uniform(0.5).unwrap(),
        PhaseNoise::gaussian(0.144).unwrap(),
    ];
    let n_shots = 1000;
    let n_reps = 100;
    for (ci, cal) in [EXPERIMENT_1, EXPERIMENT_2].into_iter().enumerate() {
        let src = calibrated_source(cal);
        for (ni, noise) in noises.iter().enumerate() {
            let analytic = skellam_error(&src, noise);
            let seed = derive_seed(0xAC06, (ci * 3 + ni) as u64);
            let mc = run_experiment(&src, noise, n_shots, n_reps, seed);
            let pooled =
                (analytic * (1.0 - analytic) / (n_shots as f64 * n_reps as f64)).sqrt();
            let tol = 3.0 * pooled.max(mc.stderr / (n_reps as f64).sqrt());
            assert!(
                (mc.mean_error - analytic).abs() < tol,
                "experiment {} noise {ni}: MC {} vs analytic {analytic} (tol {tol})",
                ci + 1,
                mc.mean_error
            );
        }
    }
    println!("criterion 6: PASS - Monte Carlo (N_s=1000, M=100) within 3 combined standard errors of the analytic error for both experiments and all three noise models");
}

#[test]
fn criterion_7_calibration_round_trip() {
    let cal = DetectorCalibration::new(2.01, 2.07, 1.13, 1.07).unwrap();
    let n_positions = 60;
    let shots = 50_000;
    let scan = synthesize_piezo_scan(&cal, n_positions, shots, 0x0CA1);

    let mut file = tempfile::NamedTempFile::new().unwrap();
    discrim::calibration::write_scan_csv(&mut file, &scan).unwrap();
    file.flush().unwrap();
    let summary = ingest_scan(file.path()).unwrap();
    let fitted = fit_fringe(&summary).unwrap();

    // propagated Poisson error of the amplitude estimates: fringe offset A
    // and amplitude R carry variances v and 2v with v = mu_bar/(n N)
    let tol = |a: f64, b: f64| {
        let mu_max = (a + b) * (a + b);
        let mu_min = (a - b) * (a - b);
        let v = (a * a + b * b) / (shots as f64 * n_positions as f64);
        let (vmax, vmin, cov) = (3.0 * v, 3.0 * v, -v);
        let da_max = 1.0 / (4.0 * mu_max.sqrt());
        let da_min = 1.0 / (4.0 * mu_min.sqrt());
        let var_a = da_max * da_max * vmax + da_min * da_min * vmin + 2.0 * da_max * da_min * cov;
        let var_b = da_max * da_max * vmax + da_min * da_min * vmin - 2.0 * da_max * da_min * cov;
        (3.0 * var_a.sqrt(), 3.0 * var_b.sqrt())
    };

    let (tol_ac, tol_bc) = tol(2.01, 1.13);
    let (tol_ad, tol_bd) = tol(2.07, 1.07);
    assert!(
        (fitted.a_c - 2.01).abs() < tol_ac,
        "a_c {} (tol {tol_ac})",
        fitted.a_c
    );
    assert!(
        (fitted.b_c - 1.13).abs() < tol_bc,
        "b_c {} (tol {tol_bc})",
        fitted.b_c
    );
    assert!(
        (fitted.a_d - 2.07).abs() < tol_ad,
        "a_d {} (tol {tol_ad})",
        fitted.a_d
    );
    assert!(
        (fitted.b_d - 1.07).abs() < tol_bd,
        "b_d {} (tol {tol_bd})",
        fitted.b_d
    );
    println!(
        "criterion 7: PASS - 60x50000 synthetic scan refits a_c={:.4} a_d={:.4} b_c={:.4} b_d={:.4} within 3 propagated standard errors",
        fitted.a_c, fitted.a_d, fitted.b_c, fitted.b_d
    );
}

#[test]
fn criterion_8_strong_lo_convergence() {
    let noise = PhaseNoise::none();
    let p_hd = homodyne_error(1.0, &noise);
    let gap = |alpha: f64| {
        let p = DiscriminationProblem::new(1.0, alpha, 0.5, 0.0).unwrap();
        (skellam_error(&MeansSource::Ideal(p), &noise) - p_hd).abs()
    };
    let (g3, g20) = (gap(3.0), gap(20.0));
    assert!(g20 < g3, "gap at alpha=20 ({g20}) not below alpha=3 ({g3})");
    println!(
        "criterion 8: PASS - |P_sk - P_hd| falls from {g3:.3e} at alpha=3 to {g20:.3e} at alpha=20"
    );
}
