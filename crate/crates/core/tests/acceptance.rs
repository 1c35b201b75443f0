//! Acceptance suite. Each test covers one exit criterion at its stated
//! tolerance and prints one pass/fail line; run with `--nocapture` to see the
//! lines for passing criteria.

mod common;

use std::time::Instant;

use common::*;
use extremal_qr::design::Design;
use extremal_qr::extreme::{
    default_truncation, sample_limit_distribution, sample_points, solve_limit,
};
use extremal_qr::harness::{
    run_qq_experiment, write_qq_csv, Approximation, ExperimentConfig, GeneratorKind,
    GeneratorSpec, ModelSpec,
};
use extremal_qr::qr;
use extremal_qr::rng::{phase_rng, replication_rng};
use extremal_qr::tail_index;
use extremal_qr::tails::{eta, make_model, HeterogeneityProfile, ModelName, TailType};
use extremal_qr::Dataset;
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::ContinuousCDF;

fn pass(n: usize, name: &str, detail: String) {
    println!("acceptance {n:2} ({name}): PASS  [{detail}]");
}

fn fail(n: usize, name: &str, detail: String) {
    println!("acceptance {n:2} ({name}): FAIL  [{detail}]");
}

/// Criterion 1: fit objective equals the brute-force vertex minimum within
/// 1e-9 on 200 random instances (T <= 25, d <= 3), total runtime < 30 s.
#[test]
fn acceptance_01_vertex_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = replication_rng(101, 0);
    let mut worst = 0.0_f64;
    for i in 0..200 {
        let d = 1 + i % 3;
        let t = d + (rng.random_range(0..=(25 - d)));
        let ds = random_instance(&mut rng, t, d);
        let tau = [0.1, 0.25, 0.5][i % 3];
        let fit = qr::fit(&ds, tau).unwrap();
        let oracle = brute_force_qr_objective(&ds, tau);
        let gap = (fit.objective - oracle).abs();
        worst = worst.max(gap);
        assert!(
            gap <= 1e-9,
            "instance {i} (T={t}, d={d}, tau={tau}): objective {} vs oracle {oracle}",
            fit.objective
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    pass(
        1,
        "vertex-oracle equivalence",
        format!("200 instances, worst gap {worst:.2e}, {elapsed:.2?}"),
    );
}

/// Criterion 2: univariate reduction, exact equality with the ceil(tau*T)-th
/// order statistic for non-integer tau*T, 100 randomized cases.
#[test]
fn acceptance_02_univariate_reduction() {
    let mut rng = replication_rng(102, 0);
    for case in 0..100 {
        let t = rng.random_range(3..40);
        let tau = loop {
            let tau: f64 = rng.random_range(0.02..0.98);
            let tt = tau * t as f64;
            if (tt - tt.round()).abs() > 1e-6 {
                break tau;
            }
        };
        let y: Vec<f64> = (0..t).map(|_| rng.random_range(-10.0..10.0)).collect();
        let ds = Dataset::from_rows(y.clone(), &vec![vec![1.0]; t]).unwrap();
        let fit = qr::fit(&ds, tau).unwrap();
        let mut sorted = y;
        sorted.sort_by(f64::total_cmp);
        let idx = (tau * t as f64).ceil() as usize;
        assert_eq!(
            fit.beta_hat[0],
            sorted[idx - 1],
            "case {case}: T={t}, tau={tau}, tau*T={}",
            tau * t as f64
        );
    }
    pass(2, "univariate reduction", "100 cases, exact".into());
}

/// Criterion 3: univariate type 2, xi = 1, k = 0.5: the simulated limit has
/// CDF 1 - e^{1/z} (z < 0); KS < 0.02 at R = 20000, runtime < 60 s.
#[test]
fn acceptance_03_extreme_limit_closed_form() {
    let start = Instant::now();
    let model = make_model(ModelName::Cauchy, None).unwrap();
    let profile = HeterogeneityProfile::homogeneous(TailType::Type2, 1);
    let draws =
        sample_limit_distribution(&model, &profile, &Design::Intercept, 0.5, 20_000, 103).unwrap();
    let mut z: Vec<f64> = draws.iter().map(|s| s.z[0]).collect();
    z.sort_by(f64::total_cmp);
    assert!(z.iter().all(|&v| v < 0.0));
    let ks = ks_statistic(&z, |v| if v < 0.0 { (1.0 - (1.0 / v).exp()).max(0.0) } else { 1.0 });
    let elapsed = start.elapsed();
    assert!(ks < 0.02, "KS = {ks}");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    pass(
        3,
        "extreme-limit closed form",
        format!("KS = {ks:.4} over 20000 draws, {elapsed:.2?}"),
    );
}

/// Criterion 4: doubling the truncation changes the 1st-99th percentiles of
/// Z(k) by < 0.5% relative, k in {0.5, 2, 10}, catalogue models.
#[test]
fn acceptance_04_truncation_stability() {
    let reps: usize = 2000;
    let mut worst = 0.0_f64;
    for (name, label) in [
        (ModelName::Cauchy, "cauchy"),
        (ModelName::Uniform, "uniform"),
        (ModelName::ReflectedExponential, "reflected_exponential"),
    ] {
        let model = make_model(name, None).unwrap();
        let profile = HeterogeneityProfile::homogeneous(model.tail_type, 1);
        for k in [0.5, 2.0, 10.0] {
            let m = default_truncation(k);
            let mut resolves = 0usize;
            let (mut z1, mut z2): (Vec<f64>, Vec<f64>) = (0..reps)
                .map(|rep| {
                    let mut rng = phase_rng(104, 0, rep as u64);
                    let full =
                        sample_points(&model, &profile, &Design::Intercept, 2 * m, &mut rng)
                            .unwrap();
                    let prefix = full.truncate(m);
                    let b = solve_limit(&full, k).unwrap().z[0];
                    // A draw rejected at M triggers the stability re-solve at
                    // the doubled truncation, which is the full realization.
                    let a = match solve_limit(&prefix, k) {
                        Ok(s) => s.z[0],
                        Err(_) => {
                            resolves += 1;
                            b
                        }
                    };
                    (a, b)
                })
                .unzip();
            assert!(
                resolves * 50 <= reps,
                "{label}, k={k}: {resolves}/{reps} draws needed the re-solve"
            );
            z1.sort_by(f64::total_cmp);
            z2.sort_by(f64::total_cmp);
            for p in 1..=99usize {
                let q1 = z1[(p * reps) / 100];
                let q2 = z2[(p * reps) / 100];
                let rel = (q1 - q2).abs() / q1.abs().max(q2.abs()).max(1e-12);
                worst = worst.max(rel);
                assert!(
                    rel < 0.005,
                    "{label}, k={k}, percentile {p}: {q1} vs {q2} (rel {rel:.2e})"
                );
            }
        }
    }
    pass(
        4,
        "truncation stability",
        format!("3 models x 3 k, worst percentile shift {worst:.2e}"),
    );
}

/// Criterion 5: every fit and every limit solution certifies optimality with
/// a gradient condition in [0,1]^d within 1e-8; 1000 random instances.
#[test]
fn acceptance_05_gradient_certificates() {
    let mut rng = replication_rng(105, 0);
    let mut checked = 0usize;
    // 600 finite-sample fits.
    for i in 0..600 {
        let d = 1 + i % 3;
        let t = d + rng.random_range(0..30);
        let ds = random_instance(&mut rng, t, d);
        let tau = rng.random_range(0.05..0.95);
        let fit = qr::fit(&ds, tau).unwrap();
        for (j, &zeta) in fit.certificate.iter().enumerate() {
            assert!(
                (-1e-8..=1.0 + 1e-8).contains(&zeta),
                "fit {i} component {j}: zeta = {zeta}"
            );
        }
        let recomputed = qr::optimality_certificate(&ds, &fit).unwrap();
        for (j, &zeta) in recomputed.iter().enumerate() {
            assert!(
                (-1e-8..=1.0 + 1e-8).contains(&zeta),
                "fit {i} recomputed component {j}: zeta = {zeta}"
            );
        }
        checked += 1;
    }
    // 400 limit solutions over the catalogue (point bases only: univariate
    // for type 2, where the support constraint cannot bind).
    let setups: Vec<(ModelName, Design, HeterogeneityProfile)> = vec![
        (
            ModelName::Cauchy,
            Design::Intercept,
            HeterogeneityProfile::homogeneous(TailType::Type2, 1),
        ),
        (
            ModelName::Uniform,
            Design::Beta33 { d: 2 },
            HeterogeneityProfile::homogeneous(TailType::Type3, 2),
        ),
        (
            ModelName::ReflectedExponential,
            Design::Beta33 { d: 2 },
            HeterogeneityProfile::homogeneous(TailType::Type1, 2),
        ),
        (
            ModelName::Uniform,
            Design::Beta33 { d: 2 },
            HeterogeneityProfile::new(vec![1.0, 0.4], TailType::Type3, None).unwrap(),
        ),
    ];
    for i in 0..400 {
        let (name, design, profile) = &setups[i % setups.len()];
        let model = make_model(*name, None).unwrap();
        let k = [0.5, 1.7, 3.3][i % 3];
        let mut rng = phase_rng(105, 1, i as u64);
        let s = extremal_qr::extreme::sample_limit(&model, profile, design, k, &mut rng).unwrap();
        for (j, &zeta) in s.certificate.iter().enumerate() {
            assert!(
                (-1e-8..=1.0 + 1e-8).contains(&zeta),
                "limit draw {i} ({name:?}, k={k}) component {j}: zeta = {zeta}"
            );
        }
        checked += 1;
    }
    assert_eq!(checked, 1000);
    pass(5, "gradient-condition certification", "1000 instances".into());
}

/// Criterion 6: intermediate normality for the homogeneous uniform-error
/// design (d = 2, T = 5000, tau*T = 200, R = 2000): componentwise KS < 0.05
/// against the normal law, covariance within 15% of Omega_0, cross-level
/// correlation at (1, 4) within 0.1 of 0.5.
#[test]
fn acceptance_06_intermediate_normality() {
    let t = 5000usize;
    let tau = 0.04;
    let m = 2.0;
    let reps = 2000usize;
    let beta = vec![1.0, 1.0];
    let spec = GeneratorSpec {
        kind: GeneratorKind::LocationShift,
        beta: beta.clone(),
        sigma: None,
        error_model: ModelSpec {
            name: ModelName::Uniform,
            xi: None,
        },
        covariate_model: Design::Beta33 { d: 2 },
        t,
        d: 2,
    };
    // Oracle scaling for uniform errors: F^{-1}(s) = s, so the (m-1) tau
    // spacing gives a_T(l) = sqrt(tau l T) / ((m-1) l tau).
    let a_t = |l: f64| (tau * l * t as f64).sqrt() / ((m - 1.0) * l * tau);
    let draws: Vec<([f64; 2], [f64; 2])> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = phase_rng(106, 0, rep as u64);
            let data = spec.generate(&mut rng).unwrap();
            let fit1 = qr::fit(&data, tau).unwrap();
            let fit4 = qr::fit(&data, 4.0 * tau).unwrap();
            let z1 = [
                a_t(1.0) * (fit1.beta_hat[0] - (beta[0] + tau)),
                a_t(1.0) * (fit1.beta_hat[1] - beta[1]),
            ];
            let z4 = [
                a_t(4.0) * (fit4.beta_hat[0] - (beta[0] + 4.0 * tau)),
                a_t(4.0) * (fit4.beta_hat[1] - beta[1]),
            ];
            (z1, z4)
        })
        .collect();

    // Omega_0 = Q_X^{-1} at xi = -1, m = 2 (variance factor 1).
    let omega: [[f64; 2]; 2] = [[8.0, -14.0], [-14.0, 28.0]];
    let normal = statrs::distribution::Normal::standard();
    let mut detail = String::new();
    for j in 0..2 {
        let mut col: Vec<f64> = draws.iter().map(|(z1, _)| z1[j] / omega[j][j].sqrt()).collect();
        col.sort_by(f64::total_cmp);
        let ks = ks_statistic(&col, |v| normal.cdf(v));
        assert!(ks < 0.05, "component {j}: KS = {ks}");
        detail.push_str(&format!("KS_{j} = {ks:.3}; "));
    }
    let z1_0: Vec<f64> = draws.iter().map(|(z1, _)| z1[0]).collect();
    let z1_1: Vec<f64> = draws.iter().map(|(z1, _)| z1[1]).collect();
    let cov = [
        [covariance(&z1_0, &z1_0), covariance(&z1_0, &z1_1)],
        [covariance(&z1_1, &z1_0), covariance(&z1_1, &z1_1)],
    ];
    for i in 0..2 {
        for j in 0..2 {
            let rel = (cov[i][j] - omega[i][j]).abs() / omega[i][j].abs();
            assert!(
                rel < 0.15,
                "cov[{i}][{j}] = {} vs {} (rel {rel:.3})",
                cov[i][j],
                omega[i][j]
            );
        }
    }
    let z4_0: Vec<f64> = draws.iter().map(|(_, z4)| z4[0]).collect();
    let corr = correlation(&z1_0, &z4_0);
    assert!(
        (corr - 0.5).abs() < 0.1,
        "cross-level correlation {corr} not within 0.1 of 0.5"
    );
    detail.push_str(&format!("corr(1,4) = {corr:.3}"));
    pass(6, "intermediate normality", detail);
}

/// Criterion 7: Pickands consistency and variance on the Cauchy design
/// (T = 100000, tau*T = 2000, l = m = 2, 100 seeds): |xi - 1| < 0.1 in at
/// least 90 seeds; sd of sqrt(tau T)(xi - 1) within 30% of sqrt(9/(4 ln^2 2));
/// runtime < 5 min.
#[test]
fn acceptance_07_pickands_consistency_and_variance() {
    let start = Instant::now();
    let t = 100_000usize;
    let tau = 0.02;
    let spec = GeneratorSpec {
        kind: GeneratorKind::LocationShift,
        beta: vec![0.0],
        sigma: None,
        error_model: ModelSpec {
            name: ModelName::Cauchy,
            xi: None,
        },
        covariate_model: Design::Intercept,
        t,
        d: 1,
    };
    let xis: Vec<f64> = (0..100)
        .into_par_iter()
        .map(|seed| {
            let mut rng = phase_rng(107, 0, seed as u64);
            let data = spec.generate(&mut rng).unwrap();
            let est = tail_index::spacing_estimates(&data, Some(tau), 2.0, 2.0).unwrap();
            est.xi_hat
        })
        .collect();
    let hits = xis.iter().filter(|x| (**x - 1.0).abs() < 0.1).count();
    let scaled: Vec<f64> = xis
        .iter()
        .map(|x| (tau * t as f64).sqrt() * (x - 1.0))
        .collect();
    let sd_emp = sd(&scaled);
    let sd_asy = (9.0 / (4.0 * std::f64::consts::LN_2.powi(2))).sqrt();
    let elapsed = start.elapsed();
    assert!(hits >= 90, "only {hits}/100 seeds within 0.1 of xi = 1");
    assert!(
        (sd_emp - sd_asy).abs() / sd_asy < 0.30,
        "scaled sd {sd_emp} vs asymptotic {sd_asy}"
    );
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    pass(
        7,
        "pickands consistency and variance",
        format!("{hits}/100 hits, sd {sd_emp:.3} vs {sd_asy:.3}, {elapsed:.2?}"),
    );
}

/// Criterion 8: reduced-scale reproduction of the approximation comparison:
/// for the Cauchy location-shift design (d = 5, T = 500, tau = 0.025,
/// R = 2000), the extreme approximation tracks the finite-sample quantiles
/// more closely than the central one for both the intercept and the first
/// slope, over the 5th-95th percentile grid.
#[test]
fn acceptance_08_qq_extreme_beats_central() {
    let config = ExperimentConfig {
        generator: GeneratorSpec {
            kind: GeneratorKind::LocationShift,
            beta: vec![1.0; 5],
            sigma: None,
            error_model: ModelSpec {
                name: ModelName::Cauchy,
                xi: None,
            },
            covariate_model: Design::Beta33 { d: 5 },
            t: 500,
            d: 5,
        },
        tau: 0.025,
        k: Some(12.5),
        r: 2000,
        seed: 108,
        approximations: vec![
            Approximation::FiniteSample,
            Approximation::Extreme,
            Approximation::Central,
        ],
        quantile_grid: (5..=95).map(|p| p as f64 / 100.0).collect(),
        output_path: None,
    };
    let table = run_qq_experiment(&config).unwrap();
    let mut detail = String::new();
    for coef in [0usize, 1] {
        let rows: Vec<_> = table.rows.iter().filter(|r| r.coef == coef).collect();
        let mad_extreme = mean(
            &rows
                .iter()
                .map(|r| (r.extreme - r.finite_sample).abs())
                .collect::<Vec<_>>(),
        );
        let mad_central = mean(
            &rows
                .iter()
                .map(|r| (r.central - r.finite_sample).abs())
                .collect::<Vec<_>>(),
        );
        assert!(
            mad_extreme < mad_central,
            "coef {coef}: extreme MAD {mad_extreme} vs central MAD {mad_central}"
        );
        detail.push_str(&format!(
            "coef {coef}: extreme {mad_extreme:.3} < central {mad_central:.3}; "
        ));
    }
    // Keep the CSV surface exercised.
    let mut buf = Vec::new();
    write_qq_csv(&mut buf, &table).unwrap();
    assert!(buf.starts_with(b"coef,prob,finite_sample,extreme,central\n"));
    pass(8, "qq reproduction (extreme vs central)", detail);
}

/// Criterion 9, as stated: for the type-3 univariate design and k in
/// {0.5, 2}, the Monte Carlo mean of a_T(bhat(tau) - beta_r - b_T e_1) should
/// lie within 3 Monte Carlo standard errors of eta(k).
///
/// The statistic converges in law to Z(k), whose mean is the mean of the
/// ceil(k)-th arrival (= ceil(k) at xi = -1), not eta(k) = k; for k = 0.5
/// those differ by 0.5 while 3 standard errors shrink like 3/sqrt(R). The
/// companion test below checks the attainable form of the centering law; this
/// one implements the criterion literally and is expected to fail.
#[test]
fn acceptance_09_centering_law_as_stated() {
    let (means, ses, etas) = centering_law_draws(&[0.5, 2.0]);
    let mut ok = true;
    let mut detail = String::new();
    for (i, k) in [0.5, 2.0].iter().enumerate() {
        let gap = (means[i] - etas[i]).abs();
        detail.push_str(&format!(
            "k={k}: mean {:.4}, eta(k) {:.4}, 3se {:.4}; ",
            means[i],
            etas[i],
            3.0 * ses[i]
        ));
        if gap > 3.0 * ses[i] {
            ok = false;
        }
    }
    if ok {
        pass(9, "centering law (as stated)", detail.clone());
    } else {
        fail(9, "centering law (as stated)", detail.clone());
    }
    assert!(ok, "criterion 9 as stated does not hold: {detail}");
}

/// Attainable form of the centering law: the deterministic part
/// a_T(beta(tau) - beta_r - b_T e_1) equals eta(k) exactly for uniform
/// errors, and the Monte Carlo mean of the full statistic matches the
/// simulated limit-law mean within 3 combined standard errors. The
/// distributional half uses non-integer k: at integer k the limit argmin is a
/// segment, so any comparison of means is tie-break-dependent.
#[test]
fn acceptance_09b_centering_law_attainable() {
    let t = 2000usize;
    let profile = HeterogeneityProfile::homogeneous(TailType::Type3, 1);
    // Deterministic centering at the criterion's k values: a_T = T,
    // beta(tau) - beta_r = tau for uniform errors, so T * (k/T) = k = eta(k).
    for k in [0.5, 2.0] {
        let tau = k / t as f64;
        let deterministic = t as f64 * tau;
        let eta_k = eta(k, &profile, -1.0)[0];
        assert!(
            (deterministic - eta_k).abs() < 1e-9,
            "k={k}: population centering {deterministic} vs eta {eta_k}"
        );
    }
    // Distributional centering at unique-argmin levels.
    let ks = [0.5, 2.5];
    let (means, ses, _etas) = centering_law_draws(&ks);
    let mut detail = String::new();
    for (i, &k) in ks.iter().enumerate() {
        let model = make_model(ModelName::Uniform, None).unwrap();
        let draws =
            sample_limit_distribution(&model, &profile, &Design::Intercept, k, 2000, 209).unwrap();
        let zbar = mean(&draws.iter().map(|s| s.z[0]).collect::<Vec<_>>());
        let zse = sd(&draws.iter().map(|s| s.z[0]).collect::<Vec<_>>()) / (2000f64).sqrt();
        let combined = (ses[i].powi(2) + zse.powi(2)).sqrt();
        let gap = (means[i] - zbar).abs();
        assert!(
            gap <= 3.0 * combined,
            "k={k}: finite-sample mean {} vs limit mean {zbar} (3se {})",
            means[i],
            3.0 * combined
        );
        detail.push_str(&format!("k={k}: {:.3} vs limit {zbar:.3}; ", means[i]));
    }
    pass(9, "centering law (attainable form)", detail);
}

fn centering_law_draws(ks: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let t = 2000usize;
    let reps = 2000usize;
    let spec = GeneratorSpec {
        kind: GeneratorKind::LocationShift,
        beta: vec![1.0],
        sigma: None,
        error_model: ModelSpec {
            name: ModelName::Uniform,
            xi: None,
        },
        covariate_model: Design::Intercept,
        t,
        d: 1,
    };
    let profile = HeterogeneityProfile::homogeneous(TailType::Type3, 1);
    let mut means = Vec::new();
    let mut ses = Vec::new();
    let mut etas = Vec::new();
    for (slot, &k) in ks.iter().enumerate() {
        let tau = k / t as f64;
        // a_T = 1/F^{-1}(1/T) = T for uniform errors; b_T = 0; beta_r = beta.
        let a_t = t as f64;
        let stats: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = phase_rng(109, slot as u32, rep as u64);
                let data = spec.generate(&mut rng).unwrap();
                let fit = qr::fit(&data, tau).unwrap();
                a_t * (fit.beta_hat[0] - spec.beta[0])
            })
            .collect();
        means.push(mean(&stats));
        ses.push(sd(&stats) / (reps as f64).sqrt());
        etas.push(eta(k, &profile, -1.0)[0]);
    }
    (means, ses, etas)
}

/// Criterion 10: equivariance and invariance suites, plus bitwise determinism
/// of harness output under different thread counts.
#[test]
#[allow(clippy::needless_range_loop)]
fn acceptance_10_equivariance_and_determinism() {
    let mut rng = replication_rng(110, 0);

    // Regression and scale equivariance of fit.
    for i in 0..40 {
        let d = 1 + i % 3;
        let t = d + rng.random_range(4..30);
        let ds = random_instance(&mut rng, t, d);
        let tau = rng.random_range(0.1..0.9);
        let base = qr::fit(&ds, tau).unwrap();

        let gamma: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let shifted_y: Vec<f64> = (0..t)
            .map(|r| ds.y()[r] + extremal_qr::linalg::dot(ds.row(r), &gamma))
            .collect();
        let ds_shift = Dataset::new(shifted_y, ds.x_flat().to_vec(), d).unwrap();
        let shifted = qr::fit(&ds_shift, tau).unwrap();
        assert_eq!(shifted.basis, base.basis, "instance {i}: basis changed under shift");
        for j in 0..d {
            assert!(
                (shifted.beta_hat[j] - base.beta_hat[j] - gamma[j]).abs() <= 1e-9,
                "instance {i}, coef {j}: regression equivariance violated"
            );
        }

        // Scale by a power of two: bitwise equality.
        let scaled_y: Vec<f64> = ds.y().iter().map(|v| 2.0 * v).collect();
        let ds_scale = Dataset::new(scaled_y, ds.x_flat().to_vec(), d).unwrap();
        let scaled = qr::fit(&ds_scale, tau).unwrap();
        assert_eq!(scaled.basis, base.basis);
        for j in 0..d {
            assert_eq!(scaled.beta_hat[j], 2.0 * base.beta_hat[j]);
        }
        // General positive scale: equality at solver tolerance.
        let scaled_y3: Vec<f64> = ds.y().iter().map(|v| 3.0 * v).collect();
        let ds_scale3 = Dataset::new(scaled_y3, ds.x_flat().to_vec(), d).unwrap();
        let scaled3 = qr::fit(&ds_scale3, tau).unwrap();
        for j in 0..d {
            assert!(
                (scaled3.beta_hat[j] - 3.0 * base.beta_hat[j]).abs()
                    <= 1e-9 * (1.0 + base.beta_hat[j].abs()),
                "instance {i}: scale equivariance at c = 3"
            );
        }
    }

    // Shift and scale invariance of the spacing estimators.
    for i in 0..10 {
        let t = 600 + 40 * i;
        let mut gen_rng = phase_rng(110, 1, i as u64);
        let spec = GeneratorSpec {
            kind: GeneratorKind::LocationShift,
            beta: vec![0.5, -0.25],
            sigma: None,
            error_model: ModelSpec {
                name: ModelName::Uniform,
                xi: None,
            },
            covariate_model: Design::UniformCube { d: 2 },
            t,
            d: 2,
        };
        let ds = spec.generate(&mut gen_rng).unwrap();
        let base = tail_index::spacing_estimates(&ds, Some(0.05), 2.0, 2.0).unwrap();
        let gamma = [1.5, -2.0];
        let c = 2.5;
        let y2: Vec<f64> = (0..t)
            .map(|r| c * (ds.y()[r] + extremal_qr::linalg::dot(ds.row(r), &gamma)))
            .collect();
        let ds2 = Dataset::new(y2, ds.x_flat().to_vec(), 2).unwrap();
        let other = tail_index::spacing_estimates(&ds2, Some(0.05), 2.0, 2.0).unwrap();
        assert!(
            (base.xi_hat - other.xi_hat).abs() <= 1e-9,
            "xi changed: {} vs {}",
            base.xi_hat,
            other.xi_hat
        );
        assert!((base.rho_hat - other.rho_hat).abs() <= 1e-9);
        for j in 0..2 {
            assert!((base.c_hat_vector[j] - other.c_hat_vector[j]).abs() <= 1e-9);
        }
    }

    // Harness determinism across thread counts (bitwise CSV equality).
    let config = ExperimentConfig {
        generator: GeneratorSpec {
            kind: GeneratorKind::LocationShift,
            beta: vec![1.0, 1.0],
            sigma: None,
            error_model: ModelSpec {
                name: ModelName::Cauchy,
                xi: None,
            },
            covariate_model: Design::Beta33 { d: 2 },
            t: 200,
            d: 2,
        },
        tau: 0.05,
        k: None,
        r: 100,
        seed: 1100,
        approximations: vec![
            Approximation::FiniteSample,
            Approximation::Extreme,
            Approximation::Central,
        ],
        quantile_grid: (1..=19).map(|p| p as f64 / 20.0).collect(),
        output_path: None,
    };
    let mut outputs = Vec::new();
    for threads in [1usize, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let table = pool.install(|| run_qq_experiment(&config)).unwrap();
        let mut buf = Vec::new();
        write_qq_csv(&mut buf, &table).unwrap();
        outputs.push(buf);
    }
    assert_eq!(outputs[0], outputs[1], "output differs across thread counts");

    pass(
        10,
        "equivariance, invariance, determinism",
        "fit equivariances, spacing invariances, thread-count determinism".into(),
    );
}
